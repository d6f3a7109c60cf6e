#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "vbcert/matrix.hpp"
#include "vbcert/mdp.hpp"

namespace vbcert {

nlohmann::json load_json_file(const std::string& path);

/// {"num_states", "num_actions", "gamma", "transitions", "rewards"};
/// unknown fields are rejected.
Mdp parse_mdp_json(const nlohmann::json& j);

/// Either {"pi": [[...] per state]} or {"deterministic": [1-based action per
/// state]}; exactly one of the two keys.
Policy parse_policy_json(const nlohmann::json& j, const Mdp& mdp);

/// {"phi": [[d reals] per state]}.
Matrix parse_features_json(const nlohmann::json& j, int num_states);

/// Bare array of n reals (used for --j0 files).
Vector parse_vector_json(const nlohmann::json& j, int length);

/// FNV-1a 64-bit digest of a file's raw bytes, as a hex string.
std::string file_digest_hex(const std::string& path);

}  // namespace vbcert
