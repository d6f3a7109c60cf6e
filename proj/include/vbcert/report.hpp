#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vbcert {

/// Options mirror the CLI flags one-to-one; paths empty means "not given".
struct VcOptions {
    std::string mdp_path;
    std::string policy_path;
    std::string out_path;
    std::string j0_path;  // optional JSON array, defaults to the zero vector
    int steps = 200;
    bool dump_traces = false;
    bool include_timings = false;
};

struct ViOptions {
    std::string mdp_path;
    std::string out_path;
    std::optional<int> steps;  // fixed step count when given, else tol-driven
    double tol = 1e-8;
    bool dump_traces = false;
    bool include_timings = false;
};

struct TdOptions {
    std::string mdp_path;
    std::string policy_path;
    std::string features_path;
    std::string out_path;
    std::string alpha = "auto";  // number or the literal "auto"
    double alpha_frac = 0.99;
    int runs = 0;
    int steps = 5000;
    std::uint64_t seed = 0;
    bool dump_traces = false;
    bool include_timings = false;
};

/// Each command runs the full analysis pipeline for its mode, writes the
/// JSON report to out_path (when set) and returns it. Input and assumption
/// failures surface as vbcert::Error.
nlohmann::json cmd_analyze_vc(const VcOptions& options);
nlohmann::json cmd_analyze_vi(const ViOptions& options);
nlohmann::json cmd_analyze_td(const TdOptions& options);

/// Validates the MDP file, printing diagnostics to `diagnostics`. Returns
/// true when the file is valid.
bool cmd_validate(const std::string& mdp_path, std::string& diagnostics);

}  // namespace vbcert
