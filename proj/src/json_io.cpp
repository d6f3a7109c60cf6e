#include "vbcert/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vbcert/errors.hpp"

namespace vbcert {

using nlohmann::json;

namespace {

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const char* what) {
    if (!j.is_object()) raise(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known)
            raise(ErrorCode::ParseError,
                  std::string(what) + " has unknown field \"" + key + "\"");
    }
}

const json& require_field(const json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end())
        raise(ErrorCode::ParseError, std::string(what) + " is missing field \"" + key + "\"");
    return *it;
}

double as_number(const json& j, const char* what) {
    if (!j.is_number()) raise(ErrorCode::ParseError, std::string(what) + " must be a number");
    return j.get<double>();
}

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer())
        raise(ErrorCode::ParseError, std::string(what) + " must be an integer");
    return j.get<int>();
}

Vector as_vector(const json& j, const char* what) {
    if (!j.is_array()) raise(ErrorCode::ParseError, std::string(what) + " must be an array");
    Vector out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_number(v, what));
    return out;
}

}  // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::ParseError, "cannot open \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        raise(ErrorCode::ParseError, "\"" + path + "\": " + e.what());
    }
    return j;
}

Mdp parse_mdp_json(const json& j) {
    reject_unknown_fields(j, {"num_states", "num_actions", "gamma", "transitions", "rewards"},
                          "MDP file");
    Mdp mdp;
    mdp.num_states = as_int(require_field(j, "num_states", "MDP file"), "num_states");
    mdp.num_actions = as_int(require_field(j, "num_actions", "MDP file"), "num_actions");
    mdp.gamma = as_number(require_field(j, "gamma", "MDP file"), "gamma");
    if (mdp.num_states < 1 || mdp.num_actions < 1)
        raise(ErrorCode::ParseError, "num_states and num_actions must be positive");

    const json& trans = require_field(j, "transitions", "MDP file");
    const json& rew = require_field(j, "rewards", "MDP file");
    if (!trans.is_array() || trans.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ParseError, "transitions must list one entry per state");
    if (!rew.is_array() || rew.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ParseError, "rewards must list one entry per state");

    mdp.transitions.reserve(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions *
                            mdp.num_states);
    mdp.rewards.reserve(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s) {
        const json& per_action = trans[s];
        if (!per_action.is_array() || per_action.size() != static_cast<std::size_t>(mdp.num_actions))
            raise(ErrorCode::ParseError,
                  "transitions[" + std::to_string(s) + "] must list one row per action");
        for (int a = 0; a < mdp.num_actions; ++a) {
            const Vector row = as_vector(per_action[a], "transition row");
            if (row.size() != static_cast<std::size_t>(mdp.num_states))
                raise(ErrorCode::ParseError, "transition row (state " + std::to_string(s + 1) +
                                                 ", action " + std::to_string(a + 1) +
                                                 ") has wrong length");
            mdp.transitions.insert(mdp.transitions.end(), row.begin(), row.end());
        }
        const Vector r = as_vector(rew[s], "reward row");
        if (r.size() != static_cast<std::size_t>(mdp.num_actions))
            raise(ErrorCode::ParseError,
                  "rewards[" + std::to_string(s) + "] must list one value per action");
        mdp.rewards.insert(mdp.rewards.end(), r.begin(), r.end());
    }
    return mdp;
}

Policy parse_policy_json(const json& j, const Mdp& mdp) {
    reject_unknown_fields(j, {"pi", "deterministic"}, "policy file");
    const bool has_pi = j.contains("pi");
    const bool has_det = j.contains("deterministic");
    if (has_pi == has_det)
        raise(ErrorCode::ParseError,
              "policy file must contain exactly one of \"pi\" or \"deterministic\"");

    Policy policy;
    if (has_pi) {
        const json& rows = j["pi"];
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(mdp.num_states))
            raise(ErrorCode::ParseError, "pi must list one row per state");
        policy.pi = Matrix(mdp.num_states, mdp.num_actions);
        for (int s = 0; s < mdp.num_states; ++s) {
            const Vector row = as_vector(rows[s], "policy row");
            if (row.size() != static_cast<std::size_t>(mdp.num_actions))
                raise(ErrorCode::ParseError,
                      "policy row " + std::to_string(s + 1) + " has wrong length");
            for (int a = 0; a < mdp.num_actions; ++a) policy.pi(s, a) = row[a];
        }
    } else {
        const json& actions = j["deterministic"];
        if (!actions.is_array() || actions.size() != static_cast<std::size_t>(mdp.num_states))
            raise(ErrorCode::ParseError, "deterministic must list one action per state");
        std::vector<int> chosen(mdp.num_states);
        for (int s = 0; s < mdp.num_states; ++s) {
            const int a = as_int(actions[s], "deterministic action");  // 1-based
            if (a < 1 || a > mdp.num_actions)
                raise(ErrorCode::ParseError, "action " + std::to_string(a) + " for state " +
                                                 std::to_string(s + 1) + " out of range");
            chosen[s] = a - 1;
        }
        policy = Policy::deterministic(mdp.num_states, mdp.num_actions, chosen);
    }
    return policy;
}

Matrix parse_features_json(const json& j, int num_states) {
    reject_unknown_fields(j, {"phi"}, "features file");
    const json& rows = require_field(j, "phi", "features file");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(num_states))
        raise(ErrorCode::ParseError, "phi must list one feature row per state");
    const Vector first = as_vector(rows[0], "feature row");
    Matrix phi(num_states, first.size());
    for (int s = 0; s < num_states; ++s) {
        const Vector row = as_vector(rows[s], "feature row");
        if (row.size() != first.size())
            raise(ErrorCode::ParseError, "feature rows have inconsistent lengths");
        for (std::size_t c = 0; c < row.size(); ++c) phi(s, c) = row[c];
    }
    return phi;
}

Vector parse_vector_json(const json& j, int length) {
    const Vector v = as_vector(j, "vector file");
    if (v.size() != static_cast<std::size_t>(length))
        raise(ErrorCode::ParseError, "vector has length " + std::to_string(v.size()) +
                                         ", expected " + std::to_string(length));
    return v;
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::ParseError, "cannot open \"" + path + "\"");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace vbcert
