#pragma once

#include <optional>
#include <vector>

#include "vbcert/matrix.hpp"
#include "vbcert/tolerances.hpp"

namespace vbcert {

/// Finite MDP with states 0..n-1 and actions 0..l-1 (external formats are
/// 1-based; conversion happens at the JSON boundary).
struct Mdp {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    Vector transitions;  // [s][a][s'], row-major, each (s,a) row a distribution
    Vector rewards;      // [s][a]

    double prob(int s, int a, int next) const {
        return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
    }
    double& prob(int s, int a, int next) {
        return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
    }
    double reward(int s, int a) const {
        return rewards[static_cast<std::size_t>(s) * num_actions + a];
    }
    double& reward(int s, int a) {
        return rewards[static_cast<std::size_t>(s) * num_actions + a];
    }
};

struct Policy {
    Matrix pi;  // n x l, rows are distributions over actions

    static Policy deterministic(int num_states, int num_actions, const std::vector<int>& action);
};

struct PolicyInduced {
    Matrix p_pi;                  // n x n stochastic
    Vector r_pi;                  // length n
    std::optional<Vector> omega;  // stationary distribution, present iff irreducible
    Vector j_pi;                  // exact fixed point of J = R + gamma P J
    double gamma = 0.0;
};

struct ChainStructure {
    bool irreducible = false;
    bool aperiodic = false;
    int period = 1;  // gcd of cycle lengths through state 0's reachable class
};

struct BellmanResult {
    Vector values;              // T(J) per state
    std::vector<int> selector;  // argmax action per state, ties to smallest index
};

struct OptimalValue {
    Vector j_star;
    Policy pi_star;             // deterministic (one-hot rows)
    std::vector<int> selector;  // greedy selector at j_star
};

/// Checks every structural invariant and throws with a diagnostic listing all
/// violations (row indices, offending sums/entries) when any fails.
Mdp validate_mdp(Mdp raw, const Tolerances& tol = {});
Policy validate_policy(const Mdp& mdp, Policy raw, const Tolerances& tol = {});

PolicyInduced induce_policy(const Mdp& mdp, const Policy& policy, const Tolerances& tol = {});

/// Direct linear solve of omega^T P = omega^T with the normalization row;
/// supports periodic irreducible chains. Throws Reducible otherwise.
Vector stationary_distribution(const Matrix& p, const Tolerances& tol = {});

ChainStructure chain_structure(const Matrix& p, const Tolerances& tol = {});

BellmanResult bellman_optimality(const Mdp& mdp, const Vector& j);

/// Policy iteration with exact evaluation; terminates when the greedy
/// selector repeats.
OptimalValue optimal_value(const Mdp& mdp, const Tolerances& tol = {});

}  // namespace vbcert
