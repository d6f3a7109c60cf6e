#pragma once

// Shared helpers for the test suites: seeded instance generation and the
// brute-force oracles the unit and acceptance tests check against.

#include <cmath>
#include <utility>
#include <vector>

#include "vbcert/matrix.hpp"
#include "vbcert/mdp.hpp"
#include "vbcert/numerics.hpp"
#include "vbcert/rng.hpp"
#include "vbcert/value_algorithms.hpp"

namespace vbtest {

using namespace vbcert;

/// Dense strictly-positive transition rows make every generated chain
/// irreducible and aperiodic by construction.
inline Mdp random_mdp(std::uint64_t seed, int n, int l, double gamma) {
    SplitMix64 rng(seed);
    Mdp mdp;
    mdp.num_states = n;
    mdp.num_actions = l;
    mdp.gamma = gamma;
    mdp.transitions.resize(static_cast<std::size_t>(n) * l * n);
    mdp.rewards.resize(static_cast<std::size_t>(n) * l);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < l; ++a) {
            double sum = 0.0;
            Vector row(n);
            for (int j = 0; j < n; ++j) {
                row[j] = 0.05 + rng.next_double();
                sum += row[j];
            }
            for (int j = 0; j < n; ++j) mdp.prob(s, a, j) = row[j] / sum;
            mdp.reward(s, a) = rng.next_double();
        }
    }
    return validate_mdp(mdp);
}

inline Policy random_policy(std::uint64_t seed, const Mdp& mdp) {
    SplitMix64 rng(seed);
    Policy policy;
    policy.pi = Matrix(mdp.num_states, mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s) {
        double sum = 0.0;
        Vector row(mdp.num_actions);
        for (int a = 0; a < mdp.num_actions; ++a) {
            row[a] = 0.05 + rng.next_double();
            sum += row[a];
        }
        for (int a = 0; a < mdp.num_actions; ++a) policy.pi(s, a) = row[a] / sum;
    }
    return policy;
}

inline Matrix random_features(std::uint64_t seed, int n, int d) {
    SplitMix64 rng(seed);
    Matrix phi(n, d);
    for (int s = 0; s < n; ++s)
        for (int c = 0; c < d; ++c) phi(s, c) = 2.0 * rng.next_double() - 1.0;
    return phi;
}

/// Single-action wrapper turning an explicit kernel/reward pair into a
/// PolicyInduced through the public pipeline.
inline PolicyInduced induced_from_kernel(const Matrix& p, const Vector& r, double gamma) {
    const int n = static_cast<int>(p.rows());
    Mdp mdp;
    mdp.num_states = n;
    mdp.num_actions = 1;
    mdp.gamma = gamma;
    mdp.transitions.resize(static_cast<std::size_t>(n) * n);
    mdp.rewards = r;
    for (int s = 0; s < n; ++s)
        for (int j = 0; j < n; ++j) mdp.prob(s, 0, j) = p(s, j);
    return induce_policy(validate_mdp(mdp), Policy::deterministic(n, 1, std::vector<int>(n, 0)));
}

/// Zero-reward copy of an induced chain; its fixed point is exactly zero, so
/// traces of this system are the error recursion itself.
inline PolicyInduced error_system(const PolicyInduced& ind) {
    return induced_from_kernel(ind.p_pi, Vector(ind.p_pi.rows(), 0.0), ind.gamma);
}

/// Exhaustive deterministic-policy enumeration: solves every selector exactly
/// and returns the elementwise maximum. Independent of policy iteration.
inline Vector enumerate_optimal_value(const Mdp& mdp) {
    const int n = mdp.num_states;
    std::vector<int> selector(n, 0);
    Vector best;
    while (true) {
        Matrix system(n, n);
        Vector r(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                system(i, j) = (i == j ? 1.0 : 0.0) - mdp.gamma * mdp.prob(i, selector[i], j);
            r[i] = mdp.reward(i, selector[i]);
        }
        const Vector j_m = solve_linear(system, r);
        if (best.empty())
            best = j_m;
        else
            for (int i = 0; i < n; ++i) best[i] = std::max(best[i], j_m[i]);

        int pos = 0;
        while (pos < n && ++selector[pos] == mdp.num_actions) selector[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

/// The uniform two-state chain used by the scalar TD demos.
inline PolicyInduced uniform_two_state(double gamma, Vector rewards = {1.0, 0.0}) {
    return induced_from_kernel(Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}), rewards, gamma);
}

inline FeatureMap constant_features(int n) {
    return validate_features(Matrix(n, 1, 1.0), n);
}

}  // namespace vbtest
