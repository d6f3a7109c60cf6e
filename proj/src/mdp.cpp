#include "vbcert/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "vbcert/errors.hpp"
#include "vbcert/numerics.hpp"

namespace vbcert {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

Policy Policy::deterministic(int num_states, int num_actions, const std::vector<int>& action) {
    Policy p;
    p.pi = Matrix(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) p.pi(s, action[s]) = 1.0;
    return p;
}

Mdp validate_mdp(Mdp raw, const Tolerances& tol) {
    std::string problems;
    auto note = [&problems](const std::string& msg) {
        if (!problems.empty()) problems += "; ";
        problems += msg;
    };

    ErrorCode worst = ErrorCode::InvalidKernel;
    bool bad_shape = false, bad_gamma = false, bad_kernel = false;

    if (raw.num_states < 1 || raw.num_actions < 1) {
        bad_shape = true;
        note("num_states and num_actions must be positive");
    } else {
        const std::size_t n = static_cast<std::size_t>(raw.num_states);
        const std::size_t l = static_cast<std::size_t>(raw.num_actions);
        if (raw.transitions.size() != n * l * n) {
            bad_shape = true;
            note("transitions has " + std::to_string(raw.transitions.size()) +
                 " entries, expected " + std::to_string(n * l * n));
        }
        if (raw.rewards.size() != n * l) {
            bad_shape = true;
            note("rewards has " + std::to_string(raw.rewards.size()) + " entries, expected " +
                 std::to_string(n * l));
        }
    }

    if (!(raw.gamma > 0.0 && raw.gamma < 1.0)) {
        bad_gamma = true;
        note("gamma = " + fmt(raw.gamma) + " outside (0,1)");
    }

    if (!bad_shape) {
        for (int s = 0; s < raw.num_states; ++s) {
            for (int a = 0; a < raw.num_actions; ++a) {
                double sum = 0.0;
                for (int next = 0; next < raw.num_states; ++next) {
                    const double p = raw.prob(s, a, next);
                    if (!std::isfinite(p) || p < 0.0) {
                        bad_kernel = true;
                        note("transition row (state " + std::to_string(s + 1) + ", action " +
                             std::to_string(a + 1) + ") has entry " + fmt(p));
                    }
                    sum += p;
                }
                if (std::abs(sum - 1.0) > tol.row_sum) {
                    bad_kernel = true;
                    note("transition row (state " + std::to_string(s + 1) + ", action " +
                         std::to_string(a + 1) + ") sums to " + fmt(sum));
                }
                if (!std::isfinite(raw.reward(s, a))) {
                    bad_kernel = true;
                    note("reward (state " + std::to_string(s + 1) + ", action " +
                         std::to_string(a + 1) + ") is not finite");
                }
            }
        }
    }

    if (bad_shape)
        worst = ErrorCode::ShapeMismatch;
    else if (bad_gamma)
        worst = ErrorCode::InvalidGamma;
    else if (bad_kernel)
        worst = ErrorCode::InvalidKernel;

    if (bad_shape || bad_gamma || bad_kernel) raise(worst, problems);
    return raw;
}

Policy validate_policy(const Mdp& mdp, Policy raw, const Tolerances& tol) {
    if (raw.pi.rows() != static_cast<std::size_t>(mdp.num_states) ||
        raw.pi.cols() != static_cast<std::size_t>(mdp.num_actions))
        raise(ErrorCode::ShapeMismatch,
              "policy is " + std::to_string(raw.pi.rows()) + "x" + std::to_string(raw.pi.cols()) +
                  ", MDP needs " + std::to_string(mdp.num_states) + "x" +
                  std::to_string(mdp.num_actions));
    for (int s = 0; s < mdp.num_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            const double p = raw.pi(s, a);
            if (!std::isfinite(p) || p < 0.0)
                raise(ErrorCode::InvalidKernel,
                      "policy row " + std::to_string(s + 1) + " has entry " + fmt(p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol.row_sum)
            raise(ErrorCode::InvalidKernel,
                  "policy row " + std::to_string(s + 1) + " sums to " + fmt(sum));
    }
    return raw;
}

ChainStructure chain_structure(const Matrix& p, const Tolerances& tol) {
    const std::size_t n = p.rows();
    auto edge = [&](std::size_t i, std::size_t j) { return p(i, j) > tol.edge_threshold; };

    auto reach = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v = 0; v < n; ++v) {
                const bool has = forward ? edge(u, v) : edge(v, u);
                if (has && !seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
            }
        }
        return seen;
    };

    const auto fwd = reach(true);
    const auto bwd = reach(false);
    bool irreducible = true;
    for (std::size_t i = 0; i < n; ++i)
        if (!fwd[i] || !bwd[i]) irreducible = false;

    // Period of state 0's reachable class: gcd over edges (u,v) of
    // depth(u) + 1 - depth(v) from a BFS rooted at 0.
    std::vector<long> depth(n, -1);
    std::queue<std::size_t> q;
    q.push(0);
    depth[0] = 0;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t v = 0; v < n; ++v) {
            if (edge(u, v) && depth[v] < 0) {
                depth[v] = depth[u] + 1;
                q.push(v);
            }
        }
    }
    long g = 0;
    for (std::size_t u = 0; u < n; ++u) {
        if (depth[u] < 0) continue;
        for (std::size_t v = 0; v < n; ++v)
            if (edge(u, v)) g = std::gcd(g, depth[u] + 1 - depth[v]);
    }

    ChainStructure cs;
    cs.irreducible = irreducible;
    cs.period = g == 0 ? 1 : static_cast<int>(g);
    cs.aperiodic = irreducible && cs.period == 1;
    return cs;
}

Vector stationary_distribution(const Matrix& p, const Tolerances& tol) {
    if (!p.square()) raise(ErrorCode::ShapeMismatch, "stationary distribution needs a square matrix");
    const std::size_t n = p.rows();
    const ChainStructure cs = chain_structure(p, tol);
    if (!cs.irreducible)
        raise(ErrorCode::Reducible, "transition matrix is not irreducible");

    // (P^T - I) omega = 0 with the last equation replaced by the
    // normalization sum(omega) = 1; any single row is redundant because the
    // rows of P^T - I sum to zero.
    Matrix system(n, n);
    Vector rhs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) system(j, i) = p(i, j) - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) system(n - 1, i) = 1.0;
    rhs[n - 1] = 1.0;

    Vector omega = solve_linear(system, rhs, tol);

    const Vector residual = transpose(p) * omega - omega;
    if (inf_norm(residual) > tol.stationarity)
        raise(ErrorCode::SingularMatrix,
              "stationarity residual " + fmt(inf_norm(residual)) + " above tolerance");
    for (double w : omega)
        if (!(w > 0.0))
            raise(ErrorCode::Reducible, "computed stationary distribution is not positive");
    return omega;
}

PolicyInduced induce_policy(const Mdp& mdp, const Policy& policy, const Tolerances& tol) {
    const int n = mdp.num_states;
    const int l = mdp.num_actions;

    PolicyInduced ind;
    ind.gamma = mdp.gamma;
    ind.p_pi = Matrix(n, n);
    ind.r_pi.assign(n, 0.0);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < l; ++a) {
            const double w = policy.pi(s, a);
            if (w == 0.0) continue;
            for (int next = 0; next < n; ++next) ind.p_pi(s, next) += w * mdp.prob(s, a, next);
            ind.r_pi[s] += w * mdp.reward(s, a);
        }
    }

    Matrix system(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            system(i, j) = (i == j ? 1.0 : 0.0) - mdp.gamma * ind.p_pi(i, j);
    ind.j_pi = solve_linear(system, ind.r_pi, tol);

    if (chain_structure(ind.p_pi, tol).irreducible)
        ind.omega = stationary_distribution(ind.p_pi, tol);
    return ind;
}

BellmanResult bellman_optimality(const Mdp& mdp, const Vector& j) {
    if (j.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ShapeMismatch, "value vector length mismatch");
    BellmanResult out;
    out.values.resize(mdp.num_states);
    out.selector.resize(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            // Same accumulation order as the fixed-policy recursion, so a
            // single-action MDP reproduces it bitwise.
            double acc = 0.0;
            for (int next = 0; next < mdp.num_states; ++next)
                acc += mdp.prob(s, a, next) * j[next];
            const double q = mdp.gamma * acc + mdp.reward(s, a);
            if (q > best) {  // strict: ties keep the smallest action index
                best = q;
                best_a = a;
            }
        }
        out.values[s] = best;
        out.selector[s] = best_a;
    }
    return out;
}

namespace {

Vector evaluate_selector(const Mdp& mdp, const std::vector<int>& selector, const Tolerances& tol) {
    const int n = mdp.num_states;
    Matrix system(n, n);
    Vector r(n);
    for (int i = 0; i < n; ++i) {
        const int a = selector[i];
        for (int j = 0; j < n; ++j)
            system(i, j) = (i == j ? 1.0 : 0.0) - mdp.gamma * mdp.prob(i, a, j);
        r[i] = mdp.reward(i, a);
    }
    return solve_linear(system, r, tol);
}

}  // namespace

OptimalValue optimal_value(const Mdp& mdp, const Tolerances& tol) {
    // Iteration cap l^n, saturated; policy iteration visits each policy at
    // most once under exact evaluation.
    double cap_d = 1.0;
    for (int i = 0; i < mdp.num_states; ++i) {
        cap_d *= mdp.num_actions;
        if (cap_d > 1e7) {
            cap_d = 1e7;
            break;
        }
    }
    const long cap = static_cast<long>(cap_d);

    std::vector<int> selector = bellman_optimality(mdp, Vector(mdp.num_states, 0.0)).selector;
    Vector j = evaluate_selector(mdp, selector, tol);
    for (long iter = 0; iter <= cap; ++iter) {
        const BellmanResult greedy = bellman_optimality(mdp, j);
        if (greedy.selector == selector) {
            OptimalValue out;
            out.j_star = std::move(j);
            out.selector = selector;
            out.pi_star = Policy::deterministic(mdp.num_states, mdp.num_actions, selector);
            return out;
        }
        selector = greedy.selector;
        j = evaluate_selector(mdp, selector, tol);
    }
    raise(ErrorCode::NonConvergence, "policy iteration exceeded the policy-count cap");
}

}  // namespace vbcert
