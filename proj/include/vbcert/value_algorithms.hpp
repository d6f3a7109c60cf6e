#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "vbcert/mdp.hpp"

namespace vbcert {

struct Trace {
    std::vector<Vector> iterates;                            // J_0..J_K or theta_0..theta_K
    std::optional<std::vector<std::vector<int>>> switching;  // greedy selector per step (VI)
    std::optional<std::vector<int>> visited;                 // s_0..s_K for sampled runs
};

struct SandwichTrace {
    Trace j;                          // the VI run, switching recorded
    std::vector<Vector> j_upper;      // J^u_k
    std::vector<Vector> j_lower;      // J^o_k
    std::vector<int> p_star_selector; // greedy selector at J*, defines P*, R*
};

struct FeatureMap {
    Matrix phi;  // n x d, row s is phi(s)^T

    int dim() const { return static_cast<int>(phi.cols()); }
    Vector feature(int s) const { return phi.row(s); }
};

/// Validates full column rank (smallest singular value of phi, via the
/// extreme eigenvalues of phi^T phi) and d <= n.
FeatureMap validate_features(Matrix phi, int num_states, const Tolerances& tol = {});

/// J_{t+1} = gamma P_pi J_t + R_pi, exact recursion.
Trace run_vc(const PolicyInduced& pi_ind, Vector j0, int steps);

/// J_{t+1} = T(J_t); the greedy selector of each step is recorded.
Trace run_vi(const Mdp& mdp, Vector j0, int steps);

/// Bounding trajectories driven by the recorded switching sequence and by
/// the greedy selector at J*.
SandwichTrace run_sandwich(const Mdp& mdp, const OptimalValue& opt, Vector j0, int steps);

/// TD(0) with linear function approximation on a sampled trajectory of the
/// induced chain. s_0 is drawn from omega, then s_{t+1} ~ P_pi(s_t, .), all
/// through SplitMix64(seed) by inverse CDF (one draw per transition).
/// Requires an irreducible aperiodic chain.
Trace run_td0(const PolicyInduced& pi_ind, const FeatureMap& features, double alpha,
              Vector theta0, int steps, std::uint64_t seed, const Tolerances& tol = {});

/// One row per iteration: k, <label>1..<label>n, then sigma1..sigman and s
/// when present (states and actions 1-based).
void write_trace_csv(std::ostream& out, const Trace& trace, const std::string& value_label);

}  // namespace vbcert
