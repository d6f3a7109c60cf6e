#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "vbcert/mdp.hpp"
#include "vbcert/value_algorithms.hpp"

namespace vbcert {

/// Markov chain over state pairs (s, s') carrying positive stationary mass;
/// pairs are kept in lexicographic order and indexed 0..N-1.
struct AugmentedChain {
    std::vector<std::pair<int, int>> states;  // (current, next)
    Matrix trans;                             // (s,s') -> (s',s'') with prob P(s',s'')
    Vector p_inf;                             // stationary mass omega(s) P(s,s')

    int size() const { return static_cast<int>(states.size()); }
};

/// Jump-linear model of the TD(0) error recursion: per-pair matrices A_i and
/// drives b_i, the TD fixed point, and the mean matrix A_bar. The per-pair
/// transition matrices H_i = I + alpha A_i are derived on demand.
struct MjlsModel {
    std::vector<Matrix> a_mats;
    std::vector<Vector> b_vecs;
    Vector theta_pi;
    Matrix a_bar;
    int dim = 0;  // feature dimension d
};

struct MssCertificate {
    Matrix g_bar;                      // solves A_bar^T G + G A_bar = -I
    std::vector<Matrix> g_tilde;       // per pair, last pair pinned to zero
    std::vector<Matrix> s_mats;        // S_i = sum_j p_ij Gtilde_j
    std::vector<Matrix> x_mats;        // X_i = A_i^T Gbar + Gbar A_i + I/(p_inf_i N)
    std::vector<Matrix> m_mats;        // M_i = -A_i^T Gbar A_i - A_i^T S_i - S_i A_i
    std::vector<Matrix> m_tilde_mats;  // Mtilde_i = -A_i^T S_i A_i
    Vector alpha_bars;                 // per-pair quadratic-inequality bounds (+inf allowed)
    Vector g_bar_bounds;               // per-pair positivity bounds lmin(Gbar)/|lmin(Gtilde_i)|
    double alpha_max = 0.0;            // min over all finite per-pair bounds
};

struct MssReport {
    std::vector<double> sdp_margins;  // lambda_min(G_i - H_i^T (sum_j p_ij G_j) H_i)
    std::vector<double> g_margins;    // lambda_min(G_i)
    bool feasible = false;            // all margins strictly positive
    std::optional<double> oracle_rho;
    std::optional<std::vector<double>> mse_curve;
};

/// Requires the base chain irreducible and aperiodic. Pairs with zero
/// stationary mass are excluded so every p_inf entry is positive; the pair
/// chain is re-checked on the restricted support.
AugmentedChain build_augmented_chain(const PolicyInduced& pi_ind, const Tolerances& tol = {});

MjlsModel build_mjls(const AugmentedChain& chain, const PolicyInduced& pi_ind,
                     const FeatureMap& features, const Tolerances& tol = {});

MssCertificate build_mss_certificate(const MjlsModel& model, const AugmentedChain& chain,
                                     const Tolerances& tol = {});

/// Recomputes the per-pair bounds and the overall stepsize bound from the
/// stored certificate matrices.
std::pair<Vector, double> compute_alpha_bound(const MssCertificate& cert,
                                              const AugmentedChain& chain,
                                              const Tolerances& tol = {});

MssReport verify_mss_sdp(const MjlsModel& model, const MssCertificate& cert,
                         const AugmentedChain& chain, double alpha, const Tolerances& tol = {});

/// Spectral radius of the second-moment operator (blocks p_ji H_j (x) H_j);
/// mean square stability holds iff the value is below one. Independent of
/// the certificate path; guarded to N*d^2 <= 4000.
double mss_spectral_oracle(const MjlsModel& model, const AugmentedChain& chain, double alpha,
                           const Tolerances& tol = {});

/// Monte Carlo average of ||theta_k - theta_pi||^2 over `runs` TD(0)
/// trajectories with derived seeds seed+i, aggregated in index order.
std::vector<double> estimate_mse_curve(const MjlsModel& model, const PolicyInduced& pi_ind,
                                       const FeatureMap& features, double alpha, int runs,
                                       int steps, std::uint64_t seed, const Vector& theta0,
                                       const Tolerances& tol = {});

}  // namespace vbcert
