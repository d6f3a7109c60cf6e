#pragma once

namespace vbcert {

/// Central numeric thresholds. The defaults below are the values pinned by
/// the test suite; library callers may pass an adjusted copy where a function
/// accepts one.
struct Tolerances {
    double solve_residual = 1e-10;  // linear solve: ||Ax-b||inf <= solve_residual*(1+||b||inf)
    double pivot_rel = 1e-13;       // LU pivot cutoff, relative to ||A||inf
    double symmetry = 1e-10;        // accepted relative asymmetry before symmetrizing
    double psd_slack = 1e-9;        // condition margins at/above -psd_slack count as satisfied
    double psd_classify = 1e-12;    // lambda_min >= -psd_classify is treated as PSD
    double spectral_gap = 1e-8;     // stop when successive spectral-radius estimates agree this well
    double row_sum = 1e-12;         // allowed stochastic row-sum deviation
    double edge_threshold = 1e-14;  // entries above this are edges of the support graph
    double stationarity = 1e-10;    // ||omega^T P - omega^T||inf check
    double definite = 1e-12;        // strict positive-definiteness floor for supplied G
    double value_floor = 1e-13;     // Lyapunov ratio denominators below this are skipped
    double rate_slack = 1e-9;       // rate_ok iff worst_ratio <= 1 + rate_slack
    double fixed_point = 1e-9;      // Bellman residual acceptance
};

}  // namespace vbcert
