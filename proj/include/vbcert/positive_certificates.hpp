#pragma once

#include <optional>
#include <vector>

#include "vbcert/mdp.hpp"
#include "vbcert/value_algorithms.hpp"

namespace vbcert {

/// The closed-form certificate triple for the fixed-policy recursion:
/// xi = 1_n always; nu = omega and G = diag(nu(i)/xi(i)) when the chain is
/// irreducible (xi-only certificate otherwise).
struct VcCertificate {
    Vector xi;
    std::optional<Vector> nu;
    std::optional<Matrix> g;
    double gamma = 0.0;

    bool full() const { return nu.has_value() && g.has_value(); }
};

enum class ConditionKind { LpRight, LpLeft, Sdp, SwitchedLp };

struct ConditionReport {
    ConditionKind kind{};
    bool satisfied = false;  // margin >= -psd_slack
    bool strict = false;     // margin > 0, the strict-inequality variants
    double margin = 0.0;
};

enum class LyapunovKind { V1, V2, V3 };

struct LyapunovTrace {
    LyapunovKind kind{};
    std::vector<double> values;  // V(J_k - j_ref)
    double target = 0.0;         // gamma for V1/V2, gamma^2 for V3
    double worst_ratio = 0.0;    // max_k V_{k+1}/(target*V_k) over steps with V_k above the floor
    bool rate_ok = true;
};

VcCertificate construct_vc_certificate(const PolicyInduced& pi_ind);

/// Condition margin min_i(rate*xi(i) - (A xi)(i)).
ConditionReport verify_lp_right(const Matrix& a, const Vector& xi, double rate,
                                const Tolerances& tol = {});

/// Condition margin min_j(rate*nu(j) - (nu^T A)(j)).
ConditionReport verify_lp_left(const Matrix& a, const Vector& nu, double rate,
                               const Tolerances& tol = {});

/// Condition margin lambda_min(rate^2 G - A^T G A).
ConditionReport verify_sdp(const Matrix& a, const Matrix& g, double rate,
                           const Tolerances& tol = {});

/// Common l_inf certificate for the greedy recursion, decomposed over the
/// n*l action rows: margin min over (s,a) of gamma*(1 - sum_s' P((s,a),s')).
ConditionReport verify_switched_linf(const Mdp& mdp, const Tolerances& tol = {});

/// Verifiers for user-supplied common-certificate candidates on the switched
/// family. The LP conditions decompose exactly over action rows; the common-G
/// check has no row decomposition and enumerates selectors up to a guard.
ConditionReport verify_switched_lp_right(const Mdp& mdp, const Vector& xi, double rate,
                                         const Tolerances& tol = {});
ConditionReport verify_switched_lp_left(const Mdp& mdp, const Vector& nu, double rate,
                                        const Tolerances& tol = {});
ConditionReport verify_switched_sdp(const Mdp& mdp, const Matrix& g, double rate,
                                    const Tolerances& tol = {});

/// V(J_k - j_ref) along a trace. V2/V3 need the full certificate and apply
/// to linear (fixed-policy) traces; V1 applies to both those and VI.
LyapunovTrace lyapunov_trace(const Trace& trace, const Vector& j_ref, const VcCertificate& cert,
                             LyapunovKind kind, const Tolerances& tol = {});

}  // namespace vbcert
