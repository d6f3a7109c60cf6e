#include "vbcert/positive_certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vbcert/errors.hpp"
#include "vbcert/numerics.hpp"

namespace vbcert {

namespace {

ConditionReport make_report(ConditionKind kind, double margin, const Tolerances& tol) {
    ConditionReport r;
    r.kind = kind;
    r.margin = margin;
    r.satisfied = margin >= -tol.psd_slack;
    r.strict = margin > 0.0;
    return r;
}

void require_positive(const Vector& v, ErrorCode code, const char* what) {
    for (double x : v)
        if (!(x > 0.0)) raise(code, std::string(what) + " must be entrywise positive");
}

}  // namespace

VcCertificate construct_vc_certificate(const PolicyInduced& pi_ind) {
    VcCertificate cert;
    cert.gamma = pi_ind.gamma;
    cert.xi.assign(pi_ind.p_pi.rows(), 1.0);
    if (pi_ind.omega) {
        // With xi = 1_n the diagonal weights nu(i)/xi(i) reduce to omega.
        cert.nu = *pi_ind.omega;
        cert.g = Matrix::diagonal(*pi_ind.omega);
    }
    return cert;
}

ConditionReport verify_lp_right(const Matrix& a, const Vector& xi, double rate,
                                const Tolerances& tol) {
    if (!a.square() || a.rows() != xi.size())
        raise(ErrorCode::ShapeMismatch, "verify_lp_right dimension mismatch");
    require_positive(xi, ErrorCode::NonPositiveXi, "xi");

    const Vector ax = a * xi;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xi.size(); ++i)
        margin = std::min(margin, rate * xi[i] - ax[i]);
    return make_report(ConditionKind::LpRight, margin, tol);
}

ConditionReport verify_lp_left(const Matrix& a, const Vector& nu, double rate,
                               const Tolerances& tol) {
    if (!a.square() || a.rows() != nu.size())
        raise(ErrorCode::ShapeMismatch, "verify_lp_left dimension mismatch");
    require_positive(nu, ErrorCode::NonPositiveNu, "nu");

    const Vector nu_a = transpose(a) * nu;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nu.size(); ++j)
        margin = std::min(margin, rate * nu[j] - nu_a[j]);
    return make_report(ConditionKind::LpLeft, margin, tol);
}

ConditionReport verify_sdp(const Matrix& a, const Matrix& g, double rate, const Tolerances& tol) {
    if (!a.square() || !g.square() || a.rows() != g.rows())
        raise(ErrorCode::ShapeMismatch, "verify_sdp dimension mismatch");
    const Matrix g_sym = symmetrized(g);
    if (sym_eig_extremes(g_sym, tol).lambda_min <= tol.definite)
        raise(ErrorCode::NotPositiveDefinite, "candidate G is not positive definite");

    const Matrix lhs = (rate * rate) * g_sym - transpose(a) * (g_sym * a);
    const double margin = sym_eig_extremes(lhs, tol).lambda_min;
    return make_report(ConditionKind::Sdp, margin, tol);
}

ConditionReport verify_switched_linf(const Mdp& mdp, const Tolerances& tol) {
    // xi = 1_n decomposes the switched LP over the n*l action rows.
    double margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
            double row_sum = 0.0;
            for (int next = 0; next < mdp.num_states; ++next) row_sum += mdp.prob(s, a, next);
            margin = std::min(margin, mdp.gamma * (1.0 - row_sum));
        }
    }
    return make_report(ConditionKind::SwitchedLp, margin, tol);
}

ConditionReport verify_switched_lp_right(const Mdp& mdp, const Vector& xi, double rate,
                                         const Tolerances& tol) {
    if (xi.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ShapeMismatch, "xi length mismatch");
    require_positive(xi, ErrorCode::NonPositiveXi, "xi");

    // Exact: the worst selector maximizes each action row independently.
    double margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
            double row = 0.0;
            for (int next = 0; next < mdp.num_states; ++next)
                row += mdp.prob(s, a, next) * xi[next];
            margin = std::min(margin, rate * xi[s] - mdp.gamma * row);
        }
    }
    return make_report(ConditionKind::SwitchedLp, margin, tol);
}

ConditionReport verify_switched_lp_left(const Mdp& mdp, const Vector& nu, double rate,
                                        const Tolerances& tol) {
    if (nu.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ShapeMismatch, "nu length mismatch");
    require_positive(nu, ErrorCode::NonPositiveNu, "nu");

    // Column j of nu^T A_m is maximized per state by the worst action, so the
    // check is exact without enumerating selectors.
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < mdp.num_states; ++j) {
        double worst_col = 0.0;
        for (int s = 0; s < mdp.num_states; ++s) {
            double best = 0.0;
            for (int a = 0; a < mdp.num_actions; ++a) best = std::max(best, mdp.prob(s, a, j));
            worst_col += nu[s] * best;
        }
        margin = std::min(margin, rate * nu[j] - mdp.gamma * worst_col);
    }
    return make_report(ConditionKind::SwitchedLp, margin, tol);
}

ConditionReport verify_switched_sdp(const Mdp& mdp, const Matrix& g, double rate,
                                    const Tolerances& tol) {
    const Matrix g_sym = symmetrized(g);
    if (sym_eig_extremes(g_sym, tol).lambda_min <= tol.definite)
        raise(ErrorCode::NotPositiveDefinite, "candidate G is not positive definite");

    // The quadratic condition does not decompose over action rows; enumerate
    // selectors at desk scale only.
    double count = 1.0;
    for (int s = 0; s < mdp.num_states; ++s) count *= mdp.num_actions;
    if (count > 4096.0)
        raise(ErrorCode::TooLarge, "selector family too large to enumerate (limit 4096)");

    const int n = mdp.num_states;
    std::vector<int> selector(n, 0);
    double margin = std::numeric_limits<double>::infinity();
    while (true) {
        Matrix a_m(n, n);
        for (int s = 0; s < n; ++s)
            for (int next = 0; next < n; ++next)
                a_m(s, next) = mdp.gamma * mdp.prob(s, selector[s], next);
        const Matrix lhs = (rate * rate) * g_sym - transpose(a_m) * (g_sym * a_m);
        margin = std::min(margin, sym_eig_extremes(lhs, tol).lambda_min);

        int pos = 0;
        while (pos < n && ++selector[pos] == mdp.num_actions) selector[pos++] = 0;
        if (pos == n) break;
    }
    return make_report(ConditionKind::Sdp, margin, tol);
}

LyapunovTrace lyapunov_trace(const Trace& trace, const Vector& j_ref, const VcCertificate& cert,
                             LyapunovKind kind, const Tolerances& tol) {
    if ((kind == LyapunovKind::V2 && !cert.nu) || (kind == LyapunovKind::V3 && !cert.g))
        raise(ErrorCode::KindUnavailable,
              "certificate lacks nu/G (reducible chain); only V1 is available");

    LyapunovTrace out;
    out.kind = kind;
    out.target = kind == LyapunovKind::V3 ? cert.gamma * cert.gamma : cert.gamma;

    auto value = [&](const Vector& zeta) {
        switch (kind) {
            case LyapunovKind::V1:
                return inf_norm(zeta);
            case LyapunovKind::V2:
                return std::abs(dot(*cert.nu, zeta));
            case LyapunovKind::V3: {
                const Vector gz = *cert.g * zeta;
                return dot(zeta, gz);
            }
        }
        return 0.0;
    };

    out.values.reserve(trace.iterates.size());
    for (const Vector& j : trace.iterates) out.values.push_back(value(j - j_ref));

    out.worst_ratio = 0.0;
    for (std::size_t k = 0; k + 1 < out.values.size(); ++k) {
        if (out.values[k] <= tol.value_floor) continue;
        out.worst_ratio = std::max(out.worst_ratio, out.values[k + 1] / (out.target * out.values[k]));
    }
    out.rate_ok = out.worst_ratio <= 1.0 + tol.rate_slack;
    return out;
}

}  // namespace vbcert
