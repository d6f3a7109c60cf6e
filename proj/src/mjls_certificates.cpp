#include "vbcert/mjls_certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vbcert/errors.hpp"
#include "vbcert/numerics.hpp"

namespace vbcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_chain_invariants(const AugmentedChain& chain, const Tolerances& tol) {
    const int n_pairs = chain.size();
    for (int i = 0; i < n_pairs; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_pairs; ++j) row += chain.trans(i, j);
        if (std::abs(row - 1.0) > tol.row_sum)
            raise(ErrorCode::NotErgodic, "pair-chain row " + std::to_string(i) + " sums to " +
                                             std::to_string(row));
    }
    const Vector stat = transpose(chain.trans) * chain.p_inf - chain.p_inf;
    if (inf_norm(stat) > tol.stationarity)
        raise(ErrorCode::NotErgodic, "pair-chain stationarity residual " +
                                         std::to_string(inf_norm(stat)) + " too large");
    double total = 0.0;
    for (double p : chain.p_inf) total += p;
    if (std::abs(total - 1.0) > tol.stationarity)
        raise(ErrorCode::NotErgodic,
              "pair masses sum to " + std::to_string(total) + " instead of 1");
}

}  // namespace

AugmentedChain build_augmented_chain(const PolicyInduced& pi_ind, const Tolerances& tol) {
    const int n = static_cast<int>(pi_ind.p_pi.rows());
    const ChainStructure cs = chain_structure(pi_ind.p_pi, tol);
    if (!cs.irreducible || !cs.aperiodic || !pi_ind.omega)
        raise(ErrorCode::NotErgodic, "augmented chain needs an irreducible aperiodic base chain");
    const Vector& omega = *pi_ind.omega;

    AugmentedChain chain;
    for (int s = 0; s < n; ++s) {
        for (int next = 0; next < n; ++next) {
            const double mass = omega[s] * pi_ind.p_pi(s, next);
            if (mass > tol.edge_threshold) {
                chain.states.emplace_back(s, next);
                chain.p_inf.push_back(mass);
            }
        }
    }

    const int n_pairs = chain.size();
    chain.trans = Matrix(n_pairs, n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const int mid = chain.states[i].second;
        for (int j = 0; j < n_pairs; ++j) {
            if (chain.states[j].first == mid)
                chain.trans(i, j) = pi_ind.p_pi(mid, chain.states[j].second);
        }
    }

    const ChainStructure pair_cs = chain_structure(chain.trans, tol);
    if (!pair_cs.irreducible || !pair_cs.aperiodic)
        raise(ErrorCode::NotErgodic, "pair chain is not ergodic on its support");
    check_chain_invariants(chain, tol);
    return chain;
}

MjlsModel build_mjls(const AugmentedChain& chain, const PolicyInduced& pi_ind,
                     const FeatureMap& features, const Tolerances& tol) {
    const int d = features.dim();
    const int n_pairs = chain.size();

    MjlsModel model;
    model.dim = d;
    model.a_mats.reserve(n_pairs);

    Matrix a_bar(d, d);
    Vector drive(d, 0.0);  // sum_i p_inf_i phi(s) R_pi(s)
    for (int i = 0; i < n_pairs; ++i) {
        const auto [s, next] = chain.states[i];
        const Vector phi_s = features.feature(s);
        const Vector phi_next = features.feature(next);
        const Matrix a_i = outer(phi_s, pi_ind.gamma * phi_next - phi_s);
        a_bar = a_bar + chain.p_inf[i] * a_i;
        drive = drive + (chain.p_inf[i] * pi_ind.r_pi[s]) * phi_s;
        model.a_mats.push_back(a_i);
    }
    model.a_bar = a_bar;

    // theta_pi solves A_bar theta + drive = 0 (the projected fixed point).
    try {
        model.theta_pi = solve_linear(a_bar, -1.0 * drive, tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularMatrix)
            raise(ErrorCode::SingularAbar, "mean matrix is singular; no unique TD fixed point");
        throw;
    }

    model.b_vecs.reserve(n_pairs);
    Vector b_mean(d, 0.0);
    for (int i = 0; i < n_pairs; ++i) {
        const auto [s, next] = chain.states[i];
        const Vector phi_s = features.feature(s);
        const Vector phi_next = features.feature(next);
        double corr = pi_ind.r_pi[s];
        for (int k = 0; k < d; ++k)
            corr -= (phi_s[k] - pi_ind.gamma * phi_next[k]) * model.theta_pi[k];
        const Vector b_i = corr * phi_s;
        b_mean = b_mean + chain.p_inf[i] * b_i;
        model.b_vecs.push_back(b_i);
    }
    if (inf_norm(b_mean) > tol.fixed_point)
        raise(ErrorCode::SingularAbar,
              "stationary drive residual " + std::to_string(inf_norm(b_mean)) +
                  " violates the fixed-point identity");
    return model;
}

MssCertificate build_mss_certificate(const MjlsModel& model, const AugmentedChain& chain,
                                     const Tolerances& tol) {
    const int n_pairs = chain.size();
    const int d = model.dim;

    MssCertificate cert;
    try {
        cert.g_bar = solve_continuous_lyapunov(model.a_bar, tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularMatrix)
            raise(ErrorCode::NotHurwitz, "Lyapunov system singular; mean matrix is not Hurwitz");
        throw;
    }
    if (!(sym_eig_extremes(cert.g_bar, tol).lambda_min > 0.0))
        raise(ErrorCode::NotHurwitz, "Lyapunov solution is not positive definite");

    // X_i = A_i^T Gbar + Gbar A_i + I/(p_inf_i N), kept exactly symmetric.
    cert.x_mats.reserve(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const Matrix cross = transpose(model.a_mats[i]) * cert.g_bar;
        Matrix x = cross + transpose(cross);
        for (int r = 0; r < d; ++r) x(r, r) += 1.0 / (chain.p_inf[i] * n_pairs);
        cert.x_mats.push_back(std::move(x));
    }

    // Gtilde_N = 0; the others solve (I - Phat) stacked entrywise, one
    // factorization shared across all matrix positions.
    cert.g_tilde.assign(n_pairs, Matrix(d, d));
    if (n_pairs > 1) {
        Matrix i_minus_phat(n_pairs - 1, n_pairs - 1);
        for (int i = 0; i + 1 < n_pairs; ++i)
            for (int j = 0; j + 1 < n_pairs; ++j)
                i_minus_phat(i, j) = (i == j ? 1.0 : 0.0) - chain.trans(i, j);
        const LuFactors lu(i_minus_phat, tol);

        for (int r = 0; r < d; ++r) {
            for (int c = r; c < d; ++c) {
                Vector rhs(n_pairs - 1);
                for (int i = 0; i + 1 < n_pairs; ++i) rhs[i] = cert.x_mats[i](r, c);
                const Vector sol = lu.solve(rhs);
                for (int i = 0; i + 1 < n_pairs; ++i) {
                    cert.g_tilde[i](r, c) = sol[i];
                    cert.g_tilde[i](c, r) = sol[i];
                }
            }
        }
    }

    cert.s_mats.reserve(n_pairs);
    cert.m_mats.reserve(n_pairs);
    cert.m_tilde_mats.reserve(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        Matrix s_i(d, d);
        for (int j = 0; j < n_pairs; ++j) {
            const double p = chain.trans(i, j);
            if (p != 0.0) s_i = s_i + p * cert.g_tilde[j];
        }
        const Matrix& a_i = model.a_mats[i];
        const Matrix a_t = transpose(a_i);
        const Matrix quad = symmetrized(a_t * (cert.g_bar * a_i));
        const Matrix cross = a_t * s_i;
        cert.m_mats.push_back(-1.0 * quad - (cross + transpose(cross)));
        cert.m_tilde_mats.push_back(-1.0 * symmetrized(a_t * (s_i * a_i)));
        cert.s_mats.push_back(std::move(s_i));
    }

    auto [alpha_bars, alpha_max] = compute_alpha_bound(cert, chain, tol);
    cert.alpha_bars = std::move(alpha_bars);
    cert.alpha_max = alpha_max;

    const double g_bar_min = sym_eig_extremes(cert.g_bar, tol).lambda_min;
    cert.g_bar_bounds.resize(n_pairs);
    for (int i = 0; i < n_pairs; ++i) {
        const double lt = sym_eig_extremes(cert.g_tilde[i], tol).lambda_min;
        cert.g_bar_bounds[i] = lt >= -tol.psd_classify ? kInf : g_bar_min / std::abs(lt);
    }
    return cert;
}

namespace {

// Positive root of c + b*alpha + a*alpha^2 = 0 with a < 0, c > 0, written in
// the cancellation-free form 2c / (-b + sqrt(b^2 - 4ac)).
double quadratic_bound(double lambda_m, double lambda_mt, double inv_pn) {
    const double disc = lambda_m * lambda_m - 4.0 * lambda_mt * inv_pn;
    return 2.0 * inv_pn / (-lambda_m + std::sqrt(disc));
}

}  // namespace

std::pair<Vector, double> compute_alpha_bound(const MssCertificate& cert,
                                              const AugmentedChain& chain,
                                              const Tolerances& tol) {
    const int n_pairs = chain.size();
    Vector alpha_bars(n_pairs, kInf);
    double alpha_max = kInf;

    const double g_bar_min = sym_eig_extremes(cert.g_bar, tol).lambda_min;

    for (int i = 0; i < n_pairs; ++i) {
        const double inv_pn = 1.0 / (chain.p_inf[i] * n_pairs);
        const double lm = sym_eig_extremes(cert.m_mats[i], tol).lambda_min;
        const double lmt = sym_eig_extremes(cert.m_tilde_mats[i], tol).lambda_min;

        double bound = kInf;
        if (lmt >= -tol.psd_classify) {
            bound = lm >= -tol.psd_classify ? kInf : inv_pn / std::abs(lm);
            // Near-zero negative lambda_min(Mtilde): evaluate the quadratic
            // root as well and keep the smaller, the branches agree in the limit.
            if (lmt < 0.0) bound = std::min(bound, quadratic_bound(lm, lmt, inv_pn));
        } else {
            bound = quadratic_bound(lm, lmt, inv_pn);
        }
        alpha_bars[i] = bound;
        if (std::isfinite(bound)) alpha_max = std::min(alpha_max, bound);

        const double lt = sym_eig_extremes(cert.g_tilde[i], tol).lambda_min;
        if (lt < -tol.psd_classify) alpha_max = std::min(alpha_max, g_bar_min / std::abs(lt));
    }
    return {std::move(alpha_bars), alpha_max};
}

MssReport verify_mss_sdp(const MjlsModel& model, const MssCertificate& cert,
                         const AugmentedChain& chain, double alpha, const Tolerances& tol) {
    if (!(alpha > 0.0)) raise(ErrorCode::ShapeMismatch, "alpha must be positive");
    const int n_pairs = chain.size();
    const int d = model.dim;

    MssReport report;
    report.sdp_margins.reserve(n_pairs);
    report.g_margins.reserve(n_pairs);

    for (int i = 0; i < n_pairs; ++i) {
        const Matrix g_i = cert.g_bar + alpha * cert.g_tilde[i];
        // sum_j p_ij G_j = Gbar + alpha S_i since rows of the pair chain sum to one.
        const Matrix mix = cert.g_bar + alpha * cert.s_mats[i];

        Matrix h_i = Matrix::identity(d) + alpha * model.a_mats[i];
        const Matrix lhs = g_i - transpose(h_i) * (mix * h_i);

        report.sdp_margins.push_back(sym_eig_extremes(lhs, tol).lambda_min);
        report.g_margins.push_back(sym_eig_extremes(g_i, tol).lambda_min);
    }

    report.feasible = true;
    for (int i = 0; i < n_pairs; ++i)
        if (!(report.sdp_margins[i] > tol.definite && report.g_margins[i] > tol.definite))
            report.feasible = false;
    return report;
}

double mss_spectral_oracle(const MjlsModel& model, const AugmentedChain& chain, double alpha,
                           const Tolerances& tol) {
    const int n_pairs = chain.size();
    const int d = model.dim;
    const std::size_t block = static_cast<std::size_t>(d) * d;
    const std::size_t dim = block * n_pairs;
    if (dim > 4000)
        raise(ErrorCode::TooLarge, "second-moment operator dimension " + std::to_string(dim) +
                                       " exceeds the 4000 guard");

    std::vector<Matrix> h(n_pairs);
    for (int j = 0; j < n_pairs; ++j)
        h[j] = Matrix::identity(d) + alpha * model.a_mats[j];

    // Block (i,j) = p_ji * (H_j kron H_j): mode-j second moments feed mode i.
    Matrix op(dim, dim);
    for (int i = 0; i < n_pairs; ++i) {
        for (int j = 0; j < n_pairs; ++j) {
            const double p = chain.trans(j, i);
            if (p == 0.0) continue;
            const Matrix& hj = h[j];
            for (int r1 = 0; r1 < d; ++r1)
                for (int r2 = 0; r2 < d; ++r2)
                    for (int c1 = 0; c1 < d; ++c1)
                        for (int c2 = 0; c2 < d; ++c2)
                            op(i * block + r1 * d + r2, j * block + c1 * d + c2) =
                                p * hj(r1, c1) * hj(r2, c2);
        }
    }
    return spectral_radius(op, tol);
}

std::vector<double> estimate_mse_curve(const MjlsModel& model, const PolicyInduced& pi_ind,
                                       const FeatureMap& features, double alpha, int runs,
                                       int steps, std::uint64_t seed, const Vector& theta0,
                                       const Tolerances& tol) {
    if (runs < 1) raise(ErrorCode::ShapeMismatch, "estimate_mse_curve needs runs >= 1");
    std::vector<double> curve(steps + 1, 0.0);
    for (int run = 0; run < runs; ++run) {
        const Trace trace =
            run_td0(pi_ind, features, alpha, theta0, steps, seed + static_cast<std::uint64_t>(run),
                    tol);
        for (int k = 0; k <= steps; ++k) {
            double sq = 0.0;
            for (int c = 0; c < model.dim; ++c) {
                const double diff = trace.iterates[k][c] - model.theta_pi[c];
                sq += diff * diff;
            }
            curve[k] += sq;
        }
    }
    const double inv = 1.0 / runs;
    for (double& v : curve) v *= inv;
    return curve;
}

}  // namespace vbcert
