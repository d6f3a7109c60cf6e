#include "vbcert/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vbcert/errors.hpp"

namespace vbcert {

namespace {

void require_finite(const Matrix& a, const char* what) {
    if (!all_finite(a)) raise(ErrorCode::NonFinite, std::string(what) + " contains NaN/Inf");
}

const char* error_name_impl(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::InvalidKernel: return "InvalidKernel";
        case ErrorCode::InvalidGamma: return "InvalidGamma";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::NotErgodic: return "NotErgodic";
        case ErrorCode::NonPositiveXi: return "NonPositiveXi";
        case ErrorCode::NonPositiveNu: return "NonPositiveNu";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::KindUnavailable: return "KindUnavailable";
        case ErrorCode::SingularAbar: return "SingularAbar";
        case ErrorCode::NotHurwitz: return "NotHurwitz";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::RankDeficientFeatures: return "RankDeficientFeatures";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "UnknownError";
}

}  // namespace

const char* error_name(ErrorCode code) { return error_name_impl(code); }

LuFactors::LuFactors(Matrix a, const Tolerances& tol) {
    if (!a.square()) raise(ErrorCode::ShapeMismatch, "LU factorization needs a square matrix");
    require_finite(a, "matrix");
    const std::size_t n = a.rows();
    const double pivot_floor = tol.pivot_rel * inf_norm(a);

    original_ = a;
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(best, k))) best = i;
        if (std::abs(a(best, k)) <= pivot_floor)  // <= so the zero matrix is caught
            raise(ErrorCode::SingularMatrix,
                  "pivot " + std::to_string(a(best, k)) + " below cutoff at column " +
                      std::to_string(k));
        if (best != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(best, j));
            std::swap(perm_[k], perm_[best]);
        }
        const double piv = a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / piv;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    lu_ = std::move(a);
}

Vector LuFactors::substitute(const Vector& b) const {
    const std::size_t n = lu_.rows();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
        y[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * y[j];
        y[ii] = acc / lu_(ii, ii);
    }
    return y;
}

Vector LuFactors::solve(const Vector& b) const {
    if (b.size() != lu_.rows()) raise(ErrorCode::ShapeMismatch, "right-hand side length mismatch");
    if (!all_finite(b)) raise(ErrorCode::NonFinite, "right-hand side contains NaN/Inf");
    Vector x = substitute(b);
    // One refinement pass against the stored original keeps the residual near
    // machine level even for moderately conditioned systems.
    Vector r = b - original_ * x;
    Vector dx = substitute(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    return x;
}

Vector solve_linear(const Matrix& a, const Vector& b, const Tolerances& tol) {
    if (!a.square() || a.rows() != b.size())
        raise(ErrorCode::ShapeMismatch, "solve_linear expects square a with matching b");
    return LuFactors(a, tol).solve(b);
}

namespace {

// Cyclic Jacobi rotations; plenty for the symmetric desk-scale matrices here.
SymEigen jacobi_eigen(Matrix s) {
    const std::size_t n = s.rows();
    Matrix v = Matrix::identity(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(s(p, q)));
        if (off <= 1e-15 * std::max(1.0, max_abs(s))) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double app = s(p, p), aqq = s(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    SymEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = s(i, i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
    Vector sorted(n);
    Matrix vec(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = out.values[order[i]];
        for (std::size_t k = 0; k < n; ++k) vec(k, i) = v(k, order[i]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vec);
    return out;
}

}  // namespace

SymEigen sym_eigen(const Matrix& s, const Tolerances&) {
    if (!s.square()) raise(ErrorCode::ShapeMismatch, "eigendecomposition needs a square matrix");
    require_finite(s, "matrix");
    return jacobi_eigen(symmetrized(s));
}

SymEigReport sym_eig_extremes(const Matrix& s, const Tolerances& tol) {
    const SymEigen eig = sym_eigen(s, tol);
    const Matrix sym = symmetrized(s);
    const std::size_t n = sym.rows();

    SymEigReport report;
    report.lambda_min = eig.values.front();
    report.lambda_max = eig.values.back();

    double residual = 0.0;
    for (std::size_t which : {std::size_t{0}, n - 1}) {
        Vector v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = eig.vectors(k, which);
        const Vector sv = sym * v;
        for (std::size_t k = 0; k < n; ++k)
            residual = std::max(residual, std::abs(sv[k] - eig.values[which] * v[k]));
    }
    report.residual = residual;
    return report;
}

Matrix solve_continuous_lyapunov(const Matrix& a, const Tolerances& tol) {
    if (!a.square()) raise(ErrorCode::ShapeMismatch, "Lyapunov equation needs a square matrix");
    require_finite(a, "matrix");
    const std::size_t d = a.rows();

    // Row (i,j) of the vectorized system encodes (A^T G + G A)(i,j) = -delta_ij
    // with unknowns G(k,l):  A(k,i) G(k,j) + G(i,l) A(l,j).
    Matrix system(d * d, d * d);
    Vector rhs(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t row = i * d + j;
            for (std::size_t k = 0; k < d; ++k) system(row, k * d + j) += a(k, i);
            for (std::size_t l = 0; l < d; ++l) system(row, i * d + l) += a(l, j);
            rhs[row] = (i == j) ? -1.0 : 0.0;
        }
    }
    const Vector g_flat = solve_linear(system, rhs, tol);
    Matrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = g_flat[i * d + j];
    return symmetrized(g);
}

double spectral_radius(const Matrix& a, const Tolerances& tol) {
    if (!a.square()) raise(ErrorCode::ShapeMismatch, "spectral radius needs a square matrix");
    require_finite(a, "matrix");

    Matrix b = a;
    double log_scale = 0.0;  // b == A^m / exp(log_scale)
    double m = 1.0;
    double previous = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 200; ++iter) {
        const double norm = inf_norm(b);
        if (norm == 0.0) return 0.0;  // nilpotent
        const double estimate = std::exp((std::log(norm) + log_scale) / m);
        if (std::abs(estimate - previous) <= tol.spectral_gap * std::max(1.0, estimate))
            return estimate;
        previous = estimate;

        const double inv = 1.0 / norm;
        Matrix c = b;
        for (double& v : c.data()) v *= inv;
        b = c * c;
        log_scale = 2.0 * (log_scale + std::log(norm));
        m *= 2.0;
    }
    raise(ErrorCode::NonConvergence, "spectral radius estimates did not settle in 200 squarings");
}

}  // namespace vbcert
