#pragma once

#include "vbcert/matrix.hpp"
#include "vbcert/tolerances.hpp"

namespace vbcert {

struct SymEigReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double residual = 0.0;  // max ||S v - lambda v||inf over the two extreme pairs
};

/// Full symmetric eigendecomposition, eigenvalues ascending, eigenvectors
/// stored as columns of `vectors`.
struct SymEigen {
    Vector values;
    Matrix vectors;
};

/// LU factorization with partial pivoting, kept together with the original
/// matrix so solves can run one iterative-refinement pass. Reused for
/// multi-right-hand-side solves.
class LuFactors {
public:
    explicit LuFactors(Matrix a, const Tolerances& tol = {});

    /// Substitution followed by one refinement pass against the original matrix.
    Vector solve(const Vector& b) const;

    std::size_t size() const { return lu_.rows(); }

private:
    Vector substitute(const Vector& b) const;

    Matrix original_;
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

Vector solve_linear(const Matrix& a, const Vector& b, const Tolerances& tol = {});

SymEigen sym_eigen(const Matrix& s, const Tolerances& tol = {});
SymEigReport sym_eig_extremes(const Matrix& s, const Tolerances& tol = {});

/// Solves A^T G + G A = -I via the d^2 x d^2 vectorized linear system and
/// symmetrizes the result.
Matrix solve_continuous_lyapunov(const Matrix& a, const Tolerances& tol = {});

/// lim ||A^k||inf^(1/k) by repeated squaring with renormalization, stopping
/// once two successive estimates agree to tol.spectral_gap.
double spectral_radius(const Matrix& a, const Tolerances& tol = {});

}  // namespace vbcert
