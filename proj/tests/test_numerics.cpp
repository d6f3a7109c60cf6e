#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vbcert/errors.hpp"
#include "vbcert/numerics.hpp"

using namespace vbcert;

TEST_CASE("solve_linear identity") {
    const Vector x = solve_linear(Matrix::identity(3), {1.0, 2.0, 3.0});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
}

TEST_CASE("solve_linear 2x2 hand inverse") {
    const Matrix a = Matrix::from_rows({{0.55, -0.45}, {-0.45, 0.55}});
    const Vector x = solve_linear(a, {1.0, 0.0});
    CHECK(std::abs(x[0] - 5.5) < 1e-12);
    CHECK(std::abs(x[1] - 4.5) < 1e-12);
}

TEST_CASE("solve_linear rank-deficient input") {
    const Matrix a = Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
    bool thrown = false;
    try {
        solve_linear(a, {1.0, 0.0});
    } catch (const Error& e) {
        thrown = true;
        CHECK(e.code() == ErrorCode::SingularMatrix);
    }
    CHECK(thrown);
}

TEST_CASE("solve_linear residual bound on random systems") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SplitMix64 rng(seed * 7919 + 1);
        const std::size_t n = 2 + seed % 11;
        Matrix a(n, n);
        Vector b(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a(i, j) = 2.0 * rng.next_double() - 1.0;
            a(i, i) += static_cast<double>(n);  // diagonally dominant, well conditioned
            b[i] = 10.0 * (2.0 * rng.next_double() - 1.0);
        }
        const Vector x = solve_linear(a, b);
        CHECK(inf_norm(a * x - b) <= 1e-10 * (1.0 + inf_norm(b)));
    }
}

TEST_CASE("sym_eig_extremes on fixed spectra") {
    const SymEigReport diag = sym_eig_extremes(Matrix::diagonal({2.0, 3.0}));
    CHECK(diag.lambda_min == doctest::Approx(2.0));
    CHECK(diag.lambda_max == doctest::Approx(3.0));

    const SymEigReport swap = sym_eig_extremes(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
    CHECK(swap.lambda_min == doctest::Approx(-1.0));
    CHECK(swap.lambda_max == doctest::Approx(1.0));

    const SymEigReport omega = sym_eig_extremes(Matrix::diagonal({2.0 / 3.0, 1.0 / 3.0}));
    CHECK(omega.lambda_min == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("sym_eig_extremes rejects non-finite input") {
    Matrix bad = Matrix::identity(2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(sym_eig_extremes(bad), Error);
}

TEST_CASE("sym_eig_extremes residual bound on random symmetric matrices") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SplitMix64 rng(seed + 31);
        const std::size_t n = 2 + seed % 9;
        Matrix s(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const double v = 4.0 * rng.next_double() - 2.0;
                s(i, j) = v;
                s(j, i) = v;
            }
        const SymEigReport report = sym_eig_extremes(s);
        CHECK(report.lambda_min <= report.lambda_max);
        CHECK(report.residual <= 1e-9 * std::max(1.0, std::abs(report.lambda_max)));
    }
}

TEST_CASE("continuous Lyapunov scalar and diagonal cases") {
    const Matrix g1 = solve_continuous_lyapunov(Matrix::from_rows({{-1.0}}));
    CHECK(g1(0, 0) == doctest::Approx(0.5));

    const Matrix g2 = solve_continuous_lyapunov(Matrix::from_rows({{-0.1}}));
    CHECK(std::abs(g2(0, 0) - 5.0) < 1e-12);

    const Matrix g3 = solve_continuous_lyapunov(Matrix::diagonal({-1.0, -2.0}));
    CHECK(g3(0, 0) == doctest::Approx(0.5));
    CHECK(g3(1, 1) == doctest::Approx(0.25));
    CHECK(g3(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("continuous Lyapunov residual and symmetry") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SplitMix64 rng(seed + 100);
        const std::size_t d = 1 + seed % 4;
        Matrix a(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.next_double() - 0.5;
            a(i, i) -= 2.0;  // comfortably Hurwitz
        }
        const Matrix g = solve_continuous_lyapunov(a);
        CHECK(max_asymmetry(g) <= 1e-12);
        const Matrix residual = transpose(a) * g + g * a + Matrix::identity(d);
        CHECK(inf_norm(residual) <= 1e-9);
        CHECK(sym_eig_extremes(g).lambda_min > 0.0);
    }
}

TEST_CASE("Lyapunov solution sign tracks Hurwitz property") {
    CHECK(sym_eig_extremes(solve_continuous_lyapunov(Matrix::from_rows({{-0.3}}))).lambda_min > 0.0);
    CHECK(sym_eig_extremes(solve_continuous_lyapunov(Matrix::from_rows({{0.1}}))).lambda_min < 0.0);
    const Matrix stable = Matrix::from_rows({{-1.0, 1.0}, {0.0, -2.0}});
    CHECK(sym_eig_extremes(solve_continuous_lyapunov(stable)).lambda_min > 0.0);
    // Eigenvalues +1 and -1 make the vectorized system singular.
    CHECK_THROWS_AS(solve_continuous_lyapunov(Matrix::diagonal({1.0, -1.0})), Error);
}

TEST_CASE("spectral radius on fixed cases") {
    CHECK(std::abs(spectral_radius(Matrix::from_rows({{0.0, 1.0}, {0.25, 0.0}})) - 0.5) <= 0.5e-6);
    CHECK(spectral_radius(Matrix(3, 3, 0.0)) == 0.0);
    CHECK(spectral_radius(Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})) == 0.0);  // nilpotent

    const Matrix p = Matrix::from_rows({{0.3, 0.7}, {0.6, 0.4}});
    CHECK(std::abs(spectral_radius(0.9 * p) - 0.9) <= 0.9e-6);
}

TEST_CASE("spectral radius of discounted stochastic matrices equals gamma") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const double gamma = 0.2 + 0.79 * (seed % 5) / 4.0;
        const Mdp mdp = vbtest::random_mdp(seed + 500, 3 + seed % 6, 1, 0.9);
        const PolicyInduced ind = induce_policy(
            mdp, Policy::deterministic(mdp.num_states, 1, std::vector<int>(mdp.num_states, 0)));
        const double rho = spectral_radius(gamma * ind.p_pi);
        CHECK(std::abs(rho - gamma) <= 1e-6 * gamma);
    }
}

TEST_CASE("LuFactors reuses one factorization across right-hand sides") {
    const Matrix a = Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}});
    const LuFactors lu(a);
    for (const Vector& b : {Vector{1.0, 0.0}, Vector{0.0, 1.0}, Vector{2.0, -5.0}}) {
        const Vector x = lu.solve(b);
        CHECK(inf_norm(a * x - b) <= 1e-12 * (1.0 + inf_norm(b)));
    }
}
