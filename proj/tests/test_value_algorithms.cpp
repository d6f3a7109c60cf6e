#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "support.hpp"
#include "vbcert/errors.hpp"
#include "vbcert/value_algorithms.hpp"

using namespace vbcert;

TEST_CASE("run_vc stays at the fixed point") {
    const PolicyInduced ind = vbtest::uniform_two_state(0.9);
    const Trace trace = run_vc(ind, ind.j_pi, 20);
    for (const Vector& j : trace.iterates) CHECK(inf_norm(j - ind.j_pi) <= 1e-12);
}

TEST_CASE("run_vc reproduces two hand-computed steps") {
    const PolicyInduced ind = vbtest::uniform_two_state(0.9);
    const Trace trace = run_vc(ind, {0.0, 0.0}, 2);
    CHECK(trace.iterates[1][0] == doctest::Approx(1.0));
    CHECK(trace.iterates[1][1] == doctest::Approx(0.0));
    CHECK(std::abs(trace.iterates[2][0] - 1.45) < 1e-14);
    CHECK(std::abs(trace.iterates[2][1] - 0.45) < 1e-14);
}

TEST_CASE("run_vc zero-reward decay envelope") {
    const PolicyInduced err = vbtest::error_system(vbtest::uniform_two_state(0.9));
    const Trace trace = run_vc(err, {2.0, -1.0}, 60);
    double envelope = inf_norm(trace.iterates.front());
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        envelope *= 0.9;
        CHECK(inf_norm(trace.iterates[k]) <= envelope * (1.0 + 1e-12));
    }
}

TEST_CASE("run_vc steps satisfy the error recursion to machine residual") {
    const Mdp mdp = vbtest::random_mdp(42, 6, 3, 0.9);
    const PolicyInduced ind = induce_policy(mdp, vbtest::random_policy(43, mdp));
    const Trace trace = run_vc(ind, Vector(6, 0.0), 50);
    const double scale = inf_norm(ind.j_pi) + 1.0;
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k) {
        const Vector zeta = trace.iterates[k] - ind.j_pi;
        const Vector zeta_next = trace.iterates[k + 1] - ind.j_pi;
        const Vector expected = ind.gamma * (ind.p_pi * zeta);
        CHECK(inf_norm(zeta_next - expected) <= 1e-12 * scale);
    }
}

TEST_CASE("run_vi stays at the optimum and keeps the selector constant") {
    const Mdp mdp = vbtest::random_mdp(7, 5, 3, 0.9);
    const OptimalValue opt = optimal_value(mdp);
    const Trace trace = run_vi(mdp, opt.j_star, 10);
    REQUIRE(trace.switching.has_value());
    for (const Vector& j : trace.iterates) CHECK(inf_norm(j - opt.j_star) <= 1e-9);
    for (const auto& sigma : *trace.switching) CHECK(sigma == trace.switching->front());
}

TEST_CASE("run_vi on a single-action MDP equals run_vc bitwise") {
    const Mdp mdp = vbtest::random_mdp(8, 5, 1, 0.85);
    const PolicyInduced ind =
        induce_policy(mdp, Policy::deterministic(5, 1, std::vector<int>(5, 0)));
    const Vector j0 = {1.0, -1.0, 0.5, 2.0, 0.0};
    const Trace vi = run_vi(mdp, j0, 30);
    const Trace vc = run_vc(ind, j0, 30);
    for (std::size_t k = 0; k < vi.iterates.size(); ++k)
        for (int s = 0; s < 5; ++s) CHECK(vi.iterates[k][s] == vc.iterates[k][s]);
}

TEST_CASE("run_vi contraction envelope on a seeded instance") {
    const Mdp mdp = vbtest::random_mdp(9, 6, 3, 0.9);
    const OptimalValue opt = optimal_value(mdp);
    const Trace trace = run_vi(mdp, Vector(6, 0.0), 80);
    const double c0 = inf_norm(trace.iterates.front() - opt.j_star);
    double envelope = c0;
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        envelope *= 0.9;
        CHECK(inf_norm(trace.iterates[k] - opt.j_star) <= envelope * (1.0 + 1e-9));
    }
}

TEST_CASE("run_vi is monotone when started below") {
    const Mdp mdp = vbtest::random_mdp(10, 5, 3, 0.9);  // rewards in [0,1], so T(0) >= 0
    const Trace trace = run_vi(mdp, Vector(5, 0.0), 40);
    for (std::size_t k = 0; k + 1 < trace.iterates.size(); ++k)
        for (int s = 0; s < 5; ++s)
            CHECK(trace.iterates[k][s] <= trace.iterates[k + 1][s] + 1e-12);
}

TEST_CASE("run_sandwich is constant at the optimum") {
    const Mdp mdp = vbtest::random_mdp(14, 4, 2, 0.9);
    const OptimalValue opt = optimal_value(mdp);
    const SandwichTrace sw = run_sandwich(mdp, opt, opt.j_star, 15);
    for (std::size_t k = 0; k < sw.j.iterates.size(); ++k) {
        CHECK(inf_norm(sw.j.iterates[k] - opt.j_star) <= 1e-9);
        CHECK(inf_norm(sw.j_upper[k] - opt.j_star) <= 1e-9);
        CHECK(inf_norm(sw.j_lower[k] - opt.j_star) <= 1e-9);
    }
}

TEST_CASE("run_sandwich bounds hold and match a direct recomputation") {
    const Mdp mdp = vbtest::random_mdp(15, 6, 3, 0.9);
    const OptimalValue opt = optimal_value(mdp);
    const Vector j0(6, 0.0);
    const SandwichTrace sw = run_sandwich(mdp, opt, j0, 50);

    // Containment with slack.
    for (std::size_t k = 0; k < sw.j.iterates.size(); ++k) {
        for (int s = 0; s < 6; ++s) {
            CHECK(sw.j_lower[k][s] - opt.j_star[s] <= sw.j.iterates[k][s] - opt.j_star[s] + 1e-9);
            CHECK(sw.j.iterates[k][s] - opt.j_star[s] <= sw.j_upper[k][s] - opt.j_star[s] + 1e-9);
        }
    }

    // Recompute both bounding recursions directly from the recorded switching.
    Vector upper = j0, lower = j0;
    for (std::size_t t = 0; t + 1 < sw.j.iterates.size(); ++t) {
        const std::vector<int>& sigma = (*sw.j.switching)[t];
        Vector next_u(6), next_l(6);
        for (int s = 0; s < 6; ++s) {
            double acc_u = 0.0, acc_l = 0.0;
            for (int j = 0; j < 6; ++j) {
                acc_u += mdp.prob(s, sigma[s], j) * (upper[j] - opt.j_star[j]);
                acc_l += mdp.prob(s, sw.p_star_selector[s], j) * (lower[j] - opt.j_star[j]);
            }
            next_u[s] = opt.j_star[s] + mdp.gamma * acc_u;
            next_l[s] = opt.j_star[s] + mdp.gamma * acc_l;
        }
        upper = std::move(next_u);
        lower = std::move(next_l);
        CHECK(inf_norm(upper - sw.j_upper[t + 1]) <= 1e-12);
        CHECK(inf_norm(lower - sw.j_lower[t + 1]) <= 1e-12);
    }
}

TEST_CASE("run_sandwich with zero rewards pins everything to zero") {
    Mdp mdp = vbtest::random_mdp(16, 4, 2, 0.9);
    for (double& r : mdp.rewards) r = 0.0;
    const OptimalValue opt = optimal_value(mdp);
    CHECK(inf_norm(opt.j_star) <= 1e-12);
    const SandwichTrace sw = run_sandwich(mdp, opt, {1.0, 0.5, 2.0, 0.25}, 40);
    for (std::size_t k = 0; k < sw.j.iterates.size(); ++k) {
        for (int s = 0; s < 4; ++s) {
            CHECK(sw.j_lower[k][s] <= sw.j.iterates[k][s] + 1e-9);
            CHECK(sw.j.iterates[k][s] <= sw.j_upper[k][s] + 1e-9);
        }
    }
}

TEST_CASE("validate_features accepts full rank and rejects rank deficiency") {
    CHECK_NOTHROW(validate_features(Matrix(3, 1, 1.0), 3));
    bool thrown = false;
    try {
        validate_features(Matrix(2, 2, 1.0), 2);
    } catch (const Error& e) {
        thrown = true;
        CHECK(e.code() == ErrorCode::RankDeficientFeatures);
    }
    CHECK(thrown);
}

TEST_CASE("run_td0 with zero rewards and zero start stays at zero") {
    const PolicyInduced ind = vbtest::uniform_two_state(0.9, {0.0, 0.0});
    const FeatureMap features = vbtest::constant_features(2);
    const Trace trace = run_td0(ind, features, 19.0, {0.0}, 500, 3);
    for (const Vector& theta : trace.iterates) CHECK(theta[0] == 0.0);
}

TEST_CASE("run_td0 scalar stepsize regimes") {
    const PolicyInduced ind = vbtest::uniform_two_state(0.9);
    const FeatureMap features = vbtest::constant_features(2);

    const Trace stable = run_td0(ind, features, 19.0, {0.0}, 100000, 7);
    double worst = 0.0;
    for (const Vector& theta : stable.iterates) worst = std::max(worst, std::abs(theta[0]));
    CHECK(worst < 1e6);  // |1 - 0.1*19| = 0.9 < 1 keeps the recursion bounded

    const Trace divergent = run_td0(ind, features, 21.0, {0.0}, 400, 7);
    double peak = 0.0;
    for (const Vector& theta : divergent.iterates) peak = std::max(peak, std::abs(theta[0]));
    CHECK(peak > 1e6);  // |1 - 0.1*21| = 1.1 > 1
}

TEST_CASE("run_td0 is bitwise reproducible for a fixed seed") {
    const Mdp mdp = vbtest::random_mdp(17, 5, 2, 0.9);
    const PolicyInduced ind = induce_policy(mdp, vbtest::random_policy(18, mdp));
    const FeatureMap features = validate_features(vbtest::random_features(19, 5, 2), 5);
    const Trace a = run_td0(ind, features, 0.05, {0.1, -0.2}, 2000, 99);
    const Trace b = run_td0(ind, features, 0.05, {0.1, -0.2}, 2000, 99);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (std::size_t k = 0; k < a.iterates.size(); ++k)
        CHECK(std::memcmp(a.iterates[k].data(), b.iterates[k].data(),
                          a.iterates[k].size() * sizeof(double)) == 0);
    CHECK(*a.visited == *b.visited);
}

TEST_CASE("run_td0 rejects periodic chains") {
    const PolicyInduced ind =
        vbtest::induced_from_kernel(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}), {1.0, 0.0}, 0.9);
    const FeatureMap features = vbtest::constant_features(2);
    bool thrown = false;
    try {
        run_td0(ind, features, 1.0, {0.0}, 10, 0);
    } catch (const Error& e) {
        thrown = true;
        CHECK(e.code() == ErrorCode::NotErgodic);
    }
    CHECK(thrown);
}

TEST_CASE("trace CSV layout") {
    const Mdp mdp = vbtest::random_mdp(20, 2, 2, 0.9);
    Trace trace = run_vi(mdp, Vector(2, 0.0), 2);
    std::ostringstream out;
    write_trace_csv(out, trace, "J");
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "k,J1,J2,sigma1,sigma2");
    std::string row;
    int count = 0;
    while (std::getline(lines, row)) ++count;
    CHECK(count == 3);

    // Sampled traces carry the visited-state column.
    const PolicyInduced ind = vbtest::uniform_two_state(0.9);
    const Trace td = run_td0(ind, vbtest::constant_features(2), 1.0, {0.0}, 3, 5);
    std::ostringstream td_out;
    write_trace_csv(td_out, td, "theta");
    std::string td_header;
    std::istringstream td_lines(td_out.str());
    std::getline(td_lines, td_header);
    CHECK(td_header == "k,theta1,s");
}
