#include "vbcert/value_algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "vbcert/errors.hpp"
#include "vbcert/numerics.hpp"
#include "vbcert/rng.hpp"

namespace vbcert {

FeatureMap validate_features(Matrix phi, int num_states, const Tolerances& tol) {
    if (phi.rows() != static_cast<std::size_t>(num_states))
        raise(ErrorCode::ShapeMismatch, "feature matrix has " + std::to_string(phi.rows()) +
                                            " rows, expected " + std::to_string(num_states));
    if (phi.cols() == 0 || phi.cols() > phi.rows())
        raise(ErrorCode::ShapeMismatch, "feature dimension must satisfy 1 <= d <= n");
    if (!all_finite(phi)) raise(ErrorCode::NonFinite, "feature matrix contains NaN/Inf");

    const Matrix gram = transpose(phi) * phi;
    const SymEigReport eig = sym_eig_extremes(gram, tol);
    const double sigma_min = std::sqrt(std::max(eig.lambda_min, 0.0));
    if (!(sigma_min > 1e-10))
        raise(ErrorCode::RankDeficientFeatures,
              "smallest feature singular value " + std::to_string(sigma_min) +
                  " indicates rank deficiency");
    return FeatureMap{std::move(phi)};
}

Trace run_vc(const PolicyInduced& pi_ind, Vector j0, int steps) {
    const std::size_t n = pi_ind.p_pi.rows();
    if (j0.size() != n) raise(ErrorCode::ShapeMismatch, "j0 length mismatch");
    Trace trace;
    trace.iterates.reserve(steps + 1);
    trace.iterates.push_back(std::move(j0));
    for (int t = 0; t < steps; ++t) {
        const Vector& j = trace.iterates.back();
        Vector next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += pi_ind.p_pi(i, k) * j[k];
            next[i] = pi_ind.gamma * acc + pi_ind.r_pi[i];
        }
        trace.iterates.push_back(std::move(next));
    }
    return trace;
}

Trace run_vi(const Mdp& mdp, Vector j0, int steps) {
    if (j0.size() != static_cast<std::size_t>(mdp.num_states))
        raise(ErrorCode::ShapeMismatch, "j0 length mismatch");
    Trace trace;
    trace.iterates.reserve(steps + 1);
    trace.switching.emplace();
    trace.switching->reserve(steps);
    trace.iterates.push_back(std::move(j0));
    for (int t = 0; t < steps; ++t) {
        BellmanResult step = bellman_optimality(mdp, trace.iterates.back());
        trace.iterates.push_back(std::move(step.values));
        trace.switching->push_back(std::move(step.selector));
    }
    return trace;
}

namespace {

// One step of J' = J* + gamma P_sel (J - J*) without forming P_sel.
Vector selector_step(const Mdp& mdp, const std::vector<int>& selector, const Vector& j_star,
                     const Vector& j) {
    const int n = mdp.num_states;
    Vector next(n);
    const Vector diff = j - j_star;
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += mdp.prob(s, selector[s], k) * diff[k];
        next[s] = j_star[s] + mdp.gamma * acc;
    }
    return next;
}

}  // namespace

SandwichTrace run_sandwich(const Mdp& mdp, const OptimalValue& opt, Vector j0, int steps) {
    SandwichTrace out;
    out.p_star_selector = bellman_optimality(mdp, opt.j_star).selector;
    out.j = run_vi(mdp, j0, steps);

    out.j_upper.reserve(steps + 1);
    out.j_lower.reserve(steps + 1);
    out.j_upper.push_back(out.j.iterates.front());
    out.j_lower.push_back(out.j.iterates.front());
    for (int t = 0; t < steps; ++t) {
        const std::vector<int>& sigma_t = (*out.j.switching)[t];
        out.j_upper.push_back(selector_step(mdp, sigma_t, opt.j_star, out.j_upper.back()));
        out.j_lower.push_back(selector_step(mdp, out.p_star_selector, opt.j_star, out.j_lower.back()));
    }
    return out;
}

namespace {

int sample_index(const Vector& weights, double u) {
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int>(i);
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive;  // u landed in the rounding sliver past the last mass
}

}  // namespace

Trace run_td0(const PolicyInduced& pi_ind, const FeatureMap& features, double alpha,
              Vector theta0, int steps, std::uint64_t seed, const Tolerances& tol) {
    const int n = static_cast<int>(pi_ind.p_pi.rows());
    const int d = features.dim();
    if (features.phi.rows() != static_cast<std::size_t>(n))
        raise(ErrorCode::ShapeMismatch, "feature rows do not match the chain size");
    if (theta0.size() != static_cast<std::size_t>(d))
        raise(ErrorCode::ShapeMismatch, "theta0 length mismatch");
    if (!(alpha > 0.0)) raise(ErrorCode::ShapeMismatch, "alpha must be positive");

    const ChainStructure cs = chain_structure(pi_ind.p_pi, tol);
    if (!cs.irreducible || !cs.aperiodic || !pi_ind.omega)
        raise(ErrorCode::NotErgodic, "TD(0) sampling needs an irreducible aperiodic chain");

    SplitMix64 rng(seed);
    Trace trace;
    trace.iterates.reserve(steps + 1);
    trace.visited.emplace();
    trace.visited->reserve(steps + 1);

    int state = sample_index(*pi_ind.omega, rng.next_double());
    trace.visited->push_back(state);
    trace.iterates.push_back(std::move(theta0));

    for (int t = 0; t < steps; ++t) {
        const int next = sample_index(pi_ind.p_pi.row(state), rng.next_double());
        const Vector& theta = trace.iterates.back();

        double td = -pi_ind.r_pi[state];
        for (int i = 0; i < d; ++i)
            td += (features.phi(state, i) - pi_ind.gamma * features.phi(next, i)) * theta[i];

        Vector updated(d);
        for (int i = 0; i < d; ++i) updated[i] = theta[i] - alpha * features.phi(state, i) * td;

        trace.iterates.push_back(std::move(updated));
        trace.visited->push_back(next);
        state = next;
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const Trace& trace, const std::string& value_label) {
    const std::size_t width = trace.iterates.empty() ? 0 : trace.iterates.front().size();
    out << "k";
    for (std::size_t i = 1; i <= width; ++i) out << "," << value_label << i;
    if (trace.switching)
        for (std::size_t i = 1; i <= trace.switching->front().size(); ++i) out << ",sigma" << i;
    if (trace.visited) out << ",s";
    out << "\n";

    char buf[32];
    for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
        out << k;
        for (double v : trace.iterates[k]) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << "," << buf;
        }
        if (trace.switching) {
            if (k < trace.switching->size())
                for (int a : (*trace.switching)[k]) out << "," << (a + 1);
            else
                for (std::size_t i = 0; i < trace.switching->front().size(); ++i) out << ",";
        }
        if (trace.visited) out << "," << ((*trace.visited)[k] + 1);
        out << "\n";
    }
}

}  // namespace vbcert
