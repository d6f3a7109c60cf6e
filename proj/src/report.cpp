#include "vbcert/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "vbcert/errors.hpp"
#include "vbcert/json_io.hpp"
#include "vbcert/mjls_certificates.hpp"
#include "vbcert/numerics.hpp"
#include "vbcert/positive_certificates.hpp"
#include "vbcert/value_algorithms.hpp"

namespace vbcert {

using nlohmann::json;

namespace {

class PhaseTimer {
public:
    void start() { last_ = std::chrono::steady_clock::now(); }
    void record(json& timings, const char* phase) {
        const auto now = std::chrono::steady_clock::now();
        timings[phase] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

const char* kind_name(ConditionKind kind) {
    switch (kind) {
        case ConditionKind::LpRight: return "lp_right";
        case ConditionKind::LpLeft: return "lp_left";
        case ConditionKind::Sdp: return "sdp";
        case ConditionKind::SwitchedLp: return "switched_lp";
    }
    return "unknown";
}

const char* kind_name(LyapunovKind kind) {
    switch (kind) {
        case LyapunovKind::V1: return "V1";
        case LyapunovKind::V2: return "V2";
        case LyapunovKind::V3: return "V3";
    }
    return "unknown";
}

json condition_json(const ConditionReport& report) {
    return json{{"kind", kind_name(report.kind)},
                {"margin", report.margin},
                {"satisfied", report.satisfied},
                {"strict", report.strict}};
}

json trace_json(const LyapunovTrace& trace) {
    return json{{"kind", kind_name(trace.kind)}, {"available", true},
                {"target", trace.target},       {"worst_ratio", trace.worst_ratio},
                {"rate_ok", trace.rate_ok},     {"values", trace.values}};
}

json unavailable_trace_json(LyapunovKind kind) {
    return json{{"kind", kind_name(kind)}, {"available", false}, {"error", "KindUnavailable"}};
}

json matrix_json(const Matrix& m) { return json(m.data()); }  // row-major

json certificate_json(const VcCertificate& cert) {
    json out{{"xi", cert.xi}, {"gamma", cert.gamma}};
    if (cert.nu) out["nu"] = *cert.nu;
    if (cert.g) {
        Vector diag(cert.g->rows());
        for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = (*cert.g)(i, i);
        out["g_diag"] = diag;
    }
    return out;
}

void write_report(const json& report, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::ParseError, "cannot write \"" + path + "\"");
    out << report.dump(2) << "\n";
}

void dump_trace_csv(const std::string& out_path, const std::string& suffix, const Trace& trace,
                    const std::string& label) {
    std::string path = out_path;
    const std::size_t dot = path.rfind('.');
    if (dot != std::string::npos && path.find('/', dot) == std::string::npos)
        path.resize(dot);
    path += suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::ParseError, "cannot write \"" + path + "\"");
    write_trace_csv(out, trace, label);
}

void attach_timings(json& report, json timings, bool include) {
    if (include) report["timings"] = std::move(timings);
}

}  // namespace

json cmd_analyze_vc(const VcOptions& options) {
    PhaseTimer timer;
    json timings;
    timer.start();

    if (options.steps < 1) raise(ErrorCode::ParseError, "--k must be at least 1");
    const Mdp mdp = validate_mdp(parse_mdp_json(load_json_file(options.mdp_path)));
    const Policy policy = validate_policy(mdp, parse_policy_json(load_json_file(options.policy_path), mdp));
    Vector j0(mdp.num_states, 0.0);
    if (!options.j0_path.empty())
        j0 = parse_vector_json(load_json_file(options.j0_path), mdp.num_states);
    timer.record(timings, "parse");

    const PolicyInduced ind = induce_policy(mdp, policy);
    const VcCertificate cert = construct_vc_certificate(ind);
    timer.record(timings, "certificate");

    const Matrix a_pi = mdp.gamma * ind.p_pi;
    json conditions = json::array();
    conditions.push_back(condition_json(verify_lp_right(a_pi, cert.xi, mdp.gamma)));
    if (cert.full()) {
        conditions.push_back(condition_json(verify_lp_left(a_pi, *cert.nu, mdp.gamma)));
        conditions.push_back(condition_json(verify_sdp(a_pi, *cert.g, mdp.gamma)));
    }
    timer.record(timings, "verify");

    const Trace trace = run_vc(ind, j0, options.steps);
    json traces = json::array();
    bool rates_ok = true;
    for (LyapunovKind kind : {LyapunovKind::V1, LyapunovKind::V2, LyapunovKind::V3}) {
        try {
            const LyapunovTrace lt = lyapunov_trace(trace, ind.j_pi, cert, kind);
            rates_ok = rates_ok && lt.rate_ok;
            traces.push_back(trace_json(lt));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::KindUnavailable) throw;
            traces.push_back(unavailable_trace_json(kind));
        }
    }
    timer.record(timings, "run");

    bool conditions_ok = true;
    for (const json& c : conditions) conditions_ok = conditions_ok && c["satisfied"].get<bool>();
    (void)rates_ok;  // per-trace diagnostics; the verdict aggregates conditions only

    const Vector bellman = ind.j_pi - (ind.r_pi + (mdp.gamma * (ind.p_pi * ind.j_pi)));

    json report;
    report["mode"] = "vc";
    report["input_digest"] = {{"mdp", file_digest_hex(options.mdp_path)},
                              {"policy", file_digest_hex(options.policy_path)}};
    report["satisfied"] = conditions_ok;
    report["condition_reports"] = std::move(conditions);
    report["lyapunov_traces"] = std::move(traces);
    report["vc"] = {{"gamma", mdp.gamma},
                    {"num_states", mdp.num_states},
                    {"steps", options.steps},
                    {"j_pi", ind.j_pi},
                    {"bellman_residual", inf_norm(bellman)},
                    {"irreducible", ind.omega.has_value()},
                    {"certificate", certificate_json(cert)}};
    if (ind.omega) report["vc"]["omega"] = *ind.omega;
    attach_timings(report, std::move(timings), options.include_timings);

    if (options.dump_traces) dump_trace_csv(options.out_path, ".vc.csv", trace, "J");
    write_report(report, options.out_path);
    return report;
}

json cmd_analyze_vi(const ViOptions& options) {
    PhaseTimer timer;
    json timings;
    timer.start();

    if (options.steps && *options.steps < 1) raise(ErrorCode::ParseError, "--k must be at least 1");
    const Mdp mdp = validate_mdp(parse_mdp_json(load_json_file(options.mdp_path)));
    timer.record(timings, "parse");

    const OptimalValue opt = optimal_value(mdp);
    timer.record(timings, "optimal_value");

    // Fixed step count when --k is given; otherwise iterate until the
    // successive-iterate residual drops below --tol (capped).
    const Vector j0(mdp.num_states, 0.0);
    int steps;
    std::string stop_reason;
    if (options.steps) {
        steps = *options.steps;
        stop_reason = "k";
    } else {
        constexpr int cap = 10000;
        steps = cap;
        stop_reason = "cap";
        Vector j = j0;
        for (int k = 1; k <= cap; ++k) {
            Vector next = bellman_optimality(mdp, j).values;
            const double residual = inf_norm(next - j);
            j = std::move(next);
            if (residual <= options.tol) {
                steps = k;
                stop_reason = "tol";
                break;
            }
        }
    }

    const SandwichTrace sandwich = run_sandwich(mdp, opt, j0, steps);
    const ConditionReport switched = verify_switched_linf(mdp);
    timer.record(timings, "run");

    double upper_violation = 0.0, lower_violation = 0.0;
    for (std::size_t k = 0; k < sandwich.j.iterates.size(); ++k) {
        for (int s = 0; s < mdp.num_states; ++s) {
            const double jk = sandwich.j.iterates[k][s];
            upper_violation = std::max(upper_violation, jk - sandwich.j_upper[k][s]);
            lower_violation = std::max(lower_violation, sandwich.j_lower[k][s] - jk);
        }
    }
    const bool sandwich_holds = upper_violation <= 1e-9 && lower_violation <= 1e-9;

    VcCertificate linf_cert;
    linf_cert.xi.assign(mdp.num_states, 1.0);
    linf_cert.gamma = mdp.gamma;
    const LyapunovTrace v1 = lyapunov_trace(sandwich.j, opt.j_star, linf_cert, LyapunovKind::V1);

    const double final_residual =
        inf_norm(sandwich.j.iterates.back() - sandwich.j.iterates[sandwich.j.iterates.size() - 2]);

    std::vector<int> pi_star_1based(opt.selector.size());
    for (std::size_t s = 0; s < opt.selector.size(); ++s) pi_star_1based[s] = opt.selector[s] + 1;

    json report;
    report["mode"] = "vi";
    report["input_digest"] = {{"mdp", file_digest_hex(options.mdp_path)}};
    report["satisfied"] = switched.satisfied && sandwich_holds;
    report["condition_reports"] = json::array({condition_json(switched)});
    report["lyapunov_traces"] = json::array({trace_json(v1)});
    report["vi"] = {{"gamma", mdp.gamma},
                    {"num_states", mdp.num_states},
                    {"steps", steps},
                    {"stop_reason", stop_reason},
                    {"final_residual", final_residual},
                    {"j_star", opt.j_star},
                    {"pi_star", pi_star_1based},
                    {"sandwich", {{"holds", sandwich_holds},
                                  {"max_upper_violation", upper_violation},
                                  {"max_lower_violation", lower_violation}}}};
    attach_timings(report, std::move(timings), options.include_timings);

    if (options.dump_traces) {
        dump_trace_csv(options.out_path, ".vi.csv", sandwich.j, "J");
        Trace upper{sandwich.j_upper, std::nullopt, std::nullopt};
        Trace lower{sandwich.j_lower, std::nullopt, std::nullopt};
        dump_trace_csv(options.out_path, ".vi_upper.csv", upper, "J");
        dump_trace_csv(options.out_path, ".vi_lower.csv", lower, "J");
    }
    write_report(report, options.out_path);
    return report;
}

json cmd_analyze_td(const TdOptions& options) {
    PhaseTimer timer;
    json timings;
    timer.start();

    if (options.steps < 1) raise(ErrorCode::ParseError, "--k must be at least 1");
    if (options.runs < 0) raise(ErrorCode::ParseError, "--runs must be nonnegative");
    const Mdp mdp = validate_mdp(parse_mdp_json(load_json_file(options.mdp_path)));
    const Policy policy = validate_policy(mdp, parse_policy_json(load_json_file(options.policy_path), mdp));
    const FeatureMap features =
        validate_features(parse_features_json(load_json_file(options.features_path), mdp.num_states),
                          mdp.num_states);
    timer.record(timings, "parse");

    const PolicyInduced ind = induce_policy(mdp, policy);
    const AugmentedChain chain = build_augmented_chain(ind);
    const MjlsModel model = build_mjls(chain, ind, features);
    const MssCertificate cert = build_mss_certificate(model, chain);
    timer.record(timings, "certificate");

    double alpha_used;
    if (options.alpha == "auto") {
        if (!std::isfinite(cert.alpha_max))
            raise(ErrorCode::NotHurwitz,
                  "alpha_max is unbounded; pass an explicit --alpha instead of auto");
        alpha_used = options.alpha_frac * cert.alpha_max;
    } else {
        try {
            std::size_t consumed = 0;
            alpha_used = std::stod(options.alpha, &consumed);
            if (consumed != options.alpha.size()) throw std::invalid_argument(options.alpha);
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError, "--alpha must be a number or \"auto\"");
        }
        if (!(alpha_used > 0.0)) raise(ErrorCode::ParseError, "--alpha must be positive");
    }

    MssReport mss = verify_mss_sdp(model, cert, chain, alpha_used);
    mss.oracle_rho = mss_spectral_oracle(model, chain, alpha_used);
    timer.record(timings, "verify");

    if (options.runs > 0) {
        const Vector theta0(model.dim, 0.0);
        mss.mse_curve = estimate_mse_curve(model, ind, features, alpha_used, options.runs,
                                           options.steps, options.seed, theta0);
    }
    timer.record(timings, "run");

    json pairs = json::array();
    for (const auto& [s, next] : chain.states) pairs.push_back(json::array({s + 1, next + 1}));
    json g_tilde = json::array();
    for (const Matrix& g : cert.g_tilde) g_tilde.push_back(matrix_json(g));

    json report;
    report["mode"] = "td";
    report["input_digest"] = {{"mdp", file_digest_hex(options.mdp_path)},
                              {"policy", file_digest_hex(options.policy_path)},
                              {"features", file_digest_hex(options.features_path)}};
    report["satisfied"] = mss.feasible;
    report["condition_reports"] = json::array();
    report["lyapunov_traces"] = json::array();
    report["td"] = {{"gamma", mdp.gamma},
                    {"num_states", mdp.num_states},
                    {"feature_dim", model.dim},
                    {"num_pairs", chain.size()},
                    {"pairs", std::move(pairs)},
                    {"p_inf", chain.p_inf},
                    {"theta_pi", model.theta_pi},
                    {"alpha_requested", options.alpha},
                    {"alpha_frac", options.alpha_frac},
                    {"alpha_used", alpha_used},
                    {"certificate", {{"g_bar", matrix_json(cert.g_bar)},
                                     {"g_tilde", std::move(g_tilde)},
                                     {"alpha_bars", cert.alpha_bars},
                                     {"alpha_max", cert.alpha_max}}},
                    {"sdp_margins", mss.sdp_margins},
                    {"g_margins", mss.g_margins},
                    {"feasible", mss.feasible},
                    {"oracle_rho", *mss.oracle_rho}};
    if (mss.mse_curve)
        report["td"]["mse"] = {{"runs", options.runs},
                               {"steps", options.steps},
                               {"seed", options.seed},
                               {"curve", *mss.mse_curve}};
    attach_timings(report, std::move(timings), options.include_timings);

    if (options.dump_traces) {
        const Trace sample = run_td0(ind, features, alpha_used, Vector(model.dim, 0.0),
                                     options.steps, options.seed);
        dump_trace_csv(options.out_path, ".td.csv", sample, "theta");
    }
    write_report(report, options.out_path);
    return report;
}

bool cmd_validate(const std::string& mdp_path, std::string& diagnostics) {
    try {
        validate_mdp(parse_mdp_json(load_json_file(mdp_path)));
    } catch (const Error& e) {
        diagnostics = e.what();
        return false;
    }
    diagnostics = "valid";
    return true;
}

}  // namespace vbcert
