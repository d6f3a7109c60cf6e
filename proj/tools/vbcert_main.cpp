#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vbcert/errors.hpp"
#include "vbcert/report.hpp"

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Convergence certificates for value computation, value iteration, and TD(0)"};
    app.require_subcommand(1);

    vbcert::VcOptions vc;
    CLI::App* analyze_vc = app.add_subcommand("analyze-vc", "Fixed-policy value computation analysis");
    analyze_vc->add_option("--mdp", vc.mdp_path, "MDP JSON file")->required();
    analyze_vc->add_option("--policy", vc.policy_path, "policy JSON file")->required();
    analyze_vc->add_option("--k", vc.steps, "iteration count")->capture_default_str();
    analyze_vc->add_option("--j0", vc.j0_path, "initial value vector (JSON array file)");
    analyze_vc->add_option("--out", vc.out_path, "report output path")->required();
    analyze_vc->add_flag("--dump-traces", vc.dump_traces, "write trace CSVs next to --out");
    analyze_vc->add_flag("--timings", vc.include_timings, "include wall times in the report");

    vbcert::ViOptions vi;
    int vi_steps = 0;
    CLI::App* analyze_vi = app.add_subcommand("analyze-vi", "Value iteration analysis");
    analyze_vi->add_option("--mdp", vi.mdp_path, "MDP JSON file")->required();
    CLI::Option* vi_k = analyze_vi->add_option("--k", vi_steps, "fixed iteration count");
    analyze_vi->add_option("--tol", vi.tol, "successive-iterate stopping tolerance")
        ->capture_default_str();
    analyze_vi->add_option("--out", vi.out_path, "report output path")->required();
    analyze_vi->add_flag("--dump-traces", vi.dump_traces, "write trace CSVs next to --out");
    analyze_vi->add_flag("--timings", vi.include_timings, "include wall times in the report");

    vbcert::TdOptions td;
    std::string seed_str = "0";
    CLI::App* analyze_td = app.add_subcommand("analyze-td", "TD(0) stepsize-bound analysis");
    analyze_td->add_option("--mdp", td.mdp_path, "MDP JSON file")->required();
    analyze_td->add_option("--policy", td.policy_path, "policy JSON file")->required();
    analyze_td->add_option("--features", td.features_path, "features JSON file")->required();
    analyze_td->add_option("--alpha", td.alpha, "stepsize, a number or \"auto\"")
        ->capture_default_str();
    analyze_td->add_option("--alpha-frac", td.alpha_frac, "fraction of alpha_max used by auto")
        ->capture_default_str();
    analyze_td->add_option("--runs", td.runs, "Monte Carlo runs (0 disables the MSE curve)")
        ->capture_default_str();
    analyze_td->add_option("--k", td.steps, "trajectory length")->capture_default_str();
    analyze_td->add_option("--seed", seed_str, "base seed")->capture_default_str();
    analyze_td->add_option("--out", td.out_path, "report output path")->required();
    analyze_td->add_flag("--dump-traces", td.dump_traces, "write a sample trajectory CSV");
    analyze_td->add_flag("--timings", td.include_timings, "include wall times in the report");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Check an MDP file against the schema");
    validate->add_option("--mdp", validate_path, "MDP JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_vc->parsed()) {
            vbcert::cmd_analyze_vc(vc);
        } else if (analyze_vi->parsed()) {
            if (vi_k->count() > 0) vi.steps = vi_steps;
            vbcert::cmd_analyze_vi(vi);
        } else if (analyze_td->parsed()) {
            td.seed = std::stoull(seed_str);
            vbcert::cmd_analyze_td(td);
        } else if (validate->parsed()) {
            std::string diagnostics;
            const bool ok = vbcert::cmd_validate(validate_path, diagnostics);
            if (!ok) {
                std::cerr << diagnostics << "\n";
                return 2;
            }
            std::cout << diagnostics << "\n";
        }
    } catch (const vbcert::Error& e) {
        std::cerr << e.what() << "\n";
        return vbcert::is_input_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
