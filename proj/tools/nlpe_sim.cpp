// Command-line front end. Every subcommand resolves the scenario, runs its
// stage(s), and leaves a manifest next to the artifacts. Exit codes: 0 on
// success, 2 for configuration problems, 3 for a missing upstream artifact,
// 1 for anything else a stage throws.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlpesim/io/pipeline.hpp"

using namespace nlpesim;

namespace {

void print_artifacts(const PipelineContext& ctx) {
    for (const auto& name : ctx.artifacts)
        std::cout << "wrote " << ctx.path(name) << "\n";
    std::cout << "wrote " << ctx.path("run_manifest.json") << "\n";
}

void print_init(const PreparedMedium& prepared) {
    std::printf("init: peak H fwhm %.3f MHz depth %.3f, peak V fwhm %.3f MHz depth %.3f, "
                "keeper band %s\n",
                prepared.peak_h.fwhm_mhz, prepared.peak_h.depth, prepared.peak_v.fwhm_mhz,
                prepared.peak_v.depth, prepared.f1_band_cleared ? "cleared" : "NOT cleared");
}

void print_echoes(const EchoSummary& e) {
    std::printf("nlpe: emitted echo at %.2f us, efficiency H %.4f V %.4f (silenced at %.2f us)\n",
                e.emitted_time_us, e.efficiency_h, e.efficiency_v, e.silenced_time_us);
}

void print_tomo(const TomoOutcome& t) {
    std::printf("tomo: process fidelity %.4f +/- %.4f (mc mean %.4f, %zu excluded)\n",
                t.fidelity, t.mc_std, t.mc_mean, t.mc_excluded);
    std::printf("tomo: classical bound %.4f -> %s\n", t.classical_bound,
                t.exceeds_bound ? "exceeded" : "NOT exceeded");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"storage experiment simulation pipeline"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir_flag;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    int threads = 0;
    bool emit_plots = false;
    std::string dual_burn;
    bool strengths_flag = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario file (INI)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--out-dir", out_dir_flag, "artifact directory");
        cmd->add_option("--seed", seed, "random seed override");
        cmd->add_option("--trials", trials, "trials per tomography setting");
        cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
        cmd->add_flag("--emit-plots-data", emit_plots, "write plot-ready CSV extras");
    };

    CLI::App* spectro = app.add_subcommand("spectro", "hole-burning experiments");
    add_common(spectro);
    spectro->add_option("--dual-burn", dual_burn, "run one ordering test only")
        ->check(CLI::IsMember({"ground", "excited"}));
    spectro->add_flag("--strengths", strengths_flag, "run the strength measurement only");

    CLI::App* init = app.add_subcommand("init", "prepare the storage medium");
    add_common(init);
    CLI::App* nlpe = app.add_subcommand("nlpe", "run the echo sequence");
    add_common(nlpe);
    CLI::App* qubit = app.add_subcommand("qubit", "simulate qubit transmission counts");
    add_common(qubit);
    CLI::App* tomo = app.add_subcommand("tomo", "reconstruct the storage process");
    add_common(tomo);
    CLI::App* full = app.add_subcommand("full", "run every stage in order");
    add_common(full);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    CLI::App* cmd = app.get_subcommands().at(0);

    try {
        ScenarioConfig scenario =
            cmd->count("--config") ? load_scenario_file(config_path) : default_scenario();
        if (cmd->count("--seed"))
            scenario.seed = seed;
        if (cmd->count("--trials"))
            scenario.trials = trials;
        if (cmd->count("--threads"))
            scenario.threads = threads;

        PipelineContext ctx;
        ctx.scenario = scenario;
        ctx.emit_plots = emit_plots;
        const char* env_dir = std::getenv("NLPE_SIM_OUT");
        if (env_dir && *env_dir)
            ctx.out_dir = env_dir;
        else if (cmd->count("--out-dir"))
            ctx.out_dir = out_dir_flag;
        else
            ctx.out_dir = scenario.out_dir;
        ctx.prepare();

        if (cmd == spectro) {
            SpectroSelection sel;
            if (cmd->count("--dual-burn") || cmd->count("--strengths")) {
                sel = SpectroSelection{false, false, false};
                sel.ground = dual_burn == "ground";
                sel.excited = dual_burn == "excited";
                sel.strengths = strengths_flag;
            }
            stage_spectro(ctx, sel);
            write_run_manifest(ctx, "spectro");
        } else if (cmd == init) {
            print_init(stage_init(ctx));
            write_run_manifest(ctx, "init");
        } else if (cmd == nlpe) {
            const PreparedMedium prepared = load_prepared_artifacts(ctx);
            print_echoes(stage_nlpe(ctx, prepared));
            write_run_manifest(ctx, "nlpe");
        } else if (cmd == qubit) {
            stage_qubit(ctx, resolve_echoes(ctx));
            write_run_manifest(ctx, "qubit");
        } else if (cmd == tomo) {
            print_tomo(stage_tomo(ctx, load_counts_artifact(ctx)));
            write_run_manifest(ctx, "tomo");
        } else {
            stage_spectro(ctx);
            const PreparedMedium prepared = stage_init(ctx);
            print_init(prepared);
            const EchoSummary echoes = stage_nlpe(ctx, prepared);
            print_echoes(echoes);
            const QubitResult counts = stage_qubit(ctx, echoes);
            print_tomo(stage_tomo(ctx, counts));
            write_run_manifest(ctx, "full");
        }
        print_artifacts(ctx);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const missing_artifact_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
