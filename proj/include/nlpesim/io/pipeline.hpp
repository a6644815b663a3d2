#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nlpesim/channel/channel.hpp"
#include "nlpesim/channel/counts.hpp"
#include "nlpesim/core/timing.hpp"
#include "nlpesim/init/filter.hpp"
#include "nlpesim/init/prepare.hpp"
#include "nlpesim/io/csv.hpp"
#include "nlpesim/io/json_io.hpp"
#include "nlpesim/io/scenario.hpp"
#include "nlpesim/nlpe/pulse.hpp"
#include "nlpesim/nlpe/sequence.hpp"
#include "nlpesim/spectro/level_order.hpp"
#include "nlpesim/spectro/spectrum.hpp"
#include "nlpesim/spectro/strengths.hpp"
#include "nlpesim/tomo/classical_bound.hpp"
#include "nlpesim/tomo/mle.hpp"
#include "nlpesim/tomo/montecarlo.hpp"
#include "nlpesim/util/parallel.hpp"
#include "nlpesim/util/rng.hpp"
#include "nlpesim/version.hpp"

namespace nlpesim {

// Shared state of one CLI invocation: the resolved scenario, where the
// artifacts go, and which files were written (for the manifest). The
// output directory is purely an invocation concern; it never enters the
// scenario text or its hash, so runs into different directories stay
// byte-identical.
struct PipelineContext {
    ScenarioConfig scenario;
    std::string out_dir;
    bool emit_plots = false;
    std::vector<std::string> artifacts;

    std::string path(const std::string& name) const { return out_dir + "/" + name; }

    void note(const std::string& name) {
        if (std::find(artifacts.begin(), artifacts.end(), name) == artifacts.end())
            artifacts.push_back(name);
    }

    void prepare() {
        scenario.validate();
        std::filesystem::create_directories(out_dir);
        const std::string name = "scenario.ini";
        std::ofstream out(path(name), std::ios::binary);
        if (!out)
            throw data_error("cannot write '" + path(name) + "'");
        out << scenario_to_text(scenario);
        note(name);
    }

    int pump_threads() const { return resolve_threads(scenario.threads); }
};

namespace detail {

inline const char* pol_name(Polarization p) { return p == Polarization::H ? "H" : "V"; }

inline json peak_json(const PeakParams& p) {
    json j;
    j["center_mhz"] = p.center_mhz;
    j["fwhm_mhz"] = p.fwhm_mhz;
    j["depth"] = p.depth;
    return j;
}

inline json verdict_json(const std::string& label, const CandidateVerdict& v) {
    json j;
    j["label"] = label;
    j["ground_order"] = spin_labels_to_string(v.structure.ground_order);
    j["excited_order"] = spin_labels_to_string(v.structure.excited_order);
    j["predicted_position_mhz"] = v.predicted_position_mhz;
    j["predicted_weight"] = v.predicted_weight;
    j["delta_d_dual"] = v.delta_d_dual;
    j["delta_d_single0"] = v.delta_d_single0;
    j["delta_d_single1"] = v.delta_d_single1;
    j["margin"] = v.margin;
    j["superadditive"] = v.superadditive;
    return j;
}

inline json matrix4_json(const Eigen::Matrix4cd& m, bool imaginary) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c)
            row.push_back(imaginary ? m(r, c).imag() : m(r, c).real());
        rows.push_back(row);
    }
    return rows;
}

inline json count_grid_json(const std::array<std::array<std::uint64_t, 4>, 4>& g) {
    json rows = json::array();
    for (const auto& r : g) {
        json row = json::array();
        for (auto v : r)
            row.push_back(v);
        rows.push_back(row);
    }
    return rows;
}

// Dual-burn and single-burn spectra on the data model, for plotting.
inline void write_ordering_spectrum_csv(PipelineContext& ctx, const std::string& name,
                                        const DualBurnExperiment& exp,
                                        const SpectrumModel& model, const DetuningGrid& grid) {
    const int threads = ctx.pump_threads();
    const auto dual = pump_populations(model.structure, model.table, exp.dual_schedule(),
                                       model.medium, grid, threads);
    const auto s0 = pump_populations(model.structure, model.table, exp.single_schedule(0),
                                     model.medium, grid, threads);
    const auto s1 = pump_populations(model.structure, model.table, exp.single_schedule(1),
                                     model.medium, grid, threads);
    const auto sp_ref = absorption_spectrum(model, PopulationState::equal(grid), exp.pol, threads);
    const auto sp_dual = absorption_spectrum(model, dual, exp.pol, threads);
    const auto sp_s0 = absorption_spectrum(model, s0, exp.pol, threads);
    const auto sp_s1 = absorption_spectrum(model, s1, exp.pol, threads);

    std::vector<std::vector<double>> rows;
    rows.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i)
        rows.push_back({grid.value(i), sp_ref.optical_depth[i], sp_dual.optical_depth[i],
                        sp_s0.optical_depth[i], sp_s1.optical_depth[i]});
    write_csv(ctx.path(name),
              {"detuning_mhz", "depth_reference", "depth_dual", "depth_single0", "depth_single1"},
              rows);
    ctx.note(name);
}

inline void write_spectrum_csv(PipelineContext& ctx, const std::string& name,
                               const Spectrum& spectrum) {
    std::vector<std::vector<double>> rows;
    rows.reserve(spectrum.grid.count);
    for (std::size_t i = 0; i < spectrum.grid.count; ++i)
        rows.push_back({spectrum.grid.value(i), spectrum.optical_depth[i],
                        std::exp(-spectrum.optical_depth[i])});
    write_csv(ctx.path(name), {"detuning_mhz", "optical_depth", "transmission"}, rows);
    ctx.note(name);
}

} // namespace detail

struct SpectroSelection {
    bool ground = true;
    bool excited = true;
    bool strengths = true;
};

// Offsets of the second burn tone, derived from the gap magnitudes alone so
// the same experiment applies whichever ordering is the true one.
inline double ground_test_tone2_mhz(const HyperfineStructure& s) {
    return -std::abs(s.ground_offset_mhz(SpinLabel::one_half) -
                     s.ground_offset_mhz(SpinLabel::three_half));
}

inline double excited_test_tone2_mhz(const HyperfineStructure& s) {
    const double ground_span = s.ground_gaps_mhz[0] + s.ground_gaps_mhz[1];
    const double excited_span = s.excited_gaps_mhz[0] + s.excited_gaps_mhz[1];
    return ground_span - excited_span;
}

inline void stage_spectro(PipelineContext& ctx, const SpectroSelection& sel = {}) {
    const ScenarioConfig& s = ctx.scenario;
    const SpectrumModel model = s.spectrum_model();
    const DetuningGrid grid = s.spectro_grid();
    const int threads = ctx.pump_threads();

    auto run_ordering = [&](const std::string& which, double tone2,
                            const HyperfineStructure& flipped, const std::string& flip_label) {
        DualBurnExperiment exp;
        exp.tone2_offset_mhz = tone2;
        exp.tone_bandwidth_mhz = s.spectroscopy.tone_bandwidth_mhz;
        exp.pump_threads = threads;
        const OrderingReport report =
            infer_level_order({s.structure, flipped}, exp, model, grid,
                              s.spectroscopy.superadditivity_threshold);

        json j;
        j["experiment"] = which;
        j["tone2_offset_mhz"] = exp.tone2_offset_mhz;
        j["tone_bandwidth_mhz"] = exp.tone_bandwidth_mhz;
        j["threshold"] = report.threshold;
        j["conclusive"] = report.conclusive();
        const std::array<std::string, 2> labels = {"as-configured", flip_label};
        j["chosen"] = report.conclusive() ? labels[static_cast<std::size_t>(report.chosen)]
                                          : "inconclusive";
        json cands = json::array();
        for (std::size_t c = 0; c < report.candidates.size(); ++c)
            cands.push_back(detail::verdict_json(labels[c], report.candidates[c]));
        j["candidates"] = cands;
        const std::string name = "ordering_" + which + ".json";
        save_json(ctx.path(name), j);
        ctx.note(name);

        if (ctx.emit_plots)
            detail::write_ordering_spectrum_csv(ctx, "ordering_" + which + "_spectrum.csv", exp,
                                                model, grid);
    };

    if (sel.ground)
        run_ordering("ground", ground_test_tone2_mhz(s.structure),
                     flipped_ground(s.structure), "ground-flipped");
    if (sel.excited)
        run_ordering("excited", excited_test_tone2_mhz(s.structure),
                     flipped_excited(s.structure), "excited-flipped");

    if (sel.strengths) {
        StrengthsConfig cfg;
        cfg.measured_ground = s.spectroscopy.measured_ground;
        cfg.sweep_bandwidth_mhz = s.spectroscopy.sweep_bandwidth_mhz;
        cfg.narrow_bandwidth_mhz = s.spectroscopy.narrow_bandwidth_mhz;
        cfg.pump_threads = threads;
        const StrengthsReport rep = measure_relative_strengths(model, grid, cfg);

        json j;
        j["measured_ground"] = to_string(rep.measured_ground);
        j["w0_offset_mhz"] = rep.w0_offset_mhz;
        json lines = json::array();
        for (int e = 0; e < 3; ++e) {
            json line;
            line["excited"] = to_string(static_cast<SpinLabel>(e));
            line["position_rel_w0_mhz"] = rep.position_rel_w0_mhz[static_cast<std::size_t>(e)];
            line["delta_d"] = rep.delta_d[static_cast<std::size_t>(e)];
            line["relative_strength"] = rep.relative_strength[static_cast<std::size_t>(e)];
            line["branching_row_value"] =
                s.table(rep.measured_ground, static_cast<SpinLabel>(e));
            lines.push_back(line);
        }
        j["lines"] = lines;
        save_json(ctx.path("strengths.json"), j);
        ctx.note("strengths.json");
    }
}

inline PreparedMedium stage_init(PipelineContext& ctx) {
    const ScenarioConfig& s = ctx.scenario;
    const SpectrumModel model = s.spectrum_model();
    const DetuningGrid grid = s.spectro_grid();
    InitializationConfig cfg = s.init;
    cfg.pump_threads = ctx.pump_threads();

    PreparedMedium prepared = run_initialization(model, s.plan, grid, cfg);

    json j;
    json g;
    g["min_mhz"] = grid.min_mhz;
    g["spacing_mhz"] = grid.spacing_mhz;
    g["count"] = grid.count;
    j["grid"] = g;
    j["converged"] = prepared.state.converged;
    j["cycles_run"] = prepared.state.cycles_run;
    j["f1_band_cleared"] = prepared.f1_band_cleared;
    j["peak_h"] = detail::peak_json(prepared.peak_h);
    j["peak_v"] = detail::peak_json(prepared.peak_v);
    j["baseline_depth_h"] = prepared.spectrum_h.baseline_depth;
    j["baseline_depth_v"] = prepared.spectrum_v.baseline_depth;
    save_json(ctx.path("init_report.json"), j);
    ctx.note("init_report.json");

    std::vector<std::vector<double>> rows;
    rows.reserve(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const auto& occ = prepared.state.occupation[i];
        rows.push_back({grid.value(i), occ[0], occ[1], occ[2]});
    }
    write_csv(ctx.path("prepared_occupation.csv"),
              {"detuning_mhz", "occ_1_2", "occ_3_2", "occ_5_2"}, rows);
    ctx.note("prepared_occupation.csv");

    if (ctx.emit_plots) {
        detail::write_spectrum_csv(ctx, "spectrum_initialized_h.csv", prepared.spectrum_h);
        detail::write_spectrum_csv(ctx, "spectrum_initialized_v.csv", prepared.spectrum_v);
        std::vector<std::vector<double>> frows;
        for (int k = -400; k <= 400; ++k) {
            const double nu = 0.01 * k;
            frows.push_back({nu, filter_hole_profile(s.filter, nu),
                             filter_transmission(s.filter, nu)});
        }
        write_csv(ctx.path("filter_profile.csv"), {"detuning_mhz", "profile", "transmission"},
                  frows);
        ctx.note("filter_profile.csv");
    }
    return prepared;
}

// Rebuilds the prepared medium from the persisted occupations; spectra and
// peak parameters are recomputed by the same code path the init stage used,
// so downstream stages cannot tell the difference.
inline PreparedMedium load_prepared_artifacts(const PipelineContext& ctx) {
    const json rep = load_artifact(ctx.path("init_report.json"), "init");
    require_artifact(ctx.path("prepared_occupation.csv"), "init");
    const CsvTable table = read_csv(ctx.path("prepared_occupation.csv"));

    DetuningGrid grid;
    grid.min_mhz = rep.at("grid").at("min_mhz").get<double>();
    grid.spacing_mhz = rep.at("grid").at("spacing_mhz").get<double>();
    grid.count = rep.at("grid").at("count").get<std::size_t>();
    grid.validate();
    if (table.rows.size() != grid.count)
        throw data_error("prepared_occupation.csv: expected " + std::to_string(grid.count) +
                         " rows, found " + std::to_string(table.rows.size()));

    PopulationState state;
    state.grid = grid;
    state.cycles_run = rep.at("cycles_run").get<int>();
    state.converged = rep.at("converged").get<bool>();
    state.occupation.resize(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const auto& row = table.rows[i];
        for (std::size_t g = 0; g < 3; ++g)
            state.occupation[i][g] = row[g + 1];
    }
    return assemble_prepared(ctx.scenario.spectrum_model(), ctx.scenario.plan, state,
                             ctx.scenario.init.keep_clean_bandwidth_mhz, ctx.pump_threads());
}

// What the qubit stage needs from the echo stage.
struct EchoSummary {
    double efficiency_h = 0.0;
    double efficiency_v = 0.0;
    double silenced_time_us = 0.0;
    double emitted_time_us = 0.0;
};

namespace detail {

inline double matched_echo_efficiency(const SequenceReport& rep) {
    double best = -1.0;
    for (const auto& e : rep.echoes)
        if (e.phase_matched)
            best = std::max(best, e.efficiency);
    if (best < 0.0)
        throw data_error("sequence: no phase-matched echo was produced");
    return best;
}

inline json echoes_json(const SequenceReport& rep) {
    json arr = json::array();
    for (const auto& e : rep.echoes) {
        json j;
        j["time_us"] = e.time_us;
        j["relative_amplitude"] = e.relative_amplitude;
        j["efficiency"] = e.efficiency;
        j["phase_matched"] = e.phase_matched;
        j["sig_quanta"] = e.sig_quanta;
        j["ctrl_quanta"] = e.ctrl_quanta;
        j["transition"] = e.transition;
        arr.push_back(j);
    }
    json out;
    out["echoes"] = arr;
    out["absorbed_norm"] = rep.absorbed_norm;
    out["peak_depth"] = rep.peak_depth;
    return out;
}

inline void write_trace_csv(PipelineContext& ctx, const std::string& name,
                            const std::vector<TracePoint>& trace) {
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.size());
    for (const auto& p : trace)
        rows.push_back({p.time_us, p.intensity});
    write_csv(ctx.path(name), {"time_us", "intensity"}, rows);
    ctx.note(name);
}

} // namespace detail

inline EchoSummary stage_nlpe(PipelineContext& ctx, const PreparedMedium& prepared) {
    const ScenarioConfig& s = ctx.scenario;
    const auto pulses = default_pulse_sequence(s.structure, s.plan, s.timing);
    const EchoTimes predicted = echo_times(s.timing);

    SequenceConfig primary = s.sequence;
    primary.geometry = Geometry::counter_propagating;
    SequenceConfig diagnostic = s.sequence;
    diagnostic.geometry = Geometry::co_propagating;

    json j;
    j["geometry"] = to_string(primary.geometry);
    j["transfer_efficiency"] = primary.transfer_efficiency;
    j["decoherence_factor"] = primary.decoherence_factor;
    j["silenced_time_us"] = predicted.silenced_us;
    j["emitted_time_us"] = predicted.emitted_us;

    EchoSummary summary;
    summary.silenced_time_us = predicted.silenced_us;
    summary.emitted_time_us = predicted.emitted_us;

    json co;
    for (Polarization pol : {Polarization::H, Polarization::V}) {
        SequenceReport rep =
            run_sequence(prepared, pol, s.structure, s.plan, s.timing, pulses, primary);
        rep.trace = synthesize_trace(rep, s.timing);
        const double eff = detail::matched_echo_efficiency(rep);
        const std::string key = pol == Polarization::H ? "h" : "v";
        j[key] = detail::echoes_json(rep);
        (pol == Polarization::H ? summary.efficiency_h : summary.efficiency_v) = eff;
        detail::write_trace_csv(ctx, "echo_trace_" + key + ".csv", rep.trace);

        const SequenceReport corep =
            run_sequence(prepared, pol, s.structure, s.plan, s.timing, pulses, diagnostic);
        co[key] = detail::echoes_json(corep);
    }
    j["efficiency_h"] = summary.efficiency_h;
    j["efficiency_v"] = summary.efficiency_v;
    j["co_propagating_diagnostic"] = co;
    save_json(ctx.path("echo_records.json"), j);
    ctx.note("echo_records.json");
    return summary;
}

inline EchoSummary load_echo_summary(const PipelineContext& ctx) {
    const json rep = load_artifact(ctx.path("echo_records.json"), "nlpe");
    EchoSummary s;
    s.efficiency_h = rep.at("efficiency_h").get<double>();
    s.efficiency_v = rep.at("efficiency_v").get<double>();
    s.silenced_time_us = rep.at("silenced_time_us").get<double>();
    s.emitted_time_us = rep.at("emitted_time_us").get<double>();
    return s;
}

// Standalone qubit runs only touch the echo artifact when the rail
// efficiencies are not both pinned in the config.
inline EchoSummary resolve_echoes(const PipelineContext& ctx) {
    const ChannelScenario& ch = ctx.scenario.channel;
    if (ch.efficiency_h > 0.0 && ch.efficiency_v > 0.0) {
        const EchoTimes predicted = echo_times(ctx.scenario.timing);
        return EchoSummary{ch.efficiency_h, ch.efficiency_v, predicted.silenced_us,
                           predicted.emitted_us};
    }
    return load_echo_summary(ctx);
}

struct QubitResult {
    CountMatrix counts;
    ChannelParams params;
    bool calibrated_eta = false;
};

inline QubitResult stage_qubit(PipelineContext& ctx, const EchoSummary& echoes) {
    const ScenarioConfig& s = ctx.scenario;
    const ChannelScenario& ch = s.channel;

    QubitResult result;
    ChannelParams& p = result.params;
    p.efficiency_h = ch.efficiency_h > 0.0 ? ch.efficiency_h : echoes.efficiency_h;
    p.efficiency_v = ch.efficiency_v > 0.0 ? ch.efficiency_v : echoes.efficiency_v;
    p.mean_photons = ch.mean_photons;
    p.noise_floor = ch.noise_floor;
    p.detection_window_us = ch.detection_window_us;
    result.calibrated_eta = ch.eta_detection <= 0.0;
    p.eta_detection = result.calibrated_eta
                          ? calibrate_eta_detection(ch.target_snr, ch.mean_photons,
                                                    p.efficiency_h, ch.noise_floor)
                          : ch.eta_detection;

    const double storage = echoes.emitted_time_us - s.timing.t_us[0];
    result.counts = simulate_counts(p, s.trials, s.seed, storage);

    json j;
    j["seed"] = result.counts.seed;
    j["trials_per_setting"] = result.counts.trials_per_setting;
    j["storage_time_us"] = result.counts.storage_time_us;
    j["detection_window_us"] = result.counts.detection_window_us;
    json cj;
    cj["efficiency_h"] = p.efficiency_h;
    cj["efficiency_v"] = p.efficiency_v;
    cj["eta_detection"] = p.eta_detection;
    cj["eta_detection_calibrated"] = result.calibrated_eta;
    cj["target_snr"] = ch.target_snr;
    cj["mean_photons"] = p.mean_photons;
    cj["noise_floor"] = p.noise_floor;
    j["channel"] = cj;
    j["inputs"] = json::array({"H", "V", "D", "R"});
    j["analyzers"] = json::array({"H", "V", "D", "R"});
    j["counts"] = detail::count_grid_json(result.counts.counts);
    j["noise_counts"] = detail::count_grid_json(result.counts.noise_counts);
    try {
        const auto snr = measured_snr(result.counts);
        json sj;
        for (std::size_t i = 0; i < 4; ++i)
            sj[to_string(stokes_settings[i])] = snr[i];
        j["measured_snr"] = sj;
    } catch (const data_error&) {
        j["measured_snr"] = nullptr; // too few noise clicks at this trial count
    }
    save_json(ctx.path("counts.json"), j);
    ctx.note("counts.json");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t q = 0; q < 4; ++q)
            rows.push_back({to_string(stokes_settings[i]), to_string(stokes_settings[q]),
                            std::to_string(result.counts.counts[i][q]),
                            std::to_string(result.counts.noise_counts[i][q])});
    write_csv_text(ctx.path("counts.csv"), {"input", "analyzer", "counts", "noise_counts"}, rows);
    ctx.note("counts.csv");

    if (ctx.emit_plots) {
        std::vector<std::vector<std::string>> erows;
        const double trials = static_cast<double>(s.trials);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t q = 0; q < 4; ++q) {
                const double mean =
                    expected_counts(p, jones_state(stokes_settings[i]),
                                    jones_state(stokes_settings[q])) *
                    trials;
                erows.push_back({to_string(stokes_settings[i]), to_string(stokes_settings[q]),
                                 format_double(mean),
                                 format_double(0.5 * p.noise_floor * trials)});
            }
        write_csv_text(ctx.path("counts_expected.csv"),
                       {"input", "analyzer", "expected_total_mean", "expected_noise_mean"},
                       erows);
        ctx.note("counts_expected.csv");
    }
    return result;
}

inline QubitResult load_counts_artifact(const PipelineContext& ctx) {
    const json rep = load_artifact(ctx.path("counts.json"), "qubit");
    QubitResult r;
    r.counts.seed = rep.at("seed").get<std::uint64_t>();
    r.counts.trials_per_setting = rep.at("trials_per_setting").get<std::uint64_t>();
    r.counts.storage_time_us = rep.at("storage_time_us").get<double>();
    r.counts.detection_window_us = rep.at("detection_window_us").get<double>();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t q = 0; q < 4; ++q) {
            r.counts.counts[i][q] = rep.at("counts").at(i).at(q).get<std::uint64_t>();
            r.counts.noise_counts[i][q] =
                rep.at("noise_counts").at(i).at(q).get<std::uint64_t>();
        }
    const json& cj = rep.at("channel");
    r.params.efficiency_h = cj.at("efficiency_h").get<double>();
    r.params.efficiency_v = cj.at("efficiency_v").get<double>();
    r.params.eta_detection = cj.at("eta_detection").get<double>();
    r.params.mean_photons = cj.at("mean_photons").get<double>();
    r.params.noise_floor = cj.at("noise_floor").get<double>();
    r.params.detection_window_us = r.counts.detection_window_us;
    r.calibrated_eta = cj.at("eta_detection_calibrated").get<bool>();
    return r;
}

struct TomoOutcome {
    double fidelity = 0.0;
    double mc_mean = 0.0;
    double mc_std = 0.0;
    std::size_t mc_excluded = 0;
    double classical_bound = 0.0;
    bool exceeds_bound = false;
};

inline TomoOutcome stage_tomo(PipelineContext& ctx, const QubitResult& q) {
    const ScenarioConfig& s = ctx.scenario;
    const TomographyScenario& t = s.tomography;

    const MleResult fit = mle_process(q.counts, t.policy, t.options());
    const McReport mc =
        mc_process_fidelity(q.counts, t.policy, static_cast<std::size_t>(t.resamples),
                            derive_seed(s.seed, 0x746du, 0), t.options());

    const double success = 0.5 * (q.params.efficiency_h + q.params.efficiency_v);
    const double bound = classical_fidelity_bound_poisson(q.params.mean_photons, success);

    json j;
    j["noise_policy"] = to_string(t.policy);
    j["fidelity"] = fit.fidelity;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["log_likelihood"] = fit.log_likelihood;
    j["chi_real"] = detail::matrix4_json(fit.chi, false);
    j["chi_imag"] = detail::matrix4_json(fit.chi, true);
    j["choi_real"] = detail::matrix4_json(fit.choi, false);
    j["choi_imag"] = detail::matrix4_json(fit.choi, true);
    json mj;
    mj["resamples"] = mc.resamples;
    mj["excluded"] = mc.excluded;
    mj["mean_fidelity"] = mc.mean_fidelity;
    mj["std_fidelity"] = mc.std_fidelity;
    j["monte_carlo"] = mj;
    json cj;
    cj["mean_photons"] = q.params.mean_photons;
    cj["success_probability"] = success;
    cj["bound"] = bound;
    cj["comparator"] = t.classical_bound_comparator;
    cj["fidelity_minus_bound"] = fit.fidelity - bound;
    cj["exceeds_bound"] = fit.fidelity > bound;
    j["classical"] = cj;
    save_json(ctx.path("tomo_result.json"), j);
    ctx.note("tomo_result.json");

    if (ctx.emit_plots) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < mc.fidelities.size(); ++i)
            rows.push_back({static_cast<double>(i), mc.fidelities[i]});
        write_csv(ctx.path("fidelity_samples.csv"), {"resample", "fidelity"}, rows);
        ctx.note("fidelity_samples.csv");
    }

    return TomoOutcome{fit.fidelity, mc.mean_fidelity, mc.std_fidelity,
                       mc.excluded,  bound,            fit.fidelity > bound};
}

// Written last by every command. Records what ran and with which inputs;
// deliberately carries no timestamps or absolute paths so reruns compare
// byte for byte.
inline void write_run_manifest(PipelineContext& ctx, const std::string& command) {
    json j;
    j["command"] = command;
    j["version"] = version_string;
    j["config_hash"] = scenario_hash(ctx.scenario);
    j["seed"] = ctx.scenario.seed;
    j["trials"] = ctx.scenario.trials;
    j["threads"] = ctx.scenario.threads;
    j["emit_plots_data"] = ctx.emit_plots;
    std::vector<std::string> names = ctx.artifacts;
    names.push_back("run_manifest.json");
    std::sort(names.begin(), names.end());
    j["artifacts"] = names;
    save_json(ctx.path("run_manifest.json"), j);
}

} // namespace nlpesim
