#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "nlpesim/channel/channel.hpp"
#include "nlpesim/core/frequency_plan.hpp"
#include "nlpesim/core/levels.hpp"
#include "nlpesim/core/medium.hpp"
#include "nlpesim/core/timing.hpp"
#include "nlpesim/core/transition_table.hpp"
#include "nlpesim/init/filter.hpp"
#include "nlpesim/init/prepare.hpp"
#include "nlpesim/io/config.hpp"
#include "nlpesim/io/csv.hpp"
#include "nlpesim/nlpe/efficiency.hpp"
#include "nlpesim/nlpe/sequence.hpp"
#include "nlpesim/spectro/level_order.hpp"
#include "nlpesim/spectro/strengths.hpp"
#include "nlpesim/tomo/mle.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Knobs of the hole-burning experiments (dual burns and the
// transition-strength measurement) plus the shared wide spectrum grid.
struct SpectroscopyConfig {
    double grid_min_mhz = -280.0;
    double grid_max_mhz = 280.0;
    double grid_spacing_mhz = 0.01;
    double tone_bandwidth_mhz = 0.2;
    double superadditivity_threshold = 0.2;
    double feature_min_delta = 0.02;
    double sweep_bandwidth_mhz = 4.0;
    double narrow_bandwidth_mhz = 0.2;
    SpinLabel measured_ground = SpinLabel::three_half;

    void validate() const {
        if (!(grid_spacing_mhz > 0.0) || !(grid_max_mhz > grid_min_mhz))
            throw input_error("spectroscopy: grid must have positive span and spacing");
        if (!(tone_bandwidth_mhz > 0.0) || !(sweep_bandwidth_mhz > 0.0) ||
            !(narrow_bandwidth_mhz > 0.0))
            throw input_error("spectroscopy: tone bandwidths must be positive");
        if (!(superadditivity_threshold >= 0.0))
            throw input_error("spectroscopy: superadditivity threshold must be nonnegative");
    }
};

// Channel assembly: what is configured directly versus derived. Zero for
// the efficiencies means "take the echo-stage result"; zero for the
// detection efficiency means "calibrate against target_snr".
struct ChannelScenario {
    double mean_photons = 1.10;
    double noise_floor = 0.003;
    double detection_window_us = 1.57;
    double target_snr = 9.3;
    double eta_detection = 0.0;
    double efficiency_h = 0.0;
    double efficiency_v = 0.0;

    void validate() const {
        if (mean_photons < 0.0 || noise_floor < 0.0)
            throw input_error("channel: photon number and noise floor must be nonnegative");
        if (!(detection_window_us > 0.0))
            throw input_error("channel: detection window must be positive");
        if (eta_detection < 0.0 || eta_detection > 1.0)
            throw input_error("channel: detection efficiency must lie in [0,1]");
        if (eta_detection == 0.0 && !(target_snr > 0.0))
            throw input_error("channel: target SNR must be positive when the detection "
                              "efficiency is calibrated");
        if (efficiency_h < 0.0 || efficiency_h > 1.0 || efficiency_v < 0.0 ||
            efficiency_v > 1.0)
            throw input_error("channel: rail efficiencies must lie in [0,1]");
    }
};

struct TomographyScenario {
    NoisePolicy policy = NoisePolicy::none;
    std::uint64_t resamples = 200;
    double classical_bound_comparator = 0.842;
    std::uint64_t max_iterations = 100000;
    double rel_tol = 1e-10;

    void validate() const {
        if (resamples < 100)
            throw input_error("tomography: fewer than 100 resamples gives an unreliable spread");
        if (!(rel_tol > 0.0))
            throw input_error("tomography: likelihood tolerance must be positive");
        if (classical_bound_comparator <= 0.0 || classical_bound_comparator >= 1.0)
            throw input_error("tomography: comparator bound must lie in (0,1)");
    }

    MleOptions options() const {
        MleOptions o;
        o.max_iterations = static_cast<std::size_t>(max_iterations);
        o.rel_tol = rel_tol;
        return o;
    }
};

// Measured end-to-end efficiencies used to pin the lumped decoherence
// factor of the echo model.
struct CalibrationAnchors {
    double measured_efficiency_h = 0.0481;
    double measured_efficiency_v = 0.0531;

    void validate() const {
        if (measured_efficiency_h <= 0.0 || measured_efficiency_h >= 1.0 ||
            measured_efficiency_v <= 0.0 || measured_efficiency_v >= 1.0)
            throw input_error("calibration: measured efficiencies must lie in (0,1)");
    }
};

struct ScenarioConfig {
    HyperfineStructure structure{};
    TransitionTable table = default_transition_table();
    MediumParams medium{};
    TimingPlan timing{};
    FrequencyPlan plan{};
    FilterParams filter{};
    InitializationConfig init{};
    SequenceConfig sequence{};
    SpectroscopyConfig spectroscopy{};
    ChannelScenario channel{};
    TomographyScenario tomography{};
    CalibrationAnchors calibration{};
    std::uint64_t seed = 42;
    std::uint64_t trials = 30000;
    int threads = 0;
    std::string out_dir = "out";

    SpectrumModel spectrum_model() const {
        SpectrumModel m;
        m.structure = structure;
        m.table = table;
        m.medium = medium;
        m.signal = plan.signal;
        return m;
    }

    DetuningGrid spectro_grid() const {
        return make_grid(spectroscopy.grid_min_mhz, spectroscopy.grid_max_mhz,
                         spectroscopy.grid_spacing_mhz);
    }

    double calibrated_decoherence_factor() const {
        return calibrate_decoherence_factor(
            {{medium.peak_depth_h, calibration.measured_efficiency_h},
             {medium.peak_depth_v, calibration.measured_efficiency_v}},
            sequence.transfer_efficiency);
    }

    void validate() const {
        structure.validate();
        table.validate();
        medium.validate();
        timing.validate();
        plan.validate(structure);
        filter.validate();
        init.validate();
        sequence.validate();
        spectroscopy.validate();
        channel.validate();
        tomography.validate();
        calibration.validate();
        if (trials == 0)
            throw input_error("scenario: trial count must be positive");
        if (threads < 0)
            throw input_error("scenario: thread count must be nonnegative");
        if (out_dir.empty())
            throw input_error("scenario: output directory must not be empty");
    }
};

// All defaults in one place: the measured level structure, branching
// table, depths, timings, photon numbers and calibration anchors of the
// storage experiment this toolkit models.
inline ScenarioConfig default_scenario() {
    ScenarioConfig s;
    s.sequence.decoherence_factor = s.calibrated_decoherence_factor();
    return s;
}

namespace detail {

inline std::string spin_labels_to_string(const std::array<SpinLabel, 3>& order) {
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i)
            out += " ";
        out += to_string(order[i]);
    }
    return out;
}

inline std::array<SpinLabel, 3> parse_spin_order(const std::string& raw, const std::string& where) {
    std::istringstream ss(raw);
    std::vector<SpinLabel> labels;
    std::string tok;
    while (ss >> tok)
        labels.push_back(parse_spin_label(tok));
    if (labels.size() != 3)
        throw config_error(where + ": expected three spin labels, got '" + raw + "'");
    return {labels[0], labels[1], labels[2]};
}

inline std::string transition_to_string(const TransitionRef& t) {
    return std::string(to_string(t.ground)) + " " + to_string(t.excited);
}

inline TransitionRef parse_transition(const std::string& raw, const std::string& where) {
    std::istringstream ss(raw);
    std::string g, e;
    if (!(ss >> g >> e))
        throw config_error(where + ": expected 'ground excited' spin labels, got '" + raw + "'");
    std::string extra;
    if (ss >> extra)
        throw config_error(where + ": expected exactly two spin labels, got '" + raw + "'");
    return TransitionRef{parse_spin_label(g), parse_spin_label(e)};
}

template <std::size_t N>
std::array<double, N> to_fixed(const std::vector<double>& v, const std::string& where) {
    if (v.size() != N)
        throw config_error(where + ": expected " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = v[i];
    return out;
}

inline std::string doubles_to_string(const double* v, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i)
            out += " ";
        out += format_double(v[i]);
    }
    return out;
}

} // namespace detail

// Applies a parsed config file over the defaults. Unknown keys are
// rejected, malformed values are reported with file and line, and semantic
// failures are rethrown as config errors naming the section.
inline ScenarioConfig load_scenario(const ConfigFile& cfg) {
    ScenarioConfig s = default_scenario();

    auto section = [&](const char* name, auto&& apply) {
        try {
            apply();
        } catch (const config_error& e) {
            // Getter failures already carry file and line; leave those alone.
            const std::string msg = e.what();
            if (msg.rfind(cfg.source(), 0) == 0)
                throw;
            throw config_error(cfg.source() + ": [" + name + "]: " + msg);
        } catch (const input_error& e) {
            throw config_error(cfg.source() + ": [" + name + "]: " + e.what());
        }
    };

    section("scenario", [&] {
        s.seed = cfg.get_uint64("scenario.seed", s.seed);
        s.trials = cfg.get_uint64("scenario.trials", s.trials);
        s.threads = cfg.get_int("scenario.threads", s.threads);
        s.out_dir = cfg.get_string("scenario.out_dir", s.out_dir);
    });

    section("hyperfine_structure", [&] {
        auto& st = s.structure;
        st.ground_gaps_mhz = detail::to_fixed<2>(
            cfg.get_doubles("hyperfine_structure.ground_gaps_mhz",
                            {st.ground_gaps_mhz[0], st.ground_gaps_mhz[1]}),
            cfg.describe("hyperfine_structure.ground_gaps_mhz"));
        st.excited_gaps_mhz = detail::to_fixed<2>(
            cfg.get_doubles("hyperfine_structure.excited_gaps_mhz",
                            {st.excited_gaps_mhz[0], st.excited_gaps_mhz[1]}),
            cfg.describe("hyperfine_structure.excited_gaps_mhz"));
        st.ground_order = detail::parse_spin_order(
            cfg.get_string("hyperfine_structure.ground_order",
                           detail::spin_labels_to_string(st.ground_order)),
            cfg.describe("hyperfine_structure.ground_order"));
        st.excited_order = detail::parse_spin_order(
            cfg.get_string("hyperfine_structure.excited_order",
                           detail::spin_labels_to_string(st.excited_order)),
            cfg.describe("hyperfine_structure.excited_order"));
        st.validate();
    });

    section("transition_table", [&] {
        const char* keys[3] = {"transition_table.row_1_2", "transition_table.row_3_2",
                               "transition_table.row_5_2"};
        for (int g = 0; g < 3; ++g) {
            const auto& row = s.table.gamma[static_cast<std::size_t>(g)];
            const auto parsed = detail::to_fixed<3>(
                cfg.get_doubles(keys[g], {row[0], row[1], row[2]}), cfg.describe(keys[g]));
            s.table.gamma[static_cast<std::size_t>(g)] = parsed;
        }
        s.table.validate();
    });

    section("medium_params", [&] {
        auto& m = s.medium;
        m.length_mm = cfg.get_double("medium_params.length_mm", m.length_mm);
        m.inhomogeneous_fwhm_ghz =
            cfg.get_double("medium_params.inhomogeneous_fwhm_ghz", m.inhomogeneous_fwhm_ghz);
        m.peak_depth_h = cfg.get_double("medium_params.peak_depth_h", m.peak_depth_h);
        m.peak_depth_v = cfg.get_double("medium_params.peak_depth_v", m.peak_depth_v);
        m.homogeneous_linewidth_mhz = cfg.get_double("medium_params.homogeneous_linewidth_mhz",
                                                     m.homogeneous_linewidth_mhz);
        m.validate();
    });

    section("timing_plan", [&] {
        auto& t = s.timing;
        t.t_us = detail::to_fixed<5>(
            cfg.get_doubles("timing_plan.pulse_times_us",
                            {t.t_us[0], t.t_us[1], t.t_us[2], t.t_us[3], t.t_us[4]}),
            cfg.describe("timing_plan.pulse_times_us"));
        t.input_fwhm_us = cfg.get_double("timing_plan.input_fwhm_us", t.input_fwhm_us);
        t.control_duration_us = detail::to_fixed<2>(
            cfg.get_doubles("timing_plan.control_durations_us",
                            {t.control_duration_us[0], t.control_duration_us[1]}),
            cfg.describe("timing_plan.control_durations_us"));
        t.control_chirp_mhz = detail::to_fixed<2>(
            cfg.get_doubles("timing_plan.control_chirps_mhz",
                            {t.control_chirp_mhz[0], t.control_chirp_mhz[1]}),
            cfg.describe("timing_plan.control_chirps_mhz"));
        t.detection_window_us =
            cfg.get_double("timing_plan.detection_window_us", t.detection_window_us);
        t.validate();
    });

    section("frequency_plan", [&] {
        auto& p = s.plan;
        p.signal = detail::parse_transition(
            cfg.get_string("frequency_plan.signal", detail::transition_to_string(p.signal)),
            cfg.describe("frequency_plan.signal"));
        p.control1 = detail::parse_transition(
            cfg.get_string("frequency_plan.control1", detail::transition_to_string(p.control1)),
            cfg.describe("frequency_plan.control1"));
        p.control2 = detail::parse_transition(
            cfg.get_string("frequency_plan.control2", detail::transition_to_string(p.control2)),
            cfg.describe("frequency_plan.control2"));
        p.back_pump = detail::parse_transition(
            cfg.get_string("frequency_plan.back_pump", detail::transition_to_string(p.back_pump)),
            cfg.describe("frequency_plan.back_pump"));
        p.reference_thz = cfg.get_double("frequency_plan.reference_thz", p.reference_thz);
        p.validate(s.structure);
    });

    section("filter_params", [&] {
        auto& f = s.filter;
        f.depth = cfg.get_double("filter_params.depth", f.depth);
        f.hole_center_mhz = cfg.get_double("filter_params.hole_center_mhz", f.hole_center_mhz);
        f.hole_width_mhz = cfg.get_double("filter_params.hole_width_mhz", f.hole_width_mhz);
        f.validate();
    });

    section("initialization", [&] {
        auto& i = s.init;
        i.clean_bandwidth_mhz =
            cfg.get_double("initialization.clean_bandwidth_mhz", i.clean_bandwidth_mhz);
        i.polarize_bandwidth_mhz =
            cfg.get_double("initialization.polarize_bandwidth_mhz", i.polarize_bandwidth_mhz);
        i.back_pump_bandwidth_mhz =
            cfg.get_double("initialization.back_pump_bandwidth_mhz", i.back_pump_bandwidth_mhz);
        i.back_pump_extra_broadening_mhz =
            cfg.get_double("initialization.back_pump_extra_broadening_mhz",
                           i.back_pump_extra_broadening_mhz);
        i.keep_clean_bandwidth_mhz =
            cfg.get_double("initialization.keep_clean_bandwidth_mhz", i.keep_clean_bandwidth_mhz);
        i.back_pump_fluence =
            cfg.get_double("initialization.back_pump_fluence", i.back_pump_fluence);
        i.validate();
    });

    section("calibration", [&] {
        s.calibration.measured_efficiency_h = cfg.get_double(
            "calibration.measured_efficiency_h", s.calibration.measured_efficiency_h);
        s.calibration.measured_efficiency_v = cfg.get_double(
            "calibration.measured_efficiency_v", s.calibration.measured_efficiency_v);
        s.calibration.validate();
    });

    section("sequence", [&] {
        auto& q = s.sequence;
        q.transfer_efficiency = cfg.get_double("sequence.transfer_efficiency",
                                               q.transfer_efficiency);
        // The default lumped factor depends on the anchors and eta_t, so it
        // is recomputed here; an explicit value still wins.
        q.decoherence_factor = cfg.get_double("sequence.decoherence_factor",
                                              s.calibrated_decoherence_factor());
        q.suppression = cfg.get_double("sequence.suppression", q.suppression);
        q.spin_detuning_mhz = cfg.get_double("sequence.spin_detuning_mhz", q.spin_detuning_mhz);
        q.rates.optical_per_us =
            cfg.get_double("sequence.optical_decoherence_per_us", q.rates.optical_per_us);
        q.rates.spin_per_us =
            cfg.get_double("sequence.spin_decoherence_per_us", q.rates.spin_per_us);
        q.grid_span_mhz = cfg.get_double("sequence.grid_span_mhz", q.grid_span_mhz);
        q.grid_spacing_mhz = cfg.get_double("sequence.grid_spacing_mhz", q.grid_spacing_mhz);
        q.validate();
    });

    section("spectroscopy", [&] {
        auto& sp = s.spectroscopy;
        sp.grid_min_mhz = cfg.get_double("spectroscopy.grid_min_mhz", sp.grid_min_mhz);
        sp.grid_max_mhz = cfg.get_double("spectroscopy.grid_max_mhz", sp.grid_max_mhz);
        sp.grid_spacing_mhz = cfg.get_double("spectroscopy.grid_spacing_mhz", sp.grid_spacing_mhz);
        sp.tone_bandwidth_mhz =
            cfg.get_double("spectroscopy.tone_bandwidth_mhz", sp.tone_bandwidth_mhz);
        sp.superadditivity_threshold = cfg.get_double("spectroscopy.superadditivity_threshold",
                                                      sp.superadditivity_threshold);
        sp.feature_min_delta =
            cfg.get_double("spectroscopy.feature_min_delta", sp.feature_min_delta);
        sp.sweep_bandwidth_mhz =
            cfg.get_double("spectroscopy.sweep_bandwidth_mhz", sp.sweep_bandwidth_mhz);
        sp.narrow_bandwidth_mhz =
            cfg.get_double("spectroscopy.narrow_bandwidth_mhz", sp.narrow_bandwidth_mhz);
        sp.measured_ground = parse_spin_label(cfg.get_string(
            "spectroscopy.measured_ground", to_string(sp.measured_ground)));
        sp.validate();
    });

    section("channel_params", [&] {
        auto& c = s.channel;
        c.mean_photons = cfg.get_double("channel_params.mean_photons", c.mean_photons);
        c.noise_floor = cfg.get_double("channel_params.noise_floor", c.noise_floor);
        c.detection_window_us =
            cfg.get_double("channel_params.detection_window_us", c.detection_window_us);
        c.target_snr = cfg.get_double("channel_params.target_snr", c.target_snr);
        c.eta_detection = cfg.get_double("channel_params.eta_detection", c.eta_detection);
        c.efficiency_h = cfg.get_double("channel_params.efficiency_h", c.efficiency_h);
        c.efficiency_v = cfg.get_double("channel_params.efficiency_v", c.efficiency_v);
        c.validate();
    });

    section("tomography", [&] {
        auto& t = s.tomography;
        t.policy = noise_policy_from_string(
            cfg.get_string("tomography.noise_policy", to_string(t.policy)));
        t.resamples = cfg.get_uint64("tomography.resamples", t.resamples);
        t.classical_bound_comparator = cfg.get_double("tomography.classical_bound_comparator",
                                                      t.classical_bound_comparator);
        t.max_iterations = cfg.get_uint64("tomography.max_iterations", t.max_iterations);
        t.rel_tol = cfg.get_double("tomography.rel_tol", t.rel_tol);
        t.validate();
    });

    cfg.reject_unknown_keys();

    try {
        s.validate();
    } catch (const input_error& e) {
        throw config_error(cfg.source() + ": " + e.what());
    }
    return s;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    return load_scenario(ConfigFile::parse_file(path));
}

// Canonical serialization: every value written explicitly, so the file
// reloads to the identical scenario and its hash is stable.
inline std::string scenario_to_text(const ScenarioConfig& s) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "seed = " << s.seed << "\n";
    out << "trials = " << s.trials << "\n";
    out << "threads = " << s.threads << "\n";
    out << "out_dir = " << s.out_dir << "\n";
    out << "\n[hyperfine_structure]\n";
    out << "ground_gaps_mhz = " << detail::doubles_to_string(s.structure.ground_gaps_mhz.data(), 2)
        << "\n";
    out << "excited_gaps_mhz = "
        << detail::doubles_to_string(s.structure.excited_gaps_mhz.data(), 2) << "\n";
    out << "ground_order = " << detail::spin_labels_to_string(s.structure.ground_order) << "\n";
    out << "excited_order = " << detail::spin_labels_to_string(s.structure.excited_order) << "\n";
    out << "\n[transition_table]\n";
    out << "row_1_2 = " << detail::doubles_to_string(s.table.gamma[0].data(), 3) << "\n";
    out << "row_3_2 = " << detail::doubles_to_string(s.table.gamma[1].data(), 3) << "\n";
    out << "row_5_2 = " << detail::doubles_to_string(s.table.gamma[2].data(), 3) << "\n";
    out << "\n[medium_params]\n";
    out << "length_mm = " << format_double(s.medium.length_mm) << "\n";
    out << "inhomogeneous_fwhm_ghz = " << format_double(s.medium.inhomogeneous_fwhm_ghz) << "\n";
    out << "peak_depth_h = " << format_double(s.medium.peak_depth_h) << "\n";
    out << "peak_depth_v = " << format_double(s.medium.peak_depth_v) << "\n";
    out << "homogeneous_linewidth_mhz = " << format_double(s.medium.homogeneous_linewidth_mhz)
        << "\n";
    out << "\n[timing_plan]\n";
    out << "pulse_times_us = " << detail::doubles_to_string(s.timing.t_us.data(), 5) << "\n";
    out << "input_fwhm_us = " << format_double(s.timing.input_fwhm_us) << "\n";
    out << "control_durations_us = "
        << detail::doubles_to_string(s.timing.control_duration_us.data(), 2) << "\n";
    out << "control_chirps_mhz = "
        << detail::doubles_to_string(s.timing.control_chirp_mhz.data(), 2) << "\n";
    out << "detection_window_us = " << format_double(s.timing.detection_window_us) << "\n";
    out << "\n[frequency_plan]\n";
    out << "signal = " << detail::transition_to_string(s.plan.signal) << "\n";
    out << "control1 = " << detail::transition_to_string(s.plan.control1) << "\n";
    out << "control2 = " << detail::transition_to_string(s.plan.control2) << "\n";
    out << "back_pump = " << detail::transition_to_string(s.plan.back_pump) << "\n";
    out << "reference_thz = " << format_double(s.plan.reference_thz) << "\n";
    out << "\n[filter_params]\n";
    out << "depth = " << format_double(s.filter.depth) << "\n";
    out << "hole_center_mhz = " << format_double(s.filter.hole_center_mhz) << "\n";
    out << "hole_width_mhz = " << format_double(s.filter.hole_width_mhz) << "\n";
    out << "\n[initialization]\n";
    out << "clean_bandwidth_mhz = " << format_double(s.init.clean_bandwidth_mhz) << "\n";
    out << "polarize_bandwidth_mhz = " << format_double(s.init.polarize_bandwidth_mhz) << "\n";
    out << "back_pump_bandwidth_mhz = " << format_double(s.init.back_pump_bandwidth_mhz) << "\n";
    out << "back_pump_extra_broadening_mhz = "
        << format_double(s.init.back_pump_extra_broadening_mhz) << "\n";
    out << "keep_clean_bandwidth_mhz = " << format_double(s.init.keep_clean_bandwidth_mhz)
        << "\n";
    out << "back_pump_fluence = " << format_double(s.init.back_pump_fluence) << "\n";
    out << "\n[sequence]\n";
    out << "transfer_efficiency = " << format_double(s.sequence.transfer_efficiency) << "\n";
    out << "decoherence_factor = " << format_double(s.sequence.decoherence_factor) << "\n";
    out << "suppression = " << format_double(s.sequence.suppression) << "\n";
    out << "spin_detuning_mhz = " << format_double(s.sequence.spin_detuning_mhz) << "\n";
    out << "optical_decoherence_per_us = " << format_double(s.sequence.rates.optical_per_us)
        << "\n";
    out << "spin_decoherence_per_us = " << format_double(s.sequence.rates.spin_per_us) << "\n";
    out << "grid_span_mhz = " << format_double(s.sequence.grid_span_mhz) << "\n";
    out << "grid_spacing_mhz = " << format_double(s.sequence.grid_spacing_mhz) << "\n";
    out << "\n[spectroscopy]\n";
    out << "grid_min_mhz = " << format_double(s.spectroscopy.grid_min_mhz) << "\n";
    out << "grid_max_mhz = " << format_double(s.spectroscopy.grid_max_mhz) << "\n";
    out << "grid_spacing_mhz = " << format_double(s.spectroscopy.grid_spacing_mhz) << "\n";
    out << "tone_bandwidth_mhz = " << format_double(s.spectroscopy.tone_bandwidth_mhz) << "\n";
    out << "superadditivity_threshold = "
        << format_double(s.spectroscopy.superadditivity_threshold) << "\n";
    out << "feature_min_delta = " << format_double(s.spectroscopy.feature_min_delta) << "\n";
    out << "sweep_bandwidth_mhz = " << format_double(s.spectroscopy.sweep_bandwidth_mhz) << "\n";
    out << "narrow_bandwidth_mhz = " << format_double(s.spectroscopy.narrow_bandwidth_mhz)
        << "\n";
    out << "measured_ground = " << to_string(s.spectroscopy.measured_ground) << "\n";
    out << "\n[channel_params]\n";
    out << "mean_photons = " << format_double(s.channel.mean_photons) << "\n";
    out << "noise_floor = " << format_double(s.channel.noise_floor) << "\n";
    out << "detection_window_us = " << format_double(s.channel.detection_window_us) << "\n";
    out << "target_snr = " << format_double(s.channel.target_snr) << "\n";
    out << "eta_detection = " << format_double(s.channel.eta_detection) << "\n";
    out << "efficiency_h = " << format_double(s.channel.efficiency_h) << "\n";
    out << "efficiency_v = " << format_double(s.channel.efficiency_v) << "\n";
    out << "\n[calibration]\n";
    out << "measured_efficiency_h = " << format_double(s.calibration.measured_efficiency_h)
        << "\n";
    out << "measured_efficiency_v = " << format_double(s.calibration.measured_efficiency_v)
        << "\n";
    out << "\n[tomography]\n";
    out << "noise_policy = " << to_string(s.tomography.policy) << "\n";
    out << "resamples = " << s.tomography.resamples << "\n";
    out << "classical_bound_comparator = "
        << format_double(s.tomography.classical_bound_comparator) << "\n";
    out << "max_iterations = " << s.tomography.max_iterations << "\n";
    out << "rel_tol = " << format_double(s.tomography.rel_tol) << "\n";
    return out.str();
}

// FNV-1a over the canonical text: changes whenever any setting changes.
inline std::string scenario_hash(const ScenarioConfig& s) {
    const std::string text = scenario_to_text(s);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace nlpesim
