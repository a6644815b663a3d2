#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nlpesim/core/medium.hpp"
#include "nlpesim/core/timing.hpp"
#include "nlpesim/init/prepare.hpp"
#include "nlpesim/nlpe/efficiency.hpp"
#include "nlpesim/nlpe/ensemble.hpp"
#include "nlpesim/nlpe/pulse.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/math.hpp"

namespace nlpesim {

enum class Geometry { counter_propagating, co_propagating };

inline const char* to_string(Geometry g) {
    return g == Geometry::counter_propagating ? "counter-propagating" : "co-propagating";
}

struct EchoRecord {
    double time_us = 0.0;
    // Field amplitude relative to the absorbed input, before the
    // phase-matching factor.
    double relative_amplitude = 0.0;
    double efficiency = 0.0;
    bool phase_matched = false;
    int sig_quanta = 0;  // radiating-element wavevector ledger
    int ctrl_quanta = 0;
    std::string transition;
};

struct SequenceConfig {
    double transfer_efficiency = 1.0; // eta_t per control pulse
    double decoherence_factor = 1.0;  // lumped c of the efficiency model
    double suppression = 0.0;         // field factor for mismatched echoes
    Geometry geometry = Geometry::counter_propagating;
    DecoherenceRates rates{};
    double spin_detuning_mhz = 0.0;
    double grid_span_mhz = 3.0;
    double grid_spacing_mhz = 0.01;

    void validate() const {
        if (transfer_efficiency < 0.0 || transfer_efficiency > 1.0)
            throw config_error("sequence: transfer efficiency must lie in [0,1]");
        if (decoherence_factor < 0.0 || decoherence_factor > 1.0)
            throw config_error("sequence: decoherence factor must lie in [0,1]");
        if (suppression < 0.0 || suppression > 1.0)
            throw config_error("sequence: suppression factor must lie in [0,1]");
        if (!(grid_span_mhz > 0.0) || !(grid_spacing_mhz > 0.0))
            throw config_error("sequence: ensemble grid must have positive span and spacing");
    }
};

struct TracePoint {
    double time_us = 0.0;
    double intensity = 0.0;
};

struct SequenceReport {
    std::vector<EchoRecord> echoes;
    std::vector<TracePoint> trace;
    double absorbed_norm = 0.0;
    double peak_depth = 0.0;
};

namespace detail {

struct EchoCandidate {
    double time_us;
    int sig_quanta;
    int ctrl_quanta;
    QLevel lower;
    QLevel upper;
    std::complex<double> amp;
};

// Rephasing instants of every optical term in (t_now, t_to]: the symbolic
// phase A + s*(t - t_now) crosses zero at t = t_now - s*A, bin-independent.
// Amplitudes pick up the optical decay over the remaining wait and the
// phase the spin detuning accrued while the pathway sat in a spin coherence.
inline void collect_echoes(const EnsembleState& state, double t_to,
                           const DecoherenceRates& rates, std::vector<EchoCandidate>& out) {
    for (const auto& bin : state.terms)
        for (const auto& term : bin) {
            const int s = term.phase_sign();
            if (s == 0)
                continue;
            const double t_star = state.time_us - s * term.optical_interval_us;
            if (t_star <= state.time_us + 1e-12 || t_star > t_to + 1e-12)
                continue;
            EchoCandidate c;
            c.time_us = t_star;
            // The radiating element has the excited level on the ket side;
            // stored ground-ket terms radiate through their conjugate.
            const bool conjugated = !is_excited(term.ket);
            c.sig_quanta = conjugated ? -term.sig_quanta : term.sig_quanta;
            c.ctrl_quanta = conjugated ? -term.ctrl_quanta : term.ctrl_quanta;
            const double spin_phase =
                2.0 * pi * state.spin_detuning_mhz * term.spin_interval_us;
            std::complex<double> amp =
                term.amp * std::polar(std::exp(-rates.optical_per_us * (t_star - state.time_us)),
                                      -spin_phase);
            c.amp = conjugated ? std::conj(amp) : amp;
            c.lower = is_excited(term.ket) ? term.bra : term.ket;
            c.upper = is_excited(term.ket) ? term.ket : term.bra;
            out.push_back(c);
        }
}

} // namespace nlpesim::detail

// Runs the pulse sequence on the prepared medium and reports every
// rephasing event with its wavevector ledger. The input pulse must come
// first; an echo is phase-matched when its radiating ledger carries exactly
// the signal quantum (in the co-propagating diagnostic the two ledger
// entries merge, since the control direction coincides with the signal).
inline SequenceReport run_sequence(const PreparedMedium& prepared, Polarization pol,
                                   const HyperfineStructure& structure, const FrequencyPlan& plan,
                                   const TimingPlan& timing, std::vector<PulseSpec> pulses,
                                   const SequenceConfig& cfg) {
    cfg.validate();
    timing.validate();
    if (pulses.empty() || pulses.front().kind != PulseKind::gaussian_input)
        throw config_error("sequence: the pulse list must start with the input pulse");
    if (pulses.size() < 2)
        throw config_error("sequence: control pulses are missing");
    for (std::size_t i = 1; i < pulses.size(); ++i) {
        if (pulses[i].kind != PulseKind::sech_chirp)
            throw config_error("sequence: only the first pulse can be the input");
        if (pulses[i].time_us < pulses[i - 1].time_us)
            throw config_error("sequence: pulses must be time-ordered");
    }

    const FourLevelPlan flp = four_level_plan(structure, plan);
    const DetuningGrid grid =
        make_grid(-cfg.grid_span_mhz, cfg.grid_span_mhz, cfg.grid_spacing_mhz);

    // Seed the signal-level population from the prepared medium.
    EnsembleState state = EnsembleState::empty(grid);
    state.spin_detuning_mhz = cfg.spin_detuning_mhz;
    state.time_us = pulses.front().time_us;
    const auto g0_index = static_cast<std::size_t>(SpinLabel::one_half);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double occ =
            prepared.state.occupation[prepared.state.grid.index_near(grid.value(i))][g0_index];
        if (occ > 1e-14) {
            PathwayTerm t;
            t.ket = QLevel::g0;
            t.bra = QLevel::g0;
            t.amp = occ;
            state.terms[i].push_back(t);
        }
    }

    state = apply_pulse(state, pulses.front(), flp, cfg.transfer_efficiency);
    double absorbed = 0.0;
    for (const auto& bin : state.terms)
        for (const auto& term : bin)
            if (term.optical())
                absorbed += std::abs(term.amp);
    if (!(absorbed > 0.0))
        throw data_error("sequence: the input is not absorbed anywhere on the prepared peak");

    std::vector<detail::EchoCandidate> candidates;
    for (std::size_t i = 1; i < pulses.size(); ++i) {
        detail::collect_echoes(state, pulses[i].time_us, cfg.rates, candidates);
        state = free_evolve(std::move(state), pulses[i].time_us - state.time_us, cfg.rates);
        state = apply_pulse(std::move(state), pulses[i], flp, cfg.transfer_efficiency);
    }
    const double horizon = state.time_us + 2.0 * (timing.t_us.back() + timing.input_fwhm_us) + 10.0;
    detail::collect_echoes(state, horizon, cfg.rates, candidates);

    // Group coincident rephasings with equal ledgers and transition.
    std::sort(candidates.begin(), candidates.end(),
              [](const detail::EchoCandidate& a, const detail::EchoCandidate& b) {
                  if (a.time_us != b.time_us)
                      return a.time_us < b.time_us;
                  if (a.sig_quanta != b.sig_quanta)
                      return a.sig_quanta < b.sig_quanta;
                  return a.ctrl_quanta < b.ctrl_quanta;
              });

    SequenceReport report;
    report.absorbed_norm = absorbed;
    report.peak_depth = prepared.peak(pol).depth;

    std::size_t i = 0;
    while (i < candidates.size()) {
        std::size_t j = i;
        std::complex<double> field(0.0, 0.0);
        while (j < candidates.size() &&
               std::abs(candidates[j].time_us - candidates[i].time_us) < 1e-9 &&
               candidates[j].sig_quanta == candidates[i].sig_quanta &&
               candidates[j].ctrl_quanta == candidates[i].ctrl_quanta &&
               candidates[j].lower == candidates[i].lower &&
               candidates[j].upper == candidates[i].upper) {
            field += candidates[j].amp;
            ++j;
        }
        EchoRecord rec;
        rec.time_us = candidates[i].time_us;
        rec.sig_quanta = candidates[i].sig_quanta;
        rec.ctrl_quanta = candidates[i].ctrl_quanta;
        rec.transition = std::string(to_string(candidates[i].lower)) + "-" +
                         to_string(candidates[i].upper);
        rec.relative_amplitude = std::abs(field) / absorbed;
        const bool matched = cfg.geometry == Geometry::co_propagating
                                 ? (rec.sig_quanta + rec.ctrl_quanta == 1)
                                 : (rec.sig_quanta == 1 && rec.ctrl_quanta == 0);
        rec.phase_matched = matched;
        const double pm_factor = matched ? 1.0 : cfg.suppression;
        const double a = rec.relative_amplitude * pm_factor;
        rec.efficiency = a * a * echo_efficiency(report.peak_depth, 1.0, cfg.decoherence_factor);
        if (rec.relative_amplitude > 1e-12 || matched)
            report.echoes.push_back(rec);
        i = j;
    }

    return report;
}

// Intensity-vs-time trace: the transmitted input plus every reported echo,
// each with the temporal profile implied by its spectral amplitude content.
inline std::vector<TracePoint> synthesize_trace(const SequenceReport& report,
                                                const TimingPlan& timing, double dt_us = 0.05) {
    std::vector<TracePoint> trace;
    const double t_end = timing.t_us.back() + 4.0 * (timing.t_us.back() - timing.t_us[3]) + 5.0;
    const double sigma = timing.input_fwhm_us / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    for (double t = -4.0 * timing.input_fwhm_us; t <= t_end; t += dt_us) {
        double intensity = std::exp(-report.peak_depth) *
                           std::exp(-(t - timing.t_us[0]) * (t - timing.t_us[0]) /
                                    (2.0 * sigma * sigma));
        for (const auto& e : report.echoes) {
            const double a = e.efficiency;
            intensity +=
                a * std::exp(-(t - e.time_us) * (t - e.time_us) / (2.0 * sigma * sigma));
        }
        trace.push_back(TracePoint{t, intensity});
    }
    return trace;
}

} // namespace nlpesim
