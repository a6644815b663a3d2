#pragma once

#include <array>
#include <cmath>

#include "nlpesim/core/levels.hpp"
#include "nlpesim/core/medium.hpp"
#include "nlpesim/core/transition_table.hpp"
#include "nlpesim/spectro/pump.hpp"
#include "nlpesim/spectro/spectrum.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Three-step isolation of a single ion class and measurement of one row of
// relative transition strengths. The three pump frequencies sit on
// transitions where two ground levels share one excited level and the third
// ground level couples to a different excited level:
//   w0 on (5/2 g, 5/2 e), w1 on (3/2 g, 5/2 e), w2 on (1/2 g, 3/2 e).
// Step 1 sweeps all three (class cleaning: only the class resonant with all
// of them keeps population near the probe region). Step 2 sweeps two of
// them to polarize the class into one ground level. Step 3 burns a narrow
// hole on the polarized level and sweeps the partner level empty, so the
// transferred population stacks up in the measured level; its three
// antiholes grow by the branching ratios of that ground level's row.
struct StrengthsConfig {
    SpinLabel measured_ground = SpinLabel::three_half;
    double sweep_bandwidth_mhz = 4.0;
    double narrow_bandwidth_mhz = 0.2;
    Polarization pol = Polarization::H;
    int pump_threads = 1;
};

struct StrengthsReport {
    SpinLabel measured_ground = SpinLabel::three_half;
    // Antihole centers relative to the w0 pump, one per excited level.
    std::array<double, 3> position_rel_w0_mhz{};
    std::array<double, 3> delta_d{};
    // delta_d normalized to unit sum; comparable to a branching-table row.
    std::array<double, 3> relative_strength{};
    double w0_offset_mhz = 0.0;
};

inline StrengthsReport measure_relative_strengths(const SpectrumModel& model,
                                                  const DetuningGrid& grid,
                                                  const StrengthsConfig& cfg) {
    model.validate();
    grid.validate();

    const auto tf = [&](SpinLabel g, SpinLabel e) {
        return transition_frequency_mhz(model.structure, g, e);
    };
    const double w0 = tf(SpinLabel::five_half, SpinLabel::five_half);
    const double w1 = tf(SpinLabel::three_half, SpinLabel::five_half);
    const double w2 = tf(SpinLabel::one_half, SpinLabel::three_half);
    const std::array<double, 3> tone_of = {w2, w1, w0}; // indexed by ground label

    // The class is polarized into one level, then pumped out of it through
    // a shared excited state while the non-measured partner is swept empty.
    const SpinLabel measured = cfg.measured_ground;
    const SpinLabel polarized =
        (measured == SpinLabel::one_half) ? SpinLabel::three_half : SpinLabel::one_half;
    SpinLabel partner = SpinLabel::one_half;
    for (int g = 0; g < 3; ++g) {
        const auto l = static_cast<SpinLabel>(g);
        if (l != measured && l != polarized)
            partner = l;
    }

    auto sweep = [&](double center) { return PumpTone{center, cfg.sweep_bandwidth_mhz, 1.0, 0.0}; };

    PumpSchedule clean;
    clean.tones = {sweep(w0), sweep(w1), sweep(w2)};
    PumpSchedule polarize;
    polarize.tones = {sweep(tone_of[static_cast<std::size_t>(measured)]),
                      sweep(tone_of[static_cast<std::size_t>(partner)])};
    PumpSchedule transfer;
    transfer.tones = {
        PumpTone{tone_of[static_cast<std::size_t>(polarized)], cfg.narrow_bandwidth_mhz, 1.0, 0.0},
        sweep(tone_of[static_cast<std::size_t>(partner)])};

    auto state = PopulationState::equal(grid);
    state = pump_populations(model.structure, model.table, clean, model.medium, state,
                             cfg.pump_threads);
    state = pump_populations(model.structure, model.table, polarize, model.medium, state,
                             cfg.pump_threads);
    const auto after_polarization = state;
    state = pump_populations(model.structure, model.table, transfer, model.medium, state,
                             cfg.pump_threads);

    StrengthsReport report;
    report.measured_ground = measured;
    report.w0_offset_mhz = w0;
    double total = 0.0;
    for (int e = 0; e < 3; ++e) {
        const double pos = tf(measured, static_cast<SpinLabel>(e));
        report.position_rel_w0_mhz[static_cast<std::size_t>(e)] = pos - w0;
        const double dd = depth_at(model, state, cfg.pol, pos) -
                          depth_at(model, after_polarization, cfg.pol, pos);
        report.delta_d[static_cast<std::size_t>(e)] = dd;
        total += dd;
    }
    if (!(total > 0.0))
        throw data_error("strengths: no enhanced absorption found at the measured transitions");
    for (int e = 0; e < 3; ++e)
        report.relative_strength[static_cast<std::size_t>(e)] =
            report.delta_d[static_cast<std::size_t>(e)] / total;
    return report;
}

} // namespace nlpesim
