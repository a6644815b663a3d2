#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nlpesim/core/levels.hpp"
#include "nlpesim/core/medium.hpp"
#include "nlpesim/core/transition_table.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/parallel.hpp"

namespace nlpesim {

// Uniform grid over inhomogeneous detuning (offsets from the reference
// line), shared by population states and spectra.
struct DetuningGrid {
    double min_mhz = -280.0;
    double spacing_mhz = 0.01;
    std::size_t count = 56001;

    double value(std::size_t i) const { return min_mhz + spacing_mhz * static_cast<double>(i); }
    double max_mhz() const { return value(count - 1); }

    std::size_t index_near(double x) const {
        if (x < min_mhz - 0.5 * spacing_mhz || x > max_mhz() + 0.5 * spacing_mhz)
            throw input_error("grid: requested frequency lies outside the simulated span");
        const double f = (x - min_mhz) / spacing_mhz;
        long long i = static_cast<long long>(std::llround(f));
        if (i < 0) i = 0;
        if (i >= static_cast<long long>(count)) i = static_cast<long long>(count) - 1;
        return static_cast<std::size_t>(i);
    }

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = value(i);
        return v;
    }

    void validate() const {
        if (!(spacing_mhz > 0.0) || count < 2)
            throw input_error("grid: spacing must be positive and count at least 2");
    }

    bool same_as(const DetuningGrid& o) const {
        return count == o.count && std::abs(min_mhz - o.min_mhz) < 1e-12 &&
               std::abs(spacing_mhz - o.spacing_mhz) < 1e-12;
    }
};

inline DetuningGrid make_grid(double min_mhz, double max_mhz, double spacing_mhz) {
    DetuningGrid g;
    g.min_mhz = min_mhz;
    g.spacing_mhz = spacing_mhz;
    g.count = static_cast<std::size_t>(std::llround((max_mhz - min_mhz) / spacing_mhz)) + 1;
    g.validate();
    return g;
}

// One pump tone. Bandwidth covers chirped tones (chirp span) as well as
// quasi-monochromatic ones; extra_broadening_mhz widens the addressed band
// further to model pump power broadening. weight only matters when several
// tones drive the same ground level of one class at once.
struct PumpTone {
    double center_mhz = 0.0;
    double bandwidth_mhz = 0.2;
    double weight = 1.0;
    double extra_broadening_mhz = 0.0;

    double half_width(const MediumParams& medium) const {
        const double hw = 0.5 * (bandwidth_mhz + extra_broadening_mhz);
        return std::max(hw, 0.5 * medium.homogeneous_linewidth_mhz);
    }
};

struct PumpSchedule {
    std::vector<PumpTone> tones;
    int max_cycles = 2000;
    // Fraction of a resonant level excited per cycle; 1 is the long-burn
    // limit, smaller values expose finite-fluence behaviour.
    double excitation_fraction = 1.0;
    double convergence_tol = 1e-12;

    void validate() const {
        if (tones.empty())
            throw input_error("pump: schedule holds no tones");
        if (!(excitation_fraction > 0.0) || excitation_fraction > 1.0)
            throw input_error("pump: excitation fraction must lie in (0,1]");
        if (max_cycles < 1)
            throw input_error("pump: cycle count must be positive");
    }
};

// Ground-level occupations per detuning bin, normalized to 1 per bin and
// indexed by spin label. Bins are independent ion sub-ensembles.
struct PopulationState {
    DetuningGrid grid;
    std::vector<std::array<double, 3>> occupation;
    int cycles_run = 0;
    bool converged = false;

    static PopulationState equal(const DetuningGrid& g) {
        PopulationState s;
        s.grid = g;
        s.occupation.assign(g.count, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        return s;
    }

    double total() const {
        double t = 0.0;
        for (const auto& o : occupation)
            t += o[0] + o[1] + o[2];
        return t;
    }
};

namespace detail {

// For one bin, the set of (ground, excited, rate-weight) combinations some
// tone is resonant with.
struct ResonantPath {
    int g;
    int e;
    double weight;
};

} // namespace detail

// Optical pumping by rate equations, iterated to the fixed point. Each cycle
// excites the addressed fraction of every resonant ground level, splits it
// over the resonant excited levels by gamma * tone weight, and relaxes the
// excited population back over all ground levels by the branching table's
// columns. Population is conserved bin by bin; in the long-burn limit any
// level still resonant keeps draining, so the fixed point has resonant
// levels empty unless every ground level of the bin is driven (then the
// population cycles and the cap applies, which is exactly the class that
// survives a cleaning scan).
inline PopulationState pump_populations(const HyperfineStructure& structure,
                                        const TransitionTable& table,
                                        const PumpSchedule& schedule, const MediumParams& medium,
                                        PopulationState state, int threads = 1) {
    structure.validate();
    table.validate();
    schedule.validate();
    medium.validate();
    state.grid.validate();
    for (const PumpTone& tone : schedule.tones)
        if (tone.center_mhz < state.grid.min_mhz || tone.center_mhz > state.grid.max_mhz())
            throw input_error("pump: tone center lies outside the simulated grid");

    // Branching out of each excited level, normalized over ground levels.
    std::array<std::array<double, 3>, 3> relax{}; // [e][g]
    for (int e = 0; e < 3; ++e) {
        const auto el = static_cast<SpinLabel>(e);
        const double cs = table.col_sum(el);
        for (int g = 0; g < 3; ++g)
            relax[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)] =
                table(static_cast<SpinLabel>(g), el) / cs;
    }

    std::array<std::array<double, 3>, 3> tf{}; // [g][e]
    for (int g = 0; g < 3; ++g)
        for (int e = 0; e < 3; ++e)
            tf[static_cast<std::size_t>(g)][static_cast<std::size_t>(e)] = transition_frequency_mhz(
                structure, static_cast<SpinLabel>(g), static_cast<SpinLabel>(e));

    // Resonance is detuning-local, so precompute each bin's driven paths.
    std::vector<std::vector<detail::ResonantPath>> paths(state.grid.count);
    parallel_for_chunks(state.grid.count, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double delta = state.grid.value(i);
            for (int g = 0; g < 3; ++g) {
                for (int e = 0; e < 3; ++e) {
                    const double line = delta + tf[static_cast<std::size_t>(g)][static_cast<std::size_t>(e)];
                    double w = 0.0;
                    for (const PumpTone& tone : schedule.tones)
                        if (std::abs(line - tone.center_mhz) <= tone.half_width(medium))
                            w += tone.weight;
                    if (w > 0.0)
                        paths[i].push_back(detail::ResonantPath{
                            g, e,
                            w * table(static_cast<SpinLabel>(g), static_cast<SpinLabel>(e))});
                }
            }
        }
    });

    std::vector<char> done(state.grid.count, 0);
    std::vector<int> cycles(state.grid.count, 0);
    parallel_for_chunks(state.grid.count, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            if (paths[i].empty()) {
                done[i] = 1;
                continue;
            }
            auto& occ = state.occupation[i];
            std::array<double, 3> rate_sum{0.0, 0.0, 0.0};
            for (const auto& p : paths[i])
                rate_sum[static_cast<std::size_t>(p.g)] += p.weight;
            for (int c = 0; c < schedule.max_cycles; ++c) {
                const std::array<double, 3> prev = occ;
                std::array<double, 3> outflow{0.0, 0.0, 0.0};

                double resonant_pop = 0.0;
                for (const auto& p : paths[i]) {
                    const double moved = occ[static_cast<std::size_t>(p.g)] *
                                         schedule.excitation_fraction * p.weight /
                                         rate_sum[static_cast<std::size_t>(p.g)];
                    outflow[static_cast<std::size_t>(p.e)] += moved;
                }
                for (int g = 0; g < 3; ++g)
                    if (rate_sum[static_cast<std::size_t>(g)] > 0.0) {
                        resonant_pop += occ[static_cast<std::size_t>(g)];
                        occ[static_cast<std::size_t>(g)] -=
                            occ[static_cast<std::size_t>(g)] * schedule.excitation_fraction;
                    }
                for (int e = 0; e < 3; ++e)
                    for (int g = 0; g < 3; ++g)
                        occ[static_cast<std::size_t>(g)] +=
                            outflow[static_cast<std::size_t>(e)] *
                            relax[static_cast<std::size_t>(e)][static_cast<std::size_t>(g)];

                cycles[i] = c + 1;
                // Bins with every ground level driven never empty; they cycle
                // toward a stationary distribution instead, so convergence is
                // depletion or stationarity, whichever comes first.
                double change = 0.0;
                for (int g = 0; g < 3; ++g)
                    change = std::max(change, std::abs(occ[static_cast<std::size_t>(g)] -
                                                       prev[static_cast<std::size_t>(g)]));
                if (resonant_pop < schedule.convergence_tol ||
                    change < schedule.convergence_tol) {
                    done[i] = 1;
                    break;
                }
            }
        }
    });

    state.converged = true;
    state.cycles_run = 0;
    for (std::size_t i = 0; i < state.grid.count; ++i) {
        state.converged = state.converged && done[i];
        state.cycles_run = std::max(state.cycles_run, cycles[i]);
    }
    return state;
}

inline PopulationState pump_populations(const HyperfineStructure& structure,
                                        const TransitionTable& table,
                                        const PumpSchedule& schedule, const MediumParams& medium,
                                        const DetuningGrid& grid, int threads = 1) {
    return pump_populations(structure, table, schedule, medium, PopulationState::equal(grid),
                            threads);
}

// Long-burn excess population in `sink` after a single-frequency burn that
// empties `pumped` through the shared excited level: the emptied third of
// the class splits over the two spectator levels by their branching ratios.
// This is the closed form the full rate iteration must reproduce.
inline double excess_population(const TransitionTable& table, SpinLabel pumped, SpinLabel sink,
                                SpinLabel shared_excited) {
    if (pumped == sink)
        throw input_error("excess population: pumped and sink levels coincide; the burn moves "
                          "no population into its own source (degenerate input)");
    SpinLabel third = SpinLabel::one_half;
    for (int i = 0; i < 3; ++i) {
        const auto l = static_cast<SpinLabel>(i);
        if (l != pumped && l != sink)
            third = l;
    }
    const double g_sink = table(sink, shared_excited);
    const double g_third = table(third, shared_excited);
    const double denom = g_sink + g_third;
    if (!(denom > 0.0))
        throw input_error("excess population: branching out of the shared excited level "
                          "vanishes (degenerate input)");
    return (1.0 / 3.0) * g_sink / denom;
}

// Burning both frequencies empties two ground levels into the third, so the
// excess is 2/3 of the class regardless of branching ratios.
inline double dual_pump_excess_population() { return 2.0 / 3.0; }

} // namespace nlpesim
