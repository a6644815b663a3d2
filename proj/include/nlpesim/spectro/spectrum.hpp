#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nlpesim/core/frequency_plan.hpp"
#include "nlpesim/core/levels.hpp"
#include "nlpesim/core/medium.hpp"
#include "nlpesim/core/transition_table.hpp"
#include "nlpesim/spectro/pump.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/math.hpp"
#include "nlpesim/util/parallel.hpp"

namespace nlpesim {

// Everything needed to turn ground-level populations into an absorption
// spectrum. The signal transition fixes the depth normalization: an
// unburned medium shows the flat baseline depth, and a bin fully polarized
// into the signal's ground level absorbs peak_depth at the signal line.
struct SpectrumModel {
    HyperfineStructure structure;
    TransitionTable table;
    MediumParams medium;
    TransitionRef signal{SpinLabel::one_half, SpinLabel::one_half};
    // Per-bin lineshapes are dropped beyond this distance; the neglected
    // Lorentzian tail mass is 2*hw/(pi*radius) of a bin's weight.
    double kernel_radius_mhz = 5.0;

    double signal_branching() const { return table(signal.ground, signal.excited); }
    double baseline(Polarization pol) const {
        return medium.baseline_depth(pol, signal_branching());
    }
    void validate() const {
        structure.validate();
        table.validate();
        medium.validate();
        if (!(kernel_radius_mhz > 0.0))
            throw input_error("spectrum: kernel radius must be positive");
    }
};

struct Spectrum {
    DetuningGrid grid;
    Polarization pol = Polarization::H;
    double baseline_depth = 0.0;
    std::vector<double> optical_depth;

    double at(double x_mhz) const { return optical_depth[grid.index_near(x_mhz)]; }
};

namespace detail {

// Integral of the unit-area homogeneous Lorentzian over one source bin of
// width dx centered u away. Summed over a whole grid this telescopes, so a
// uniform population produces the baseline exactly instead of the ripple a
// sampled lineshape would give at linewidths near the grid spacing.
inline double bin_kernel(double u, double dx, double half_width) {
    return (std::atan((u + 0.5 * dx) / half_width) - std::atan((u - 0.5 * dx) / half_width)) /
           pi;
}

// Telescoped kernel sum over the full grid: the whole-comb contribution of
// a uniform unit-weight-per-bin population, exact including edge falloff.
inline double comb_sum(double u_from_min, double u_from_max, double dx, double half_width) {
    return (std::atan((u_from_min + 0.5 * dx) / half_width) -
            std::atan((u_from_max - 0.5 * dx) / half_width)) /
           pi;
}

// Indices where a level's occupation differs from the unburned 1/3, per
// ground level. Spectra are evaluated as baseline + deviation so the cost
// scales with the burned region, not the grid.
inline std::array<std::vector<std::size_t>, 3> deviation_support(const PopulationState& state) {
    std::array<std::vector<std::size_t>, 3> supp;
    for (std::size_t i = 0; i < state.grid.count; ++i)
        for (std::size_t g = 0; g < 3; ++g)
            if (std::abs(state.occupation[i][g] - 1.0 / 3.0) > 1e-15)
                supp[g].push_back(i);
    return supp;
}

} // namespace detail

// Optical depth at a single probe frequency. Exact in the baseline part;
// the deviation part truncates each bin's lineshape at the kernel radius.
inline double depth_at(const SpectrumModel& model, const PopulationState& state,
                       Polarization pol, double x_mhz) {
    const auto supp = detail::deviation_support(state);
    const DetuningGrid& grid = state.grid;
    const double dx = grid.spacing_mhz;
    const double hw = 0.5 * model.medium.homogeneous_linewidth_mhz;
    const double b = model.baseline(pol);

    double depth = 0.0;
    for (int g = 0; g < 3; ++g) {
        for (int e = 0; e < 3; ++e) {
            const double gamma =
                model.table(static_cast<SpinLabel>(g), static_cast<SpinLabel>(e));
            const double t = transition_frequency_mhz(model.structure, static_cast<SpinLabel>(g),
                                                      static_cast<SpinLabel>(e));
            const double xc = x_mhz - t;
            depth += gamma / 3.0 *
                     detail::comb_sum(xc - grid.min_mhz, xc - grid.max_mhz(), dx, hw);
            for (std::size_t i : supp[static_cast<std::size_t>(g)]) {
                const double u = xc - grid.value(i);
                if (std::abs(u) > model.kernel_radius_mhz)
                    continue;
                depth += (state.occupation[i][static_cast<std::size_t>(g)] - 1.0 / 3.0) * gamma *
                         detail::bin_kernel(u, dx, hw);
            }
        }
    }
    return b * depth;
}

// Full spectrum on the population state's own grid.
inline Spectrum absorption_spectrum(const SpectrumModel& model, const PopulationState& state,
                                    Polarization pol, int threads = 1) {
    model.validate();
    state.grid.validate();
    const auto supp = detail::deviation_support(state);
    const DetuningGrid& grid = state.grid;
    const double dx = grid.spacing_mhz;
    const double hw = 0.5 * model.medium.homogeneous_linewidth_mhz;

    Spectrum s;
    s.grid = grid;
    s.pol = pol;
    s.baseline_depth = model.baseline(pol);
    s.optical_depth.assign(grid.count, 0.0);

    parallel_for_chunks(grid.count, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            const double x = grid.value(k);
            double depth = 0.0;
            for (int g = 0; g < 3; ++g) {
                for (int e = 0; e < 3; ++e) {
                    const double gamma =
                        model.table(static_cast<SpinLabel>(g), static_cast<SpinLabel>(e));
                    const double t = transition_frequency_mhz(
                        model.structure, static_cast<SpinLabel>(g), static_cast<SpinLabel>(e));
                    const double xc = x - t;
                    depth += gamma / 3.0 *
                             detail::comb_sum(xc - grid.min_mhz, xc - grid.max_mhz(), dx, hw);
                    const auto& sg = supp[static_cast<std::size_t>(g)];
                    if (sg.empty())
                        continue;
                    // Support indices are sorted, so only the window within
                    // the kernel radius contributes.
                    const double lo_val = xc - model.kernel_radius_mhz;
                    const double hi_val = xc + model.kernel_radius_mhz;
                    auto it = std::lower_bound(sg.begin(), sg.end(), lo_val,
                                               [&](std::size_t idx, double v) {
                                                   return grid.value(idx) < v;
                                               });
                    for (; it != sg.end() && grid.value(*it) <= hi_val; ++it) {
                        const double u = xc - grid.value(*it);
                        depth += (state.occupation[*it][static_cast<std::size_t>(g)] -
                                  1.0 / 3.0) *
                                 gamma * detail::bin_kernel(u, dx, hw);
                    }
                }
            }
            s.optical_depth[k] = s.baseline_depth * depth;
        }
    });
    return s;
}

// Depth change at one probe frequency between a burned spectrum and its
// reference, read at the nearest grid node.
inline double delta_d(const Spectrum& burned, const Spectrum& reference, double x_mhz) {
    if (!burned.grid.same_as(reference.grid))
        throw input_error("spectrum: depth difference requested across mismatched grids");
    const std::size_t i = burned.grid.index_near(x_mhz);
    return burned.optical_depth[i] - reference.optical_depth[i];
}

// A hole (negative depth change) or antihole (positive) in a difference
// spectrum.
struct Feature {
    double position_mhz = 0.0;
    double delta_depth = 0.0;
    bool antihole = false;
};

// Local extrema of the difference spectrum with |delta d| above the
// threshold. Runs of constant sign yield one feature at their strongest
// node; plateaus report their midpoint.
inline std::vector<Feature> find_features(const Spectrum& burned, const Spectrum& reference,
                                          double min_abs_delta) {
    if (!burned.grid.same_as(reference.grid))
        throw input_error("spectrum: feature search requested across mismatched grids");
    if (!(min_abs_delta > 0.0))
        throw input_error("spectrum: feature threshold must be positive");

    std::vector<Feature> out;
    const std::size_t n = burned.grid.count;
    std::size_t i = 0;
    while (i < n) {
        const double d0 = burned.optical_depth[i] - reference.optical_depth[i];
        if (std::abs(d0) < min_abs_delta) {
            ++i;
            continue;
        }
        const bool pos = d0 > 0.0;
        std::size_t j = i;
        double best = 0.0;
        std::size_t best_lo = i, best_hi = i;
        while (j < n) {
            const double dj = burned.optical_depth[j] - reference.optical_depth[j];
            if (std::abs(dj) < min_abs_delta || (dj > 0.0) != pos)
                break;
            if (std::abs(dj) > best + 1e-12) {
                best = std::abs(dj);
                best_lo = best_hi = j;
            } else if (std::abs(dj) > best - 1e-12) {
                best_hi = j;
            }
            ++j;
        }
        Feature f;
        f.position_mhz = 0.5 * (burned.grid.value(best_lo) + burned.grid.value(best_hi));
        f.delta_depth = pos ? best : -best;
        f.antihole = pos;
        out.push_back(f);
        i = j;
    }
    return out;
}

} // namespace nlpesim
