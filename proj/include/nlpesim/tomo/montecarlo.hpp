#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nlpesim/channel/counts.hpp"
#include "nlpesim/tomo/mle.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/rng.hpp"

namespace nlpesim {

struct McReport {
    double mean_fidelity = 0.0;
    double std_fidelity = 0.0;
    std::size_t resamples = 0;
    std::size_t excluded = 0; // fits that did not converge
    std::vector<double> fidelities;
};

// Parametric bootstrap of the fit uncertainty: every cell (signal and
// noise companion alike) is redrawn as Poisson around the observed count,
// the reconstruction is rerun, and the spread of the fidelities is
// reported. Substreams keyed on (seed, resample, cell) keep the whole
// procedure reproducible and order-independent.
inline McReport mc_process_fidelity(const CountMatrix& m, NoisePolicy policy,
                                    std::size_t resamples, std::uint64_t seed,
                                    const MleOptions& opt = {},
                                    const TomoSettings& settings = TomoSettings::standard()) {
    if (resamples < 2)
        throw input_error("tomography: need at least two resamples for a spread");
    McReport report;
    report.resamples = resamples;
    report.fidelities.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        CountMatrix sample = m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t p = 0; p < 4; ++p) {
                const std::size_t cell = i * 4 + p;
                std::mt19937_64 rng(derive_seed(seed, 0x9e5a + r, cell));
                sample.counts[i][p] = static_cast<std::uint64_t>(
                    sample_poisson(rng, static_cast<double>(m.counts[i][p])));
                std::mt19937_64 noise_rng(derive_seed(seed, 0xb015 + r, cell));
                sample.noise_counts[i][p] = static_cast<std::uint64_t>(
                    sample_poisson(noise_rng, static_cast<double>(m.noise_counts[i][p])));
            }
        MleResult fit;
        try {
            fit = mle_process(sample, policy, opt, settings);
        } catch (const data_error&) {
            ++report.excluded;
            continue;
        }
        if (!fit.converged) {
            ++report.excluded;
            continue;
        }
        report.fidelities.push_back(fit.fidelity);
    }
    if (report.fidelities.size() < 2)
        throw data_error("tomography: fewer than two resampled fits converged");
    double mean = 0.0;
    for (double f : report.fidelities)
        mean += f;
    mean /= static_cast<double>(report.fidelities.size());
    double var = 0.0;
    for (double f : report.fidelities)
        var += (f - mean) * (f - mean);
    var /= static_cast<double>(report.fidelities.size() - 1);
    report.mean_fidelity = mean;
    report.std_fidelity = std::sqrt(var);
    return report;
}

} // namespace nlpesim
