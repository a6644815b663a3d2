#pragma once

#include <array>
#include <cstdint>
#include <cstddef>

#include "nlpesim/channel/channel.hpp"
#include "nlpesim/channel/jones.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/rng.hpp"

namespace nlpesim {

// Raw tomography record: total clicks for every preparation/analysis pair,
// plus a noise-only companion taken with the input blocked. Rows are
// inputs, columns analyzers, both in {H, V, D, R} order.
struct CountMatrix {
    std::array<std::array<std::uint64_t, 4>, 4> counts{};
    std::array<std::array<std::uint64_t, 4>, 4> noise_counts{};
    std::uint64_t trials_per_setting = 0;
    std::uint64_t seed = 0;
    double storage_time_us = 0.0;
    double detection_window_us = 0.0;

    std::uint64_t pair_reference(std::size_t input) const {
        if (input >= 4)
            throw input_error("counts: input index out of range");
        return counts[input][0] + counts[input][1];
    }
};

// One Poisson draw per cell with a substream derived from (seed, row, col);
// the noise companion uses its own tag so blocking the input does not
// perturb the signal stream.
inline CountMatrix simulate_counts(const ChannelParams& params, std::uint64_t trials,
                                   std::uint64_t seed, double storage_time_us = 0.0) {
    params.validate();
    if (trials == 0)
        throw input_error("counts: need at least one trial per setting");
    CountMatrix m;
    m.trials_per_setting = trials;
    m.seed = seed;
    m.storage_time_us = storage_time_us;
    m.detection_window_us = params.detection_window_us;
    for (std::size_t i = 0; i < 4; ++i) {
        const JonesVector input = jones_state(stokes_settings[i]);
        for (std::size_t p = 0; p < 4; ++p) {
            const JonesVector proj = jones_state(stokes_settings[p]);
            const double mean = expected_counts(params, input, proj);
            std::mt19937_64 rng(derive_seed(seed, 0x5167u + i, p));
            m.counts[i][p] = static_cast<std::uint64_t>(
                sample_poisson(rng, mean * static_cast<double>(trials)));
            std::mt19937_64 noise_rng(derive_seed(seed, 0xb10cu + i, p));
            m.noise_counts[i][p] = static_cast<std::uint64_t>(sample_poisson(
                noise_rng, 0.5 * params.noise_floor * static_cast<double>(trials)));
        }
    }
    return m;
}

// Measured SNR per input: (signal+noise clicks - noise clicks) / noise
// clicks, summed over the {H, V} analyzer pair.
inline std::array<double, 4> measured_snr(const CountMatrix& m) {
    std::array<double, 4> snr{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double total = static_cast<double>(m.counts[i][0] + m.counts[i][1]);
        const double noise = static_cast<double>(m.noise_counts[i][0] + m.noise_counts[i][1]);
        if (noise <= 0.0)
            throw data_error("counts: no noise clicks recorded, SNR is undefined; "
                             "increase the trial count or the noise floor");
        snr[i] = (total - noise) / noise;
    }
    return snr;
}

} // namespace nlpesim
