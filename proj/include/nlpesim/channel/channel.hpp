#pragma once

#include <cmath>

#include "nlpesim/channel/jones.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// The memory acts on the polarization qubit as a diattenuator: each rail is
// recalled with its own efficiency, everything downstream (collection,
// filtering, detector) is polarization-blind and folded into eta_detection.
// Noise is unpolarized and quoted as mean counts per trial at the detector.
struct ChannelParams {
    double efficiency_h = 0.0485;
    double efficiency_v = 0.0528;
    double eta_detection = 0.52;
    double mean_photons = 1.10;       // per input pulse
    double noise_floor = 0.003;       // detected mean noise counts per trial, both rails
    double detection_window_us = 1.57;

    void validate() const {
        if (efficiency_h <= 0.0 || efficiency_h > 1.0 || efficiency_v <= 0.0 ||
            efficiency_v > 1.0)
            throw config_error("channel: rail efficiencies must lie in (0,1]");
        if (eta_detection <= 0.0 || eta_detection > 1.0)
            throw config_error("channel: detection efficiency must lie in (0,1]");
        if (mean_photons < 0.0)
            throw config_error("channel: mean photon number must be nonnegative");
        if (noise_floor < 0.0)
            throw config_error("channel: noise floor must be nonnegative");
        if (!(detection_window_us > 0.0))
            throw config_error("channel: detection window must be positive");
    }
};

// Unnormalized output field: diag(sqrt(eta_H), sqrt(eta_V)) acting on the
// input Jones vector. Its squared norm is the recall probability.
inline JonesVector channel_apply(const ChannelParams& p, const JonesVector& input) {
    const JonesVector in = normalized_jones(input);
    JonesVector out;
    out(0) = std::sqrt(p.efficiency_h) * in(0);
    out(1) = std::sqrt(p.efficiency_v) * in(1);
    return out;
}

// Mean detected counts per trial behind an analyzer projecting on `proj`.
inline double expected_counts(const ChannelParams& p, const JonesVector& input,
                              const JonesVector& proj) {
    const JonesVector out = channel_apply(p, input);
    const JonesVector a = normalized_jones(proj);
    const double signal =
        p.eta_detection * p.mean_photons * std::norm(a.dot(out));
    // Unpolarized noise: half passes any projective analyzer. The noise
    // floor is quoted at the detector, so the detection efficiency is
    // already folded in.
    return signal + 0.5 * p.noise_floor;
}

// Detection efficiency that reproduces a target signal-to-noise ratio for
// the horizontal rail, with the SNR defined on the H-input column sums:
// (detected - noise-only) / noise-only across the {H, V} analyzers.
inline double calibrate_eta_detection(double target_snr, double mean_photons,
                                      double efficiency_h, double noise_floor) {
    if (target_snr <= 0.0 || mean_photons <= 0.0 || efficiency_h <= 0.0 ||
        noise_floor <= 0.0)
        throw input_error("channel: SNR calibration needs positive inputs");
    const double eta = target_snr * noise_floor / (mean_photons * efficiency_h);
    if (eta > 1.0)
        throw input_error("channel: SNR target unreachable, detection efficiency would exceed 1");
    return eta;
}

// State fidelity of the renormalized recalled state against the input.
inline double recalled_state_fidelity(const ChannelParams& p, const JonesVector& input) {
    const JonesVector out = channel_apply(p, input);
    const double n2 = out.squaredNorm();
    if (n2 <= 0.0)
        throw data_error("channel: nothing is recalled for this input");
    return std::norm(normalized_jones(input).dot(out)) / n2;
}

// Closed form for the worst input state of a pure diattenuator:
// F_min = 4 sqrt(eta_H eta_V) / (sqrt(eta_H) + sqrt(eta_V))^2, reached on
// the equal-weight superpositions.
inline double diattenuation_worst_case_fidelity(double efficiency_h, double efficiency_v) {
    if (efficiency_h <= 0.0 || efficiency_v <= 0.0)
        throw input_error("channel: efficiencies must be positive");
    const double a = std::sqrt(efficiency_h);
    const double b = std::sqrt(efficiency_v);
    return 4.0 * a * b / ((a + b) * (a + b));
}

} // namespace nlpesim
