#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nlpesim/core/frequency_plan.hpp"
#include "nlpesim/core/timing.hpp"
#include "nlpesim/util/error.hpp"
#include "nlpesim/util/math.hpp"

namespace nlpesim {

enum class PulseKind { gaussian_input, sech_chirp };

// Propagation direction tag; controls counter-propagate in the storage
// geometry, which is what silences the intermediate echo.
enum class DirectionTag { signal, control };

struct PulseSpec {
    PulseKind kind = PulseKind::sech_chirp;
    double center_mhz = 0.0; // one of the plan frequencies
    double time_us = 0.0;    // pulse center; applied as an event at this time
    double duration_us = 6.0;
    double chirp_bandwidth_mhz = 2.4;
    double area = pi; // nominal pulse area; pi for the controls
    DirectionTag direction = DirectionTag::control;

    void validate() const {
        if (!(duration_us > 0.0))
            throw input_error("pulse: duration must be positive");
        if (chirp_bandwidth_mhz < 0.0)
            throw input_error("pulse: chirp bandwidth must be non-negative");
    }
};

// Spectral amplitude of the gaussian input at detuning delta from its
// center; fwhm is the intensity full width in time.
inline double gaussian_spectral_amplitude(double delta_mhz, double fwhm_us) {
    if (!(fwhm_us > 0.0))
        throw input_error("pulse: input width must be positive");
    const double b = 2.0 * std::log(2.0) / (fwhm_us * fwhm_us);
    return std::exp(-pi * pi * delta_mhz * delta_mhz / b);
}

// The storage sequence: input on the signal transition, then the two
// control-pulse pairs in 1-2-2-1 order. Echoes are not pulses; they appear
// in the run report.
inline std::vector<PulseSpec> default_pulse_sequence(const HyperfineStructure& s,
                                                     const FrequencyPlan& plan,
                                                     const TimingPlan& timing) {
    timing.validate();
    std::vector<PulseSpec> seq(5);
    seq[0] = PulseSpec{PulseKind::gaussian_input, plan.f0(s), timing.t_us[0],
                       timing.input_fwhm_us, 0.0, 0.0, DirectionTag::signal};
    const double d1 = timing.control_duration_us[0];
    const double d2 = timing.control_duration_us[1];
    const double b1 = timing.control_chirp_mhz[0];
    const double b2 = timing.control_chirp_mhz[1];
    seq[1] = PulseSpec{PulseKind::sech_chirp, plan.f1(s), timing.t_us[1], d1, b1, pi,
                       DirectionTag::control};
    seq[2] = PulseSpec{PulseKind::sech_chirp, plan.f2(s), timing.t_us[2], d2, b2, pi,
                       DirectionTag::control};
    seq[3] = PulseSpec{PulseKind::sech_chirp, plan.f2(s), timing.t_us[3], d2, b2, pi,
                       DirectionTag::control};
    seq[4] = PulseSpec{PulseKind::sech_chirp, plan.f1(s), timing.t_us[4], d1, b1, pi,
                       DirectionTag::control};
    return seq;
}

} // namespace nlpesim
