#pragma once

#include <array>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Pulse schedule of one storage sequence, all in microseconds. t[0] is the
// input, t[1] and t[4] the first control transition, t[2] and t[3] the
// second. Times are pulse centers; durations and chirp spans are metadata
// for trace synthesis and bandwidth checks.
struct TimingPlan {
    std::array<double, 5> t_us{0.0, 6.25, 13.0, 26.0, 37.75};
    double input_fwhm_us = 2.8;
    std::array<double, 2> control_duration_us{7.5, 6.0}; // pi1, pi2
    std::array<double, 2> control_chirp_mhz{2.4, 3.4};   // pi1, pi2
    double detection_window_us = 1.57;

    void validate() const {
        for (std::size_t i = 1; i < t_us.size(); ++i)
            if (t_us[i] < t_us[i - 1])
                throw input_error("timing: pulse times must be non-decreasing (t0..t4)");
        if (!(input_fwhm_us > 0.0) || !(detection_window_us > 0.0))
            throw input_error("timing: input width and detection window must be positive");
        for (double d : control_duration_us)
            if (d < 0.0)
                throw input_error("timing: control durations must be non-negative");
    }
};

struct EchoTimes {
    double silenced_us; // two-pulse rephasing inside the sequence; mismatched
    double emitted_us;  // full four-pulse rephasing; matched to the input mode
};

// Rephasing instants from the signed sum of free-evolution intervals. The
// first comes after the initial control pair, the second after all four.
inline EchoTimes echo_times(const TimingPlan& p) {
    p.validate();
    const double first = p.t_us[1] - p.t_us[0];
    const double second = p.t_us[3] - p.t_us[2];
    return EchoTimes{p.t_us[2] + first, p.t_us[4] + (second - first)};
}

} // namespace nlpesim
