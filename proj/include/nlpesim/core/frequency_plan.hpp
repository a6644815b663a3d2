#pragma once

#include <array>
#include <cmath>
#include <string>

#include "nlpesim/core/levels.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

struct TransitionRef {
    SpinLabel ground;
    SpinLabel excited;
};

inline std::string to_string(const TransitionRef& t) {
    return std::string(to_string(t.ground)) + "g-" + to_string(t.excited) + "e";
}

// The four optical frequencies of the storage scheme, defined by which
// transition each drives. Numeric values are always derived from a level
// structure, as offsets from the signal line, so they cannot drift out of
// sync with the ladder.
struct FrequencyPlan {
    TransitionRef signal{SpinLabel::one_half, SpinLabel::one_half};
    TransitionRef control1{SpinLabel::three_half, SpinLabel::one_half};
    TransitionRef control2{SpinLabel::one_half, SpinLabel::three_half};
    TransitionRef back_pump{SpinLabel::five_half, SpinLabel::three_half};
    // Absolute frequency of the signal line; metadata only, offsets are used
    // throughout.
    double reference_thz = 516.6968;

    double offset_mhz(const HyperfineStructure& s, const TransitionRef& t) const {
        return transition_frequency_mhz(s, t.ground, t.excited) -
               transition_frequency_mhz(s, signal.ground, signal.excited);
    }

    double f0(const HyperfineStructure& s) const { return offset_mhz(s, signal); }
    double f1(const HyperfineStructure& s) const { return offset_mhz(s, control1); }
    double f2(const HyperfineStructure& s) const { return offset_mhz(s, control2); }
    double f3(const HyperfineStructure& s) const { return offset_mhz(s, back_pump); }

    void validate(const HyperfineStructure& s) const {
        const std::array<double, 4> f{f0(s), f1(s), f2(s), f3(s)};
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = i + 1; j < f.size(); ++j)
                if (std::abs(f[i] - f[j]) < 1e-9)
                    throw config_error("frequency plan: two pump frequencies coincide; the "
                                       "preparation scheme needs four distinct lines");
    }
};

inline FrequencyPlan default_frequency_plan() { return FrequencyPlan{}; }

} // namespace nlpesim
