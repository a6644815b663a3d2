#pragma once

#include <algorithm>
#include <array>
#include <string>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Hyperfine sublevels of a nuclear-spin 5/2 manifold. Each is doubly
// degenerate (+-m), so a single label covers the pair.
enum class SpinLabel { one_half = 0, three_half = 1, five_half = 2 };

inline const char* to_string(SpinLabel l) {
    switch (l) {
    case SpinLabel::one_half: return "1/2";
    case SpinLabel::three_half: return "3/2";
    case SpinLabel::five_half: return "5/2";
    }
    return "?";
}

inline SpinLabel parse_spin_label(const std::string& s) {
    if (s == "1/2") return SpinLabel::one_half;
    if (s == "3/2") return SpinLabel::three_half;
    if (s == "5/2") return SpinLabel::five_half;
    throw input_error("levels: unknown spin label '" + s + "' (expected 1/2, 3/2 or 5/2)");
}

// Ground and excited hyperfine ladders. Gaps are listed bottom-up, and the
// order arrays say which label sits at which rung (index 0 = lowest). The
// ordering is exactly what the dual-frequency burning experiments determine,
// so both it and its flipped alternative must be representable.
struct HyperfineStructure {
    std::array<double, 2> ground_gaps_mhz{29.54, 57.24};
    std::array<double, 2> excited_gaps_mhz{62.36, 106.92};
    std::array<SpinLabel, 3> ground_order{SpinLabel::one_half, SpinLabel::three_half,
                                          SpinLabel::five_half};
    std::array<SpinLabel, 3> excited_order{SpinLabel::one_half, SpinLabel::three_half,
                                           SpinLabel::five_half};

    void validate() const {
        for (double g : ground_gaps_mhz)
            if (!(g > 0.0))
                throw input_error("levels: ground gaps must be positive");
        for (double g : excited_gaps_mhz)
            if (!(g > 0.0))
                throw input_error("levels: excited gaps must be positive");
        auto is_perm = [](const std::array<SpinLabel, 3>& o) {
            std::array<int, 3> seen{0, 0, 0};
            for (SpinLabel l : o)
                seen[static_cast<int>(l)]++;
            return seen == std::array<int, 3>{1, 1, 1};
        };
        if (!is_perm(ground_order) || !is_perm(excited_order))
            throw input_error("levels: level order must name each of 1/2, 3/2, 5/2 exactly once");
    }

    // Energy of a label above the bottom rung of its manifold.
    double ground_offset_mhz(SpinLabel l) const {
        return rung_offset(ground_order, ground_gaps_mhz, l);
    }
    double excited_offset_mhz(SpinLabel l) const {
        return rung_offset(excited_order, excited_gaps_mhz, l);
    }

private:
    static double rung_offset(const std::array<SpinLabel, 3>& order,
                              const std::array<double, 2>& gaps, SpinLabel l) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (order[static_cast<std::size_t>(i)] == l)
                return e;
            if (i < 2)
                e += gaps[static_cast<std::size_t>(i)];
        }
        throw input_error("levels: label not present in order");
    }
};

inline HyperfineStructure default_level_structure() { return HyperfineStructure{}; }

// Alternative orderings probed by the burning experiments: the whole ladder
// flips, so the gap between a given label pair is preserved.
inline HyperfineStructure flipped_ground(HyperfineStructure s) {
    std::swap(s.ground_gaps_mhz[0], s.ground_gaps_mhz[1]);
    std::reverse(s.ground_order.begin(), s.ground_order.end());
    return s;
}

inline HyperfineStructure flipped_excited(HyperfineStructure s) {
    std::swap(s.excited_gaps_mhz[0], s.excited_gaps_mhz[1]);
    std::reverse(s.excited_order.begin(), s.excited_order.end());
    return s;
}

// Optical transition frequency as an offset from the (1/2 g <-> 1/2 e)
// reference line: (E_e - E_g) re-referenced so the signal transition is 0.
inline double transition_frequency_mhz(const HyperfineStructure& s, SpinLabel g, SpinLabel e) {
    const double eg = s.ground_offset_mhz(g) - s.ground_offset_mhz(SpinLabel::one_half);
    const double ee = s.excited_offset_mhz(e) - s.excited_offset_mhz(SpinLabel::one_half);
    return ee - eg;
}

// One of the nine sub-ensembles a single laser frequency addresses: ions
// whose inhomogeneous shift puts transition (g,e) in resonance with the burn.
struct IonClass {
    SpinLabel ground;
    SpinLabel excited;
    double detuning_mhz; // inhomogeneous shift of the class, relative to the reference line
};

inline std::array<IonClass, 9> enumerate_classes(const HyperfineStructure& s,
                                                 double burn_offset_mhz) {
    std::array<IonClass, 9> out{};
    int k = 0;
    for (int gi = 0; gi < 3; ++gi) {
        for (int ei = 0; ei < 3; ++ei) {
            const auto g = static_cast<SpinLabel>(gi);
            const auto e = static_cast<SpinLabel>(ei);
            out[static_cast<std::size_t>(k++)] =
                IonClass{g, e, burn_offset_mhz - transition_frequency_mhz(s, g, e)};
        }
    }
    return out;
}

} // namespace nlpesim
