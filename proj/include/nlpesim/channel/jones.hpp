#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

using JonesVector = Eigen::Vector2cd;
using JonesMatrix = Eigen::Matrix2cd;

inline JonesVector normalized_jones(const JonesVector& v) {
    const double n = v.norm();
    if (n < 1e-12)
        throw input_error("jones: cannot normalize a vanishing polarization state");
    return v / n;
}

// Horizontal/vertical refer to the two memory rails; diagonal and circular
// states probe their coherence.
namespace jones {

inline JonesVector horizontal() { return JonesVector(1.0, 0.0); }
inline JonesVector vertical() { return JonesVector(0.0, 1.0); }
inline JonesVector diagonal() {
    return JonesVector(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
}
inline JonesVector antidiagonal() {
    return JonesVector(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
}
inline JonesVector right_circular() {
    return JonesVector(1.0 / std::sqrt(2.0), std::complex<double>(0.0, -1.0) / std::sqrt(2.0));
}
inline JonesVector left_circular() {
    return JonesVector(1.0 / std::sqrt(2.0), std::complex<double>(0.0, 1.0) / std::sqrt(2.0));
}

} // namespace jones

// The four preparation/analysis settings used throughout: an
// informationally complete set for a single polarization qubit.
enum class StokesSetting { h, v, d, r };

inline JonesVector jones_state(StokesSetting s) {
    switch (s) {
        case StokesSetting::h: return jones::horizontal();
        case StokesSetting::v: return jones::vertical();
        case StokesSetting::d: return jones::diagonal();
        case StokesSetting::r: return jones::right_circular();
    }
    throw input_error("jones: unknown setting");
}

inline const char* to_string(StokesSetting s) {
    switch (s) {
        case StokesSetting::h: return "H";
        case StokesSetting::v: return "V";
        case StokesSetting::d: return "D";
        case StokesSetting::r: return "R";
    }
    return "?";
}

inline StokesSetting stokes_from_string(const std::string& s) {
    if (s == "H" || s == "h") return StokesSetting::h;
    if (s == "V" || s == "v") return StokesSetting::v;
    if (s == "D" || s == "d") return StokesSetting::d;
    if (s == "R" || s == "r") return StokesSetting::r;
    throw input_error("jones: unknown setting '" + s + "'");
}

constexpr std::array<StokesSetting, 4> stokes_settings = {
    StokesSetting::h, StokesSetting::v, StokesSetting::d, StokesSetting::r};

inline JonesMatrix projector(const JonesVector& v) {
    const JonesVector n = normalized_jones(v);
    return n * n.adjoint();
}

} // namespace nlpesim
