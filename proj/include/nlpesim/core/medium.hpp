#pragma once

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Light polarization relative to the crystal frame: H along D1, V along b.
enum class Polarization { H = 0, V = 1 };

inline const char* to_string(Polarization p) { return p == Polarization::H ? "H" : "V"; }

struct MediumParams {
    double length_mm = 10.0;
    double inhomogeneous_fwhm_ghz = 1.5;
    // Optical depth of the prepared absorption peak for each polarization.
    double peak_depth_h = 1.32;
    double peak_depth_v = 1.53;
    double homogeneous_linewidth_mhz = 0.01;

    double peak_depth(Polarization p) const {
        return p == Polarization::H ? peak_depth_h : peak_depth_v;
    }

    // The prepared peak holds the full class population on the signal
    // transition; an unprepared medium spreads population equally over the
    // three ground levels across all transitions (row sums are 1), so the
    // flat unburned depth is peak / gamma_signal.
    double baseline_depth(Polarization p, double signal_branching) const {
        if (!(signal_branching > 0.0))
            throw input_error("medium: signal branching ratio must be positive");
        return peak_depth(p) / signal_branching;
    }

    void validate() const {
        if (!(length_mm > 0.0) || !(inhomogeneous_fwhm_ghz > 0.0))
            throw input_error("medium: length and inhomogeneous width must be positive");
        if (!(peak_depth_h > 0.0) || !(peak_depth_v > 0.0))
            throw input_error("medium: peak depths must be positive");
        if (!(homogeneous_linewidth_mhz > 0.0))
            throw input_error("medium: homogeneous linewidth must be positive");
    }
};

} // namespace nlpesim
