#pragma once

#include <cmath>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Transmission filter: a separate absorber with a spectral hole burned at
// the signal frequency. The retrieved signal passes through the hole while
// broadband noise sees the full (double-pass) absorption depth.
struct FilterParams {
    double depth = 5.2; // effective double-pass absorption depth
    double hole_center_mhz = 0.0;
    double hole_width_mhz = 1.0; // flat-top full width

    void validate() const {
        if (depth < 0.0)
            throw input_error("filter: absorption depth must be non-negative");
        if (!(hole_width_mhz > 0.0))
            throw input_error("filter: hole width must be positive");
    }
};

// Unit-height hole profile: flat top across the burned width, Lorentzian
// shoulders (half width equal to the hole half width) beyond it.
inline double filter_hole_profile(const FilterParams& params, double nu_mhz) {
    const double half = 0.5 * params.hole_width_mhz;
    const double u = std::abs(nu_mhz - params.hole_center_mhz);
    if (u <= half)
        return 1.0;
    const double s = (u - half) / half;
    return 1.0 / (1.0 + s * s);
}

inline double filter_transmission(const FilterParams& params, double nu_mhz) {
    params.validate();
    return std::exp(-params.depth * (1.0 - filter_hole_profile(params, nu_mhz)));
}

} // namespace nlpesim
