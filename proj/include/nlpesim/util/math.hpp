#pragma once

#include <cmath>
#include <vector>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

constexpr double pi = 3.14159265358979323846;

// Unit-area Lorentzian. fwhm in the same units as x.
inline double lorentzian(double x, double fwhm) {
    const double hw = 0.5 * fwhm;
    return hw / (pi * (x * x + hw * hw));
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw input_error("trapezoid: grids must match and hold at least two points");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

// Full width at half maximum of a sampled single-peaked curve, with linear
// interpolation of the half-height crossings. Returns 0 if no peak.
inline double fwhm_of(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw input_error("fwhm_of: grids must match");
    std::size_t imax = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[imax]) imax = i;
    const double half = 0.5 * y[imax];
    if (half <= 0.0)
        return 0.0;
    double left = x.front(), right = x.back();
    for (std::size_t i = imax; i-- > 0;) {
        if (y[i] <= half) {
            const double f = (half - y[i]) / (y[i + 1] - y[i]);
            left = x[i] + f * (x[i + 1] - x[i]);
            break;
        }
    }
    for (std::size_t i = imax + 1; i < y.size(); ++i) {
        if (y[i] <= half) {
            const double f = (y[i - 1] - half) / (y[i - 1] - y[i]);
            right = x[i - 1] + f * (x[i] - x[i - 1]);
            break;
        }
    }
    return right - left;
}

} // namespace nlpesim
