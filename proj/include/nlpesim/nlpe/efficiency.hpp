#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Backward-recall efficiency of the two-transfer echo:
//   eta = eta_t^4 * d^2 exp(-d) * c
// with d the optical depth of the prepared peak, eta_t the single-pass
// control transfer efficiency and c the lumped decoherence factor.
inline double echo_efficiency(double optical_depth, double eta_t, double c) {
    if (optical_depth < 0.0)
        throw input_error("efficiency: optical depth must be nonnegative");
    if (eta_t < 0.0 || eta_t > 1.0)
        throw input_error("efficiency: transfer efficiency must lie in [0,1]");
    if (c < 0.0 || c > 1.0)
        throw input_error("efficiency: decoherence factor must lie in [0,1]");
    const double e4 = eta_t * eta_t * eta_t * eta_t;
    return e4 * optical_depth * optical_depth * std::exp(-optical_depth) * c;
}

// Independent route to the same d-dependence: slice the medium into M thin
// absorbers of depth h = d/M. Each slice taps the forward field with
// amplitude kappa = sqrt(1 - e^{-h}) and transmits t = e^{-h/2}; the echo
// retraces the path, so a slice at position m contributes kappa^2 t^{m-1}
// on the way in and t^{M-m} on the way out, in phase with every other
// slice. The summed amplitude M kappa^2 t^{M-1} -> d e^{-d/2} as M grows.
inline double echo_efficiency_oracle(double optical_depth, double eta_t, double c,
                                     std::size_t slices = 4000) {
    if (optical_depth < 0.0)
        throw input_error("efficiency: optical depth must be nonnegative");
    if (slices == 0)
        throw input_error("efficiency: need at least one slice");
    const double h = optical_depth / static_cast<double>(slices);
    const double kappa2 = 1.0 - std::exp(-h);
    const double t = std::exp(-0.5 * h);
    double amplitude = 0.0;
    double path = 1.0; // t^{(m-1)} * t^{(M-m)} = t^{M-1}, same for all slices
    for (std::size_t m = 1; m < slices; ++m)
        path *= t;
    amplitude = static_cast<double>(slices) * kappa2 * path;
    const double e4 = eta_t * eta_t * eta_t * eta_t;
    return e4 * amplitude * amplitude * c;
}

struct EfficiencyPoint {
    double optical_depth = 0.0;
    double measured_efficiency = 0.0;
};

// Least-squares scale of the d^2 e^{-d} model through measured points,
// used to pin the lumped factor c from the reported efficiencies.
inline double calibrate_decoherence_factor(const std::vector<EfficiencyPoint>& points,
                                           double eta_t = 1.0) {
    if (points.empty())
        throw input_error("calibration: no efficiency points");
    if (eta_t <= 0.0 || eta_t > 1.0)
        throw input_error("calibration: transfer efficiency must lie in (0,1]");
    const double e4 = eta_t * eta_t * eta_t * eta_t;
    double num = 0.0;
    double den = 0.0;
    for (const auto& p : points) {
        if (p.optical_depth <= 0.0)
            throw input_error("calibration: optical depth must be positive");
        if (p.measured_efficiency < 0.0 || p.measured_efficiency > 1.0)
            throw input_error("calibration: efficiency must lie in [0,1]");
        const double x =
            e4 * p.optical_depth * p.optical_depth * std::exp(-p.optical_depth);
        num += p.measured_efficiency * x;
        den += x * x;
    }
    if (den <= 0.0)
        throw input_error("calibration: degenerate design, all model values vanish");
    return num / den;
}

} // namespace nlpesim
