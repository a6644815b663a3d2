#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Best average fidelity a classical (measure-and-prepare) memory can reach
// when the source emits n photons with probability pmf[n] and the memory
// may postselect which trials count, as long as its overall success
// probability matches the quantum device. An intercepted n-photon state is
// estimated and reprepared with fidelity (n+1)/(n+2), so the optimum
// spends the success budget on the largest photon numbers first.
inline double classical_fidelity_bound(const std::vector<double>& pmf, double success) {
    if (pmf.empty())
        throw input_error("classical bound: empty photon number distribution");
    double available = 0.0; // empty-pulse trials cannot be declared successes
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        if (pmf[n] < 0.0)
            throw input_error("classical bound: negative probability");
        if (n >= 1)
            available += pmf[n];
    }
    if (success <= 0.0 || success > 1.0)
        throw input_error("classical bound: success probability must lie in (0,1]");
    if (success > available + 1e-12)
        throw input_error("classical bound: success probability exceeds the weight of nonempty "
                          "pulses, the postselection strategy is infeasible");

    double remaining = success;
    double numerator = 0.0;
    for (std::size_t n = pmf.size(); n-- > 1 && remaining > 0.0;) {
        const double take = std::min(pmf[n], remaining);
        if (take <= 0.0)
            continue;
        const double nn = static_cast<double>(n);
        numerator += take * (nn + 1.0) / (nn + 2.0);
        remaining -= take;
    }
    return numerator / success;
}

inline std::vector<double> poisson_pmf(double mean, double tail_tol = 1e-15) {
    if (mean <= 0.0)
        throw input_error("classical bound: mean photon number must be positive");
    std::vector<double> pmf;
    double term = std::exp(-mean); // P(0)
    double cumulative = 0.0;
    std::size_t n = 0;
    while (true) {
        pmf.push_back(term);
        cumulative += term;
        if (1.0 - cumulative < tail_tol && static_cast<double>(n) > mean)
            break;
        ++n;
        term *= mean / static_cast<double>(n);
        if (n > 4096)
            throw input_error("classical bound: photon number expansion does not terminate");
    }
    return pmf;
}

// Poisson source of mean mu, e.g. an attenuated laser probe.
inline double classical_fidelity_bound_poisson(double mean, double success) {
    return classical_fidelity_bound(poisson_pmf(mean), success);
}

} // namespace nlpesim
