#include <catch2/catch_amalgamated.hpp>

#include "nlpesim/tomo/classical_bound.hpp"
#include "nlpesim/util/error.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace nlpesim;

TEST_CASE("deterministic single photons give exactly two thirds", "[classical-bound]") {
    const std::vector<double> pmf{0.0, 1.0};
    CHECK(classical_fidelity_bound(pmf, 1.0) == 2.0 / 3.0);
    // Success probability cancels when only n=1 is available.
    CHECK(classical_fidelity_bound(pmf, 0.25) == 2.0 / 3.0);
}

TEST_CASE("greedy bound on a hand-checked distribution", "[classical-bound]") {
    const std::vector<double> pmf{0.5, 0.3, 0.2};

    // Success small enough to herald only two-photon events: (2+1)/(2+2).
    CHECK(classical_fidelity_bound(pmf, 0.1) == Catch::Approx(0.75).margin(1e-12));
    // Digging into n=1: (0.2 * 3/4 + 0.15 * 2/3) / 0.35 = 5/7.
    CHECK(classical_fidelity_bound(pmf, 0.35) == Catch::Approx(5.0 / 7.0).margin(1e-12));
    // Everything non-vacuum heralded.
    CHECK(classical_fidelity_bound(pmf, 0.5) == Catch::Approx(0.7).margin(1e-12));
    // Vacuum cannot be heralded.
    CHECK_THROWS_AS(classical_fidelity_bound(pmf, 0.5 + 1e-6), input_error);
    CHECK_THROWS_AS(classical_fidelity_bound({1.0}, 0.1), input_error);
    CHECK_THROWS_AS(classical_fidelity_bound(pmf, 0.0), input_error);
    CHECK_THROWS_AS(classical_fidelity_bound(pmf, 1.1), input_error);
}

TEST_CASE("poisson pmf helper", "[classical-bound]") {
    const double mean = 1.10;
    const auto pmf = poisson_pmf(mean);
    REQUIRE(pmf.size() >= 8);
    CHECK(pmf[0] == Catch::Approx(std::exp(-mean)).margin(1e-15));
    CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == Catch::Approx(1.0).margin(1e-12));
    double m1 = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n)
        m1 += static_cast<double>(n) * pmf[n];
    CHECK(m1 == Catch::Approx(mean).margin(1e-9));
}

TEST_CASE("bound for the experimental operating point", "[classical-bound]") {
    const double bound = classical_fidelity_bound_poisson(1.10, 0.05);
    CHECK(bound >= 0.80);
    CHECK(bound <= 0.88);
    // Multi-photon events push the cheat strategy above the n=1 limit.
    CHECK(bound > 2.0 / 3.0);
}

TEST_CASE("bound is monotone in photon number and efficiency", "[classical-bound]") {
    for (int i = 0; i < 10; ++i) {
        const double mean = 0.2 + 0.2 * i;
        double last = 2.0;
        for (int j = 0; j < 10; ++j) {
            const double success = 0.01 + 0.01 * j;
            const double b = classical_fidelity_bound_poisson(mean, success);
            // Harder heralding forces lower-n components into the mix.
            CHECK(b <= last + 1e-12);
            last = b;
        }
    }
    for (int j = 0; j < 10; ++j) {
        const double success = 0.01 + 0.01 * j;
        double last = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double mean = 0.2 + 0.2 * i;
            const double b = classical_fidelity_bound_poisson(mean, success);
            CHECK(b >= last - 1e-12);
            last = b;
        }
    }
}
