#include <catch2/catch_amalgamated.hpp>

#include "nlpesim/channel/counts.hpp"
#include "nlpesim/tomo/mle.hpp"
#include "nlpesim/tomo/montecarlo.hpp"

#include <cmath>
#include <cstdint>
#include <random>

using namespace nlpesim;

namespace {

// Noiseless synthetic counts for an arbitrary channel: expected fractions
// scaled to a fixed trial budget. Rounding is the only distortion.
CountMatrix counts_from_choi(const ChoiMatrix& j, std::uint64_t trials) {
    const auto set = TomoSettings::standard();
    CountMatrix m;
    m.trials_per_setting = trials;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto rho = density_matrix(set.inputs[i]);
        for (std::size_t p = 0; p < 4; ++p) {
            const auto proj = density_matrix(set.projectors[p]);
            const double prob = choi_probability(j, proj, rho);
            m.counts[i][p] = static_cast<std::uint64_t>(
                std::llround(prob * static_cast<double>(trials)));
            m.noise_counts[i][p] = 0;
        }
    }
    return m;
}

ChannelParams calibrated_channel() {
    ChannelParams p;
    p.eta_detection =
        calibrate_eta_detection(9.3, p.mean_photons, p.efficiency_h, p.noise_floor);
    return p;
}

} // namespace

TEST_CASE("zero-noise identity data is recovered almost exactly", "[mle]") {
    ChannelParams p;
    p.efficiency_v = p.efficiency_h; // isotropic: identity channel up to loss
    p.noise_floor = 0.0;
    const auto m = simulate_counts(p, 1000000, 23);

    const auto fit = mle_process(m, NoisePolicy::none);
    CHECK(fit.converged);
    CHECK(fit.fidelity >= 0.999);
    CHECK(fit.chi(0, 0).real() >= 0.999);
    CHECK_NOTHROW(validate_cptp(fit.choi));
}

TEST_CASE("a pure pauli rotation lands on its chi diagonal", "[mle]") {
    const auto m = counts_from_choi(choi_from_kraus(pauli_matrix(1)), 1000000);
    const auto fit = mle_process(m, NoisePolicy::none);
    CHECK(fit.chi(1, 1).real() >= 0.99);
    CHECK(fit.fidelity <= 0.01);
}

TEST_CASE("reconstruction is CPTP for arbitrary count matrices", "[mle][property]") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<std::uint64_t> big(1, 5000);
    std::uniform_int_distribution<std::uint64_t> small(0, 20);
    for (int trial = 0; trial < 30; ++trial) {
        CountMatrix m;
        m.trials_per_setting = 10000;
        for (int i = 0; i < 4; ++i)
            for (int p = 0; p < 4; ++p) {
                m.counts[i][p] = big(rng);
                m.noise_counts[i][p] = small(rng);
            }
        const auto policy = trial % 3 == 0 ? NoisePolicy::model : NoisePolicy::none;
        const auto fit = mle_process(m, policy);
        CHECK_NOTHROW(validate_cptp(fit.choi));
        CHECK(fit.fidelity >= -1e-9);
        CHECK(fit.fidelity <= 1.0 + 1e-9);
        CHECK((fit.choi - choi_from_chi(fit.chi)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("more iterations never lower the likelihood", "[mle]") {
    const auto m = simulate_counts(calibrated_channel(), 30000, 1);
    double last = -1e300;
    for (std::size_t iters : {3u, 30u, 300u, 100000u}) {
        MleOptions opt;
        opt.max_iterations = iters;
        const auto fit = mle_process(m, NoisePolicy::none, opt);
        CHECK(fit.log_likelihood >= last - 1e-9);
        last = fit.log_likelihood;
    }
}

TEST_CASE("the fit beats every depolarizing-family candidate", "[mle]") {
    const auto m = simulate_counts(calibrated_channel(), 30000, 2);
    const auto fit = mle_process(m, NoisePolicy::none);

    const auto s = detail::measurement_operators(TomoSettings::standard());
    const auto data = detail::prepare_fit_data(m, NoisePolicy::none);
    CHECK(fit.log_likelihood ==
          Catch::Approx(detail::log_likelihood(data, s, fit.choi)).margin(1e-6));

    double best = -1e300;
    for (int k = 0; k <= 100; ++k) {
        const double q = k / 100.0;
        ChoiMatrix j = (1.0 - 0.75 * q) * identity_choi();
        for (int mm = 1; mm < 4; ++mm)
            j += 0.25 * q * choi_from_kraus(pauli_matrix(mm));
        best = std::max(best, detail::log_likelihood(data, s, j));
    }
    CHECK(fit.log_likelihood >= best - 1e-6);
}

TEST_CASE("relabeled settings give the same reconstruction", "[mle]") {
    const auto m = simulate_counts(calibrated_channel(), 30000, 3);

    // Swap the roles of H and V consistently in data and description.
    CountMatrix swapped = m;
    for (int i = 0; i < 4; ++i)
        for (int p = 0; p < 4; ++p) {
            const int si = i < 2 ? 1 - i : i;
            const int sp = p < 2 ? 1 - p : p;
            swapped.counts[si][sp] = m.counts[i][p];
            swapped.noise_counts[si][sp] = m.noise_counts[i][p];
        }
    TomoSettings relabeled = TomoSettings::standard();
    std::swap(relabeled.inputs[0], relabeled.inputs[1]);
    std::swap(relabeled.projectors[0], relabeled.projectors[1]);

    const auto base = mle_process(m, NoisePolicy::none);
    const auto alt = mle_process(swapped, NoisePolicy::none, MleOptions{}, relabeled);
    CHECK(alt.fidelity == Catch::Approx(base.fidelity).margin(1e-6));
    CHECK(alt.log_likelihood == Catch::Approx(base.log_likelihood).margin(1e-6));
}

TEST_CASE("noise policies transform the click matrix as documented", "[mle]") {
    CountMatrix m;
    m.trials_per_setting = 1000;
    for (int i = 0; i < 4; ++i)
        for (int p = 0; p < 4; ++p) {
            m.counts[i][p] = 100;
            m.noise_counts[i][p] = 10;
        }
    m.counts[0][0] = 300;
    m.noise_counts[0][3] = 150; // background above the clicks in one cell

    const auto none = measured_probabilities(m, NoisePolicy::none);
    CHECK(none[0][0] == Catch::Approx(300.0 / 400.0));
    CHECK(none[1][2] == Catch::Approx(100.0 / 200.0));

    const auto model = measured_probabilities(m, NoisePolicy::model);
    CHECK(model[0][0] == Catch::Approx((300.0 - 10.0) / (400.0 - 20.0)));

    const auto sub = measured_probabilities(m, NoisePolicy::subtract);
    CHECK(sub[0][3] == 0.0); // clamped at zero
    CHECK(sub[0][0] == Catch::Approx(290.0 / (290.0 + 90.0)));

    CHECK(noise_policy_from_string("subtract") == NoisePolicy::subtract);
    CHECK(std::string(to_string(NoisePolicy::model)) == "model");
    CHECK_THROWS_AS(noise_policy_from_string("ignore"), input_error);
}

TEST_CASE("degenerate count matrices raise labeled data errors", "[mle]") {
    CountMatrix empty;
    empty.trials_per_setting = 1000;
    CHECK_THROWS_MATCHES(mle_process(empty, NoisePolicy::none), data_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not enough data")));

    CountMatrix drowned;
    drowned.trials_per_setting = 1000;
    for (int i = 0; i < 4; ++i)
        for (int p = 0; p < 4; ++p) {
            drowned.counts[i][p] = 10;
            drowned.noise_counts[i][p] = 30;
        }
    CHECK_THROWS_MATCHES(mle_process(drowned, NoisePolicy::model), data_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("background exceeds")));
}

TEST_CASE("bootstrap spread is reproducible and scales with statistics", "[montecarlo]") {
    const auto p = calibrated_channel();
    const auto m = simulate_counts(p, 30000, 5);

    const auto a = mc_process_fidelity(m, NoisePolicy::none, 100, 99);
    const auto b = mc_process_fidelity(m, NoisePolicy::none, 100, 99);
    CHECK(a.mean_fidelity == b.mean_fidelity);
    CHECK(a.std_fidelity == b.std_fidelity);
    CHECK(a.resamples == 100);
    CHECK(a.excluded == 0);
    CHECK(a.fidelities.size() == 100);
    CHECK(a.std_fidelity > 0.0);

    // Four times the counts shrinks the spread, though not by the naive
    // factor of two: the CPTP projection contracts the resampled cloud more
    // at low counts, so the constrained spread scales sublinearly.
    const auto m4 = simulate_counts(p, 120000, 5);
    const auto c = mc_process_fidelity(m4, NoisePolicy::none, 100, 99);
    CHECK(c.std_fidelity < 0.9 * a.std_fidelity);
    CHECK(c.std_fidelity > 0.4 * a.std_fidelity);

    CHECK_THROWS_AS(mc_process_fidelity(m, NoisePolicy::none, 1, 99), input_error);
}
