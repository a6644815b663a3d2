#include <catch2/catch_amalgamated.hpp>

#include "nlpesim/init/prepare.hpp"
#include "nlpesim/nlpe/sequence.hpp"
#include "nlpesim/util/parallel.hpp"

#include <cmath>
#include <optional>

using namespace nlpesim;

namespace {

SpectrumModel default_model() {
    SpectrumModel m;
    m.structure = default_level_structure();
    m.table = default_transition_table();
    return m;
}

const PreparedMedium& prepared_medium() {
    static const PreparedMedium p = [] {
        InitializationConfig cfg;
        cfg.pump_threads = resolve_threads(0);
        return run_initialization(default_model(), default_frequency_plan(),
                                  make_grid(-80.0, 80.0, 0.02), cfg);
    }();
    return p;
}

std::optional<EchoRecord> echo_near(const SequenceReport& r, double t_us) {
    for (const auto& e : r.echoes)
        if (std::abs(e.time_us - t_us) < 1e-9)
            return e;
    return std::nullopt;
}

SequenceReport run_default(const SequenceConfig& cfg, Polarization pol = Polarization::H) {
    const auto s = default_level_structure();
    const auto plan = default_frequency_plan();
    const TimingPlan timing;
    return run_sequence(prepared_medium(), pol, s, plan, timing,
                        default_pulse_sequence(s, plan, timing), cfg);
}

} // namespace

TEST_CASE("four-pulse sequence rephases at the two predicted times", "[sequence]") {
    const TimingPlan timing;
    const auto expect = echo_times(timing);
    const auto report = run_default(SequenceConfig{});

    const auto silenced = echo_near(report, expect.silenced_us);
    const auto emitted = echo_near(report, expect.emitted_us);
    REQUIRE(silenced.has_value());
    REQUIRE(emitted.has_value());

    CHECK(std::abs(silenced->time_us - 19.25) < 1e-9);
    CHECK(std::abs(emitted->time_us - 44.5) < 1e-9);

    // Counter-propagating controls: the intermediate echo radiates with the
    // wrong wavevector and is silenced; the final echo is phase-matched.
    CHECK_FALSE(silenced->phase_matched);
    CHECK(silenced->sig_quanta == -1);
    CHECK(silenced->ctrl_quanta == 2);
    CHECK(silenced->efficiency == 0.0); // suppression defaults to 0

    CHECK(emitted->phase_matched);
    CHECK(emitted->sig_quanta == 1);
    CHECK(emitted->ctrl_quanta == 0);
    CHECK(emitted->efficiency > 0.0);
    CHECK(report.absorbed_norm > 0.0);
}

TEST_CASE("co-propagating diagnostic matches both echoes", "[sequence]") {
    SequenceConfig cfg;
    cfg.geometry = Geometry::co_propagating;
    const TimingPlan timing;
    const auto expect = echo_times(timing);
    const auto report = run_default(cfg);

    const auto silenced = echo_near(report, expect.silenced_us);
    const auto emitted = echo_near(report, expect.emitted_us);
    REQUIRE(silenced.has_value());
    REQUIRE(emitted.has_value());
    CHECK(silenced->phase_matched); // -1 + 2 = 1: ledgers merge
    CHECK(emitted->phase_matched);
    CHECK(silenced->efficiency > 0.0);
}

TEST_CASE("transfer losses factor out of the echo amplitude exactly", "[sequence]") {
    SequenceConfig cfg;
    cfg.transfer_efficiency = 0.9;
    const TimingPlan timing;
    const auto report = run_default(cfg);
    const auto emitted = echo_near(report, echo_times(timing).emitted_us);
    REQUIRE(emitted.has_value());

    // Ideal pipe: the echo amplitude relative to the absorbed input is the
    // two-way transfer loss and nothing else.
    CHECK(emitted->relative_amplitude == Catch::Approx(0.81).margin(1e-12));
    CHECK(emitted->efficiency ==
          Catch::Approx(echo_efficiency(report.peak_depth, 0.9, 1.0)).margin(1e-12));

    // And with the lumped decoherence factor applied on top.
    cfg.decoherence_factor = 0.5;
    const auto damped = run_default(cfg);
    const auto emitted2 = echo_near(damped, echo_times(timing).emitted_us);
    REQUIRE(emitted2.has_value());
    CHECK(emitted2->efficiency ==
          Catch::Approx(echo_efficiency(damped.peak_depth, 0.9, 0.5)).margin(1e-12));
}

TEST_CASE("spin detuning is a global phase on the stored coherence", "[sequence]") {
    const TimingPlan timing;
    SequenceConfig cfg;
    const auto base = run_default(cfg);
    cfg.spin_detuning_mhz = 0.37;
    const auto detuned = run_default(cfg);

    const auto e0 = echo_near(base, echo_times(timing).emitted_us);
    const auto e1 = echo_near(detuned, echo_times(timing).emitted_us);
    REQUIRE(e0.has_value());
    REQUIRE(e1.has_value());
    CHECK(e1->relative_amplitude == Catch::Approx(e0->relative_amplitude).margin(1e-12));
}

TEST_CASE("optical decoherence damps the echo monotonically", "[sequence]") {
    const TimingPlan timing;
    double last = 2.0;
    for (double rate : {0.0, 0.005, 0.02}) {
        SequenceConfig cfg;
        cfg.rates.optical_per_us = rate;
        const auto report = run_default(cfg);
        const auto emitted = echo_near(report, echo_times(timing).emitted_us);
        REQUIRE(emitted.has_value());
        CHECK(emitted->relative_amplitude < last);
        last = emitted->relative_amplitude;
    }
}

TEST_CASE("sequence validates its pulse list and medium", "[sequence]") {
    const auto s = default_level_structure();
    const auto plan = default_frequency_plan();
    const TimingPlan timing;
    auto pulses = default_pulse_sequence(s, plan, timing);

    SECTION("input pulse must come first") {
        std::vector<PulseSpec> reordered(pulses.begin() + 1, pulses.end());
        CHECK_THROWS_AS(run_sequence(prepared_medium(), Polarization::H, s, plan, timing,
                                     reordered, SequenceConfig{}),
                        config_error);
    }

    SECTION("pulses must be time-ordered") {
        std::swap(pulses[1].time_us, pulses[2].time_us);
        CHECK_THROWS_AS(run_sequence(prepared_medium(), Polarization::H, s, plan, timing, pulses,
                                     SequenceConfig{}),
                        config_error);
    }

    SECTION("an empty medium absorbs nothing") {
        PreparedMedium empty = prepared_medium();
        for (auto& o : empty.state.occupation)
            o = {0.0, 0.0, 0.0};
        CHECK_THROWS_AS(run_sequence(empty, Polarization::H, s, plan, timing, pulses,
                                     SequenceConfig{}),
                        data_error);
    }

    SECTION("config bounds") {
        SequenceConfig cfg;
        cfg.transfer_efficiency = 1.2;
        CHECK_THROWS_AS(cfg.validate(), config_error);
        cfg = SequenceConfig{};
        cfg.suppression = -0.1;
        CHECK_THROWS_AS(cfg.validate(), config_error);
    }
}

TEST_CASE("trace shows the transmitted input and the emitted echo", "[sequence]") {
    const TimingPlan timing;
    const auto report = run_default(SequenceConfig{});
    const auto trace = synthesize_trace(report, timing);
    REQUIRE_FALSE(trace.empty());

    // Intensity near the echo time must rise above the local background.
    double at_echo = 0.0, at_quiet = 0.0;
    for (const auto& p : trace) {
        if (std::abs(p.time_us - 44.5) < 0.1)
            at_echo = std::max(at_echo, p.intensity);
        if (std::abs(p.time_us - 35.0) < 0.1)
            at_quiet = std::max(at_quiet, p.intensity);
    }
    CHECK(at_echo > 10.0 * at_quiet);
}
