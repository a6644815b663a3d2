#include <catch2/catch_amalgamated.hpp>

#include "nlpesim/spectro/strengths.hpp"

#include <cmath>

using namespace nlpesim;

namespace {

SpectrumModel default_model() {
    SpectrumModel m;
    m.structure = default_level_structure();
    m.table = default_transition_table();
    return m;
}

} // namespace

TEST_CASE("relative oscillator strengths from sink antiholes", "[strengths]") {
    const auto model = default_model();
    const auto grid = make_grid(-280.0, 280.0, 0.02);
    StrengthsConfig cfg;
    cfg.pump_threads = resolve_threads(0);

    const auto report = measure_relative_strengths(model, grid, cfg);

    CHECK(report.measured_ground == SpinLabel::three_half);
    CHECK(report.w0_offset_mhz == Catch::Approx(82.5));

    // Antihole lines of the emptied-into level, quoted relative to the
    // 5/2g -> 5/2e reference line.
    const double expect_pos[3] = {-112.04, -49.68, 57.24};
    const double expect_strength[3] = {0.184, 0.727, 0.089};
    for (int e = 0; e < 3; ++e) {
        CHECK(report.position_rel_w0_mhz[e] == Catch::Approx(expect_pos[e]).margin(0.05));
        CHECK(report.delta_d[e] > 0.0);
        CHECK(report.relative_strength[e] ==
              Catch::Approx(expect_strength[e]).epsilon(0.05));
    }

    // Normalized to unit sum.
    CHECK(report.relative_strength[0] + report.relative_strength[1] +
              report.relative_strength[2] ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("strength ratios track the branching table row", "[strengths]") {
    // Crank one branching entry and the corresponding antihole must deepen
    // proportionally: the measurement reads the table, not a lookup.
    auto model = default_model();
    auto& g = model.table.gamma;
    // Pull weight from 3/2g,3/2e into 3/2g,1/2e while keeping both the row
    // and the affected columns stochastic via compensating shifts.
    const double shift = 0.10;
    g[1][0] += shift; // 3/2g -> 1/2e
    g[1][1] -= shift; // 3/2g -> 3/2e
    g[0][0] -= shift; // 1/2g -> 1/2e
    g[0][1] += shift; // 1/2g -> 3/2e
    model.table.validate();

    const auto grid = make_grid(-280.0, 280.0, 0.02);
    StrengthsConfig cfg;
    cfg.pump_threads = resolve_threads(0);
    const auto report = measure_relative_strengths(model, grid, cfg);

    CHECK(report.relative_strength[0] == Catch::Approx(0.284).epsilon(0.05));
    CHECK(report.relative_strength[1] == Catch::Approx(0.627).epsilon(0.05));
    CHECK(report.relative_strength[2] == Catch::Approx(0.089).epsilon(0.05));
}
