#pragma once

#include <array>
#include <cmath>
#include <string>

#include "nlpesim/core/levels.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Relative oscillator strengths gamma[g][e] between ground and excited
// hyperfine levels, indexed by label (not rung). Rows and columns each sum
// to 1: the table is doubly stochastic up to measurement rounding.
struct TransitionTable {
    std::array<std::array<double, 3>, 3> gamma{};

    double operator()(SpinLabel g, SpinLabel e) const {
        return gamma[static_cast<std::size_t>(g)][static_cast<std::size_t>(e)];
    }

    double row_sum(SpinLabel g) const {
        const auto& r = gamma[static_cast<std::size_t>(g)];
        return r[0] + r[1] + r[2];
    }

    double col_sum(SpinLabel e) const {
        const auto j = static_cast<std::size_t>(e);
        return gamma[0][j] + gamma[1][j] + gamma[2][j];
    }

    void validate(double tol = 1e-3) const {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double v = gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (!(v > 0.0) || !(v < 1.0))
                    throw input_error("transition table: entries must lie strictly inside (0,1)");
            }
        }
        for (int i = 0; i < 3; ++i) {
            const auto l = static_cast<SpinLabel>(i);
            if (std::abs(row_sum(l) - 1.0) > tol)
                throw input_error(std::string("transition table: row ") + to_string(l) +
                                  " does not sum to 1 within tolerance");
            if (std::abs(col_sum(l) - 1.0) > tol)
                throw input_error(std::string("transition table: column ") + to_string(l) +
                                  " does not sum to 1 within tolerance");
        }
    }
};

// Measured branching ratios for the 580 nm line of the odd europium isotope
// in the site used here. Rows: ground 1/2, 3/2, 5/2; columns: excited same.
inline TransitionTable default_transition_table() {
    TransitionTable t;
    t.gamma = {{{0.771, 0.144, 0.085},
                {0.184, 0.727, 0.089},
                {0.045, 0.129, 0.826}}};
    return t;
}

} // namespace nlpesim
