#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nlpesim/core/frequency_plan.hpp"
#include "nlpesim/core/levels.hpp"
#include "nlpesim/nlpe/pulse.hpp"
#include "nlpesim/spectro/pump.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// The four levels of the storage subsystem.
enum class QLevel : int { g0 = 0, g1 = 1, e0 = 2, e1 = 3 };

inline bool is_excited(QLevel l) { return static_cast<int>(l) >= 2; }

inline const char* to_string(QLevel l) {
    switch (l) {
    case QLevel::g0: return "1/2g";
    case QLevel::g1: return "3/2g";
    case QLevel::e0: return "1/2e";
    default: return "3/2e";
    }
}

// The plan frequencies restricted to the four-level subsystem, with each
// pulse frequency mapped to the transition it drives.
struct FourLevelPlan {
    double f0 = 0.0; // (g0, e0), the signal
    double f1 = 0.0; // (g1, e0)
    double f2 = 0.0; // (g0, e1)

    // Which transition a pulse at `center` drives; lower level first.
    std::pair<QLevel, QLevel> transition_for(double center_mhz, double tol = 1e-6) const {
        if (std::abs(center_mhz - f0) < tol)
            return {QLevel::g0, QLevel::e0};
        if (std::abs(center_mhz - f1) < tol)
            return {QLevel::g1, QLevel::e0};
        if (std::abs(center_mhz - f2) < tol)
            return {QLevel::g0, QLevel::e1};
        throw config_error("sequence: pulse frequency is not a transition of the four-level "
                           "storage system");
    }

    double frequency_of(QLevel lo, QLevel hi) const {
        if (lo == QLevel::g0 && hi == QLevel::e0)
            return f0;
        if (lo == QLevel::g1 && hi == QLevel::e0)
            return f1;
        if (lo == QLevel::g0 && hi == QLevel::e1)
            return f2;
        throw config_error("sequence: transition outside the four-level storage system");
    }
};

inline FourLevelPlan four_level_plan(const HyperfineStructure& s, const FrequencyPlan& plan) {
    FourLevelPlan p;
    p.f0 = plan.f0(s);
    p.f1 = plan.f1(s);
    p.f2 = plan.f2(s);
    return p;
}

// One coherence pathway of one detuning bin: a density-matrix element
// |ket><bra| with its amplitude, the accumulated signed optical interval A
// (the detuning phase is exp(i 2 pi delta A), identical rephasing time for
// every bin because A itself is detuning-free), the spin interval likewise,
// and the integer wavevector ledger (signal quanta, control quanta).
struct PathwayTerm {
    QLevel ket = QLevel::g0;
    QLevel bra = QLevel::g0;
    std::complex<double> amp{0.0, 0.0};
    double optical_interval_us = 0.0;
    double spin_interval_us = 0.0;
    int sig_quanta = 0;
    int ctrl_quanta = 0;

    int phase_sign() const { return (is_excited(ket) ? 1 : 0) - (is_excited(bra) ? 1 : 0); }
    bool optical() const { return phase_sign() != 0; }
    bool spin_coherence() const { return ket != bra && !optical(); }
};

struct DecoherenceRates {
    double optical_per_us = 0.0;
    double spin_per_us = 0.0;
};

// Detuning-resolved ensemble around the signal transition. Bin terms hold
// amplitudes; detuning phases stay symbolic in the interval fields.
struct EnsembleState {
    DetuningGrid grid; // offsets from f0
    double time_us = 0.0;
    double spin_detuning_mhz = 0.0;
    std::vector<std::vector<PathwayTerm>> terms;

    static EnsembleState empty(const DetuningGrid& g) {
        EnsembleState s;
        s.grid = g;
        s.terms.assign(g.count, {});
        return s;
    }

    double total_population() const {
        double t = 0.0;
        for (const auto& bin : terms)
            for (const auto& term : bin)
                if (term.ket == term.bra)
                    t += term.amp.real();
        return t;
    }
};

// Free evolution: advances the symbolic phase intervals and applies the
// lumped decoherence decay. Populations are untouched.
inline EnsembleState free_evolve(EnsembleState state, double dt_us,
                                 const DecoherenceRates& rates = {}) {
    if (dt_us < 0.0)
        throw input_error("evolve: negative time step");
    for (auto& bin : state.terms)
        for (auto& term : bin) {
            const int s = term.phase_sign();
            term.optical_interval_us += s * dt_us;
            if (term.spin_coherence())
                term.spin_interval_us += (term.ket == QLevel::g1 ? 1.0 : -1.0) * dt_us;
            if (s != 0)
                term.amp *= std::exp(-rates.optical_per_us * dt_us);
            else if (term.spin_coherence())
                term.amp *= std::exp(-rates.spin_per_us * dt_us);
        }
    state.time_us += dt_us;
    return state;
}

namespace detail {

// Merge terms with identical labels, ledgers and intervals; prune dust.
inline void compact_terms(std::vector<PathwayTerm>& bin) {
    std::vector<PathwayTerm> out;
    for (const auto& t : bin) {
        if (std::abs(t.amp) < 1e-14)
            continue;
        bool merged = false;
        for (auto& o : out) {
            if (o.ket == t.ket && o.bra == t.bra && o.sig_quanta == t.sig_quanta &&
                o.ctrl_quanta == t.ctrl_quanta &&
                std::abs(o.optical_interval_us - t.optical_interval_us) < 1e-12 &&
                std::abs(o.spin_interval_us - t.spin_interval_us) < 1e-12) {
                o.amp += t.amp;
                merged = true;
                break;
            }
        }
        if (!merged)
            out.push_back(t);
    }
    bin.swap(out);
}

} // namespace detail

// Applies one pulse as an instantaneous event at its center time. Control
// (sech) pulses act on every bin within the chirp band as a partial swap on
// their transition with amplitude sqrt(eta_t)*sin(area/2); the untouched
// complement keeps the level. The input pulse seeds the absorbed optical
// coherence from the signal ground-level population, weighted by its own
// spectral envelope. Ledger counts move with each ket/bra level change:
// raising the ket adds one quantum of the pulse's direction, lowering it
// removes one; bra changes count oppositely.
inline EnsembleState apply_pulse(EnsembleState state, const PulseSpec& pulse,
                                 const FourLevelPlan& plan, double eta_t) {
    pulse.validate();
    if (eta_t < 0.0 || eta_t > 1.0)
        throw input_error("pulse: transfer efficiency must lie in [0,1]");

    if (pulse.kind == PulseKind::gaussian_input) {
        const int dq = pulse.direction == DirectionTag::signal ? 1 : 0;
        const int dc = 1 - dq;
        for (std::size_t i = 0; i < state.grid.count; ++i) {
            const double delta = state.grid.value(i);
            const double env =
                gaussian_spectral_amplitude(delta + plan.f0 - pulse.center_mhz, pulse.duration_us);
            std::vector<PathwayTerm> created;
            for (const auto& t : state.terms[i]) {
                if (t.ket == QLevel::g0 && t.bra == QLevel::g0) {
                    PathwayTerm c;
                    c.ket = QLevel::e0;
                    c.bra = QLevel::g0;
                    c.amp = std::complex<double>(0.0, 1.0) * t.amp.real() * env;
                    c.sig_quanta = dq;
                    c.ctrl_quanta = dc;
                    created.push_back(c);
                }
            }
            for (auto& c : created)
                state.terms[i].push_back(c);
            detail::compact_terms(state.terms[i]);
        }
        return state;
    }

    const auto [lo, hi] = plan.transition_for(pulse.center_mhz);
    const double t_amp = std::sqrt(eta_t) * std::abs(std::sin(0.5 * pulse.area));
    const double r_amp = std::sqrt(std::max(0.0, 1.0 - t_amp * t_amp));
    const std::complex<double> up(0.0, t_amp);   // lo -> hi branch
    const std::complex<double> down(0.0, t_amp); // hi -> lo branch
    const int dq = pulse.direction == DirectionTag::signal ? 1 : 0;
    const int dc = 1 - dq;

    const double transition_freq = plan.frequency_of(lo, hi);
    for (std::size_t i = 0; i < state.grid.count; ++i) {
        const double delta = state.grid.value(i);
        // The bin joins when its shifted transition lies in the chirp band.
        if (std::abs(delta + transition_freq - pulse.center_mhz) >
            0.5 * pulse.chirp_bandwidth_mhz)
            continue;
        std::vector<PathwayTerm> next;
        for (const auto& t : state.terms[i]) {
            struct Branch {
                QLevel level;
                std::complex<double> amp;
                int dq, dc;
            };
            auto branches = [&](QLevel l, bool bra_side) {
                std::vector<Branch> b;
                if (l == lo) {
                    b.push_back({lo, r_amp, 0, 0});
                    const std::complex<double> a = bra_side ? std::conj(up) : up;
                    b.push_back({hi, a, bra_side ? -dq : dq, bra_side ? -dc : dc});
                } else if (l == hi) {
                    b.push_back({hi, r_amp, 0, 0});
                    const std::complex<double> a = bra_side ? std::conj(down) : down;
                    b.push_back({lo, a, bra_side ? dq : -dq, bra_side ? dc : -dc});
                } else {
                    b.push_back({l, 1.0, 0, 0});
                }
                return b;
            };
            for (const auto& kb : branches(t.ket, false))
                for (const auto& bb : branches(t.bra, true)) {
                    PathwayTerm n = t;
                    n.ket = kb.level;
                    n.bra = bb.level;
                    n.amp = t.amp * kb.amp * bb.amp;
                    n.sig_quanta += kb.dq + bb.dq;
                    n.ctrl_quanta += kb.dc + bb.dc;
                    next.push_back(n);
                }
        }
        detail::compact_terms(next);
        state.terms[i].swap(next);
    }
    return state;
}

} // namespace nlpesim
