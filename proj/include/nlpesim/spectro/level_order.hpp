#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nlpesim/core/levels.hpp"
#include "nlpesim/core/transition_table.hpp"
#include "nlpesim/spectro/pump.hpp"
#include "nlpesim/spectro/spectrum.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// Dual-frequency burn used to settle the level ordering: one tone on the
// reference transition, one displaced by a hyperfine gap. If the gap matches
// the real structure, both tones address the same classes and empty two
// ground levels at once; the third level then collects 2/3 of those classes
// instead of the sum of the two single-burn transfers, so the antihole at
// its transition grows superadditively.
struct DualBurnExperiment {
    double tone2_offset_mhz = -29.54;
    double tone_bandwidth_mhz = 0.2;
    Polarization pol = Polarization::H;
    int pump_threads = 1;

    PumpSchedule dual_schedule() const {
        PumpSchedule s;
        s.tones = {PumpTone{0.0, tone_bandwidth_mhz, 1.0, 0.0},
                   PumpTone{tone2_offset_mhz, tone_bandwidth_mhz, 1.0, 0.0}};
        return s;
    }
    PumpSchedule single_schedule(int which) const {
        PumpSchedule s;
        s.tones = {PumpTone{which == 0 ? 0.0 : tone2_offset_mhz, tone_bandwidth_mhz, 1.0, 0.0}};
        return s;
    }
};

// A predicted enhanced antihole: where a candidate structure expects
// superadditive growth, and with what weight (sum over dual-resonant
// classes of the sink level's branching into the line at that position).
struct PredictedAntihole {
    double position_mhz = 0.0;
    double weight = 0.0;
};

// All superadditive antihole positions a candidate structure predicts for
// the dual burn. For every class resonant with both tones through two
// different ground levels, the remaining ground level is the sink; its
// three transitions carry the enhancement.
inline std::vector<PredictedAntihole>
predict_superadditive_antiholes(const HyperfineStructure& candidate, const TransitionTable& table,
                                double tone2_offset_mhz, double merge_tol_mhz = 1e-6) {
    candidate.validate();
    std::vector<PredictedAntihole> out;
    auto add = [&](double pos, double w) {
        for (auto& p : out)
            if (std::abs(p.position_mhz - pos) < merge_tol_mhz) {
                p.weight += w;
                return;
            }
        out.push_back(PredictedAntihole{pos, w});
    };

    // Candidate classes: one per transition resonant with either tone,
    // deduplicated so a class resonant with both tones is visited once.
    std::vector<double> uniq;
    for (int g = 0; g < 3; ++g)
        for (int e = 0; e < 3; ++e) {
            const double t = transition_frequency_mhz(candidate, static_cast<SpinLabel>(g),
                                                      static_cast<SpinLabel>(e));
            for (double d : {-t, tone2_offset_mhz - t}) {
                bool seen = false;
                for (double u : uniq)
                    if (std::abs(u - d) < merge_tol_mhz)
                        seen = true;
                if (!seen)
                    uniq.push_back(d);
            }
        }

    for (double delta : uniq) {
        bool pumped[3] = {false, false, false};
        bool by_tone[2] = {false, false};
        for (int g = 0; g < 3; ++g)
            for (int e = 0; e < 3; ++e) {
                const double line =
                    delta + transition_frequency_mhz(candidate, static_cast<SpinLabel>(g),
                                                     static_cast<SpinLabel>(e));
                if (std::abs(line) < merge_tol_mhz) {
                    pumped[g] = true;
                    by_tone[0] = true;
                }
                if (std::abs(line - tone2_offset_mhz) < merge_tol_mhz) {
                    pumped[g] = true;
                    by_tone[1] = true;
                }
            }
        const int n_pumped = pumped[0] + pumped[1] + pumped[2];
        // Superadditive needs both tones on the class and exactly one level
        // left as a sink; a fully driven class just cycles.
        if (!(by_tone[0] && by_tone[1]) || n_pumped != 2)
            continue;
        int sink = 0;
        for (int g = 0; g < 3; ++g)
            if (!pumped[g])
                sink = g;
        for (int e = 0; e < 3; ++e) {
            const double pos =
                delta + transition_frequency_mhz(candidate, static_cast<SpinLabel>(sink),
                                                 static_cast<SpinLabel>(e));
            add(pos, dual_pump_excess_population() *
                         table(static_cast<SpinLabel>(sink), static_cast<SpinLabel>(e)));
        }
    }

    std::sort(out.begin(), out.end(), [](const PredictedAntihole& a, const PredictedAntihole& b) {
        return a.weight > b.weight;
    });
    return out;
}

struct CandidateVerdict {
    HyperfineStructure structure;
    double predicted_position_mhz = 0.0;
    double predicted_weight = 0.0;
    double delta_d_dual = 0.0;
    double delta_d_single0 = 0.0;
    double delta_d_single1 = 0.0;
    double margin = 0.0; // dual / (single0 + single1)
    bool superadditive = false;
};

struct OrderingReport {
    std::vector<CandidateVerdict> candidates;
    int chosen = -1; // index into candidates; -1 when inconclusive
    double threshold = 0.2;

    bool conclusive() const { return chosen >= 0; }
};

// Runs the dual-burn experiment on a medium with the given true structure
// and judges each candidate ordering at its own predicted enhanced-antihole
// position. A candidate is accepted when the measured depth change exceeds
// (1 + threshold) times the sum of the single-burn depth changes there.
inline OrderingReport infer_level_order(const std::vector<HyperfineStructure>& candidates,
                                        const DualBurnExperiment& experiment,
                                        const SpectrumModel& data_model,
                                        const DetuningGrid& grid, double threshold = 0.2) {
    if (candidates.size() != 2)
        throw input_error("level order: exactly two candidate orderings are compared");
    data_model.validate();

    const auto state_dual =
        pump_populations(data_model.structure, data_model.table, experiment.dual_schedule(),
                         data_model.medium, grid, experiment.pump_threads);
    const auto state_s0 =
        pump_populations(data_model.structure, data_model.table, experiment.single_schedule(0),
                         data_model.medium, grid, experiment.pump_threads);
    const auto state_s1 =
        pump_populations(data_model.structure, data_model.table, experiment.single_schedule(1),
                         data_model.medium, grid, experiment.pump_threads);
    const auto unburned = PopulationState::equal(grid);

    OrderingReport report;
    report.threshold = threshold;
    for (const auto& cand : candidates) {
        CandidateVerdict v;
        v.structure = cand;
        const auto predicted = predict_superadditive_antiholes(cand, data_model.table,
                                                               experiment.tone2_offset_mhz);
        if (predicted.empty()) {
            report.candidates.push_back(v);
            continue;
        }
        v.predicted_position_mhz = predicted.front().position_mhz;
        v.predicted_weight = predicted.front().weight;

        const double x = v.predicted_position_mhz;
        const double d_ref = depth_at(data_model, unburned, experiment.pol, x);
        v.delta_d_dual = depth_at(data_model, state_dual, experiment.pol, x) - d_ref;
        v.delta_d_single0 = depth_at(data_model, state_s0, experiment.pol, x) - d_ref;
        v.delta_d_single1 = depth_at(data_model, state_s1, experiment.pol, x) - d_ref;
        const double single_sum = v.delta_d_single0 + v.delta_d_single1;
        v.margin = single_sum > 0.0 ? v.delta_d_dual / single_sum
                                    : (v.delta_d_dual > 0.0 ? std::numeric_limits<double>::infinity()
                                                            : 0.0);
        v.superadditive = v.delta_d_dual > (1.0 + threshold) * single_sum && v.delta_d_dual > 0.0;
        report.candidates.push_back(v);
    }

    int best = -1;
    for (std::size_t i = 0; i < report.candidates.size(); ++i) {
        const auto& v = report.candidates[i];
        if (!v.superadditive)
            continue;
        if (best < 0 || v.margin > report.candidates[static_cast<std::size_t>(best)].margin)
            best = static_cast<int>(i);
    }
    report.chosen = best;
    return report;
}

} // namespace nlpesim
