#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlpesim/channel/counts.hpp"
#include "nlpesim/tomo/pauli.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

// How the fit treats the noise-only companion counts:
//   none     - ignore them, fit the raw pair-normalized clicks
//   model    - keep raw clicks and put the measured background into the
//              expected Poisson means (default)
//   subtract - subtract the companion from the clicks first
enum class NoisePolicy { none, model, subtract };

inline const char* to_string(NoisePolicy p) {
    switch (p) {
        case NoisePolicy::none: return "none";
        case NoisePolicy::model: return "model";
        case NoisePolicy::subtract: return "subtract";
    }
    return "?";
}

inline NoisePolicy noise_policy_from_string(const std::string& s) {
    if (s == "none") return NoisePolicy::none;
    if (s == "model") return NoisePolicy::model;
    if (s == "subtract") return NoisePolicy::subtract;
    throw input_error("tomography: unknown noise policy '" + s + "'");
}

struct MleOptions {
    std::size_t max_iterations = 100000;
    double rel_tol = 1e-10;
    std::size_t projection_iterations = 128;
};

struct MleResult {
    ChoiMatrix choi = ChoiMatrix::Zero();
    ChiMatrix chi = ChiMatrix::Zero();
    double fidelity = 0.0;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Preparation and analysis states behind the 4x4 count matrix. The
// standard set is {H, V, D, R} on both sides; tests exercise relabeled
// bases through this hook.
struct TomoSettings {
    std::array<JonesVector, 4> inputs;
    std::array<JonesVector, 4> projectors;

    static TomoSettings standard() {
        TomoSettings s{{jones_state(stokes_settings[0]), jones_state(stokes_settings[1]),
                        jones_state(stokes_settings[2]), jones_state(stokes_settings[3])},
                       {jones_state(stokes_settings[0]), jones_state(stokes_settings[1]),
                        jones_state(stokes_settings[2]), jones_state(stokes_settings[3])}};
        return s;
    }
};

namespace detail {

inline ChoiMatrix kron_out_in(const Eigen::Matrix2cd& out, const Eigen::Matrix2cd& in) {
    ChoiMatrix k;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    k(a * 2 + i, b * 2 + j) = out(a, b) * in(i, j);
    return k;
}

// Measurement operators S_ip = Pi_p x rho_i^T, so p_ip = Re tr(J S_ip).
inline std::array<std::array<ChoiMatrix, 4>, 4> measurement_operators(const TomoSettings& set) {
    std::array<std::array<ChoiMatrix, 4>, 4> s;
    for (std::size_t i = 0; i < 4; ++i) {
        const Eigen::Matrix2cd rho_t = density_matrix(set.inputs[i]).transpose();
        for (std::size_t p = 0; p < 4; ++p) {
            const Eigen::Matrix2cd proj = density_matrix(set.projectors[p]);
            s[i][p] = kron_out_in(proj, rho_t);
        }
    }
    return s;
}

inline ChoiMatrix psd_project(const ChoiMatrix& j) {
    Eigen::SelfAdjointEigenSolver<ChoiMatrix> es(0.5 * (j + j.adjoint()));
    Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

inline ChoiMatrix tp_project(const ChoiMatrix& j) {
    const Eigen::Matrix2cd deficit = Eigen::Matrix2cd::Identity() - trace_out_output(j);
    return j + 0.5 * kron_out_in(Eigen::Matrix2cd::Identity(), deficit);
}

// Dykstra alternation onto the CPTP set (intersection of the PSD cone and
// the trace-preservation affine subspace).
inline ChoiMatrix cptp_project(ChoiMatrix j, std::size_t max_sweeps = 128) {
    ChoiMatrix p = ChoiMatrix::Zero();
    ChoiMatrix x = j;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        const ChoiMatrix y = psd_project(x + p);
        p = x + p - y;
        const ChoiMatrix x_next = tp_project(y);
        const double delta = (x_next - x).cwiseAbs().maxCoeff();
        x = x_next;
        if (delta < 1e-14 && (x - psd_project(x)).cwiseAbs().maxCoeff() < 1e-12)
            break;
    }
    return x;
}

struct FitData {
    // effective clicks and Poisson means: lambda = scale*p + offset
    std::array<std::array<double, 4>, 4> clicks{};
    std::array<std::array<double, 4>, 4> offset{};
    std::array<double, 4> scale{};
};

inline FitData prepare_fit_data(const CountMatrix& m, NoisePolicy policy) {
    FitData d;
    for (std::size_t i = 0; i < 4; ++i) {
        const double n_ref = static_cast<double>(m.pair_reference(i));
        if (n_ref <= 0.0)
            throw data_error("tomography: no clicks in the {H,V} pair for input " +
                             std::string(to_string(stokes_settings[i])) +
                             ", not enough data to normalize");
        double noise_pair = 0.0;
        for (std::size_t p = 0; p < 4; ++p) {
            const double n = static_cast<double>(m.counts[i][p]);
            const double b = static_cast<double>(m.noise_counts[i][p]);
            switch (policy) {
                case NoisePolicy::none:
                    d.clicks[i][p] = n;
                    d.offset[i][p] = 0.0;
                    break;
                case NoisePolicy::model:
                    d.clicks[i][p] = n;
                    d.offset[i][p] = b;
                    break;
                case NoisePolicy::subtract:
                    d.clicks[i][p] = std::max(n - b, 0.0);
                    d.offset[i][p] = 0.0;
                    break;
            }
            if (p < 2)
                noise_pair += static_cast<double>(m.noise_counts[i][p]);
        }
        switch (policy) {
            case NoisePolicy::none:
                d.scale[i] = n_ref;
                break;
            case NoisePolicy::model:
                d.scale[i] = n_ref - noise_pair;
                break;
            case NoisePolicy::subtract:
                d.scale[i] = d.clicks[i][0] + d.clicks[i][1];
                break;
        }
        if (d.scale[i] <= 0.0)
            throw data_error("tomography: background exceeds the clicks for input " +
                             std::string(to_string(stokes_settings[i])));
    }
    return d;
}

inline double log_likelihood(const FitData& d,
                             const std::array<std::array<ChoiMatrix, 4>, 4>& s,
                             const ChoiMatrix& j) {
    double ll = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t p = 0; p < 4; ++p) {
            const double prob = (j * s[i][p]).trace().real();
            const double lambda = std::max(d.scale[i] * prob + d.offset[i][p], 1e-12);
            ll += d.clicks[i][p] * std::log(lambda) - lambda;
        }
    return ll;
}

inline ChoiMatrix likelihood_gradient(const FitData& d,
                                      const std::array<std::array<ChoiMatrix, 4>, 4>& s,
                                      const ChoiMatrix& j) {
    ChoiMatrix g = ChoiMatrix::Zero();
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t p = 0; p < 4; ++p) {
            const double prob = (j * s[i][p]).trace().real();
            const double lambda = std::max(d.scale[i] * prob + d.offset[i][p], 1e-12);
            g += (d.clicks[i][p] / lambda - 1.0) * d.scale[i] * s[i][p];
        }
    return 0.5 * (g + g.adjoint());
}

} // namespace nlpesim::detail

// Pair-normalized click fractions: every input is normalized by its own
// {H,V} analyzer sum, which a trace-preserving map sends to 1.
inline std::array<std::array<double, 4>, 4> measured_probabilities(const CountMatrix& m,
                                                                   NoisePolicy policy) {
    const detail::FitData d = detail::prepare_fit_data(m, policy);
    std::array<std::array<double, 4>, 4> prob{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t p = 0; p < 4; ++p)
            prob[i][p] = (d.clicks[i][p] - d.offset[i][p]) / d.scale[i];
    return prob;
}

// Direct linear inversion of the 16 pair-normalized probabilities; the
// result is Hermitian but not necessarily CPTP. Used as the fit seed and
// as an independent cross-check of the iterative estimate.
inline ChoiMatrix linear_inversion_choi(const std::array<std::array<double, 4>, 4>& prob,
                                        const TomoSettings& settings = TomoSettings::standard()) {
    const auto s = detail::measurement_operators(settings);
    // Hermitian basis: 4 diagonal units, then (m,n) real and imaginary pairs.
    std::vector<ChoiMatrix> basis;
    for (int a = 0; a < 4; ++a) {
        ChoiMatrix e = ChoiMatrix::Zero();
        e(a, a) = 1.0;
        basis.push_back(e);
    }
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            ChoiMatrix re = ChoiMatrix::Zero();
            re(a, b) = re(b, a) = 1.0;
            basis.push_back(re);
            ChoiMatrix im = ChoiMatrix::Zero();
            im(a, b) = std::complex<double>(0.0, 1.0);
            im(b, a) = std::complex<double>(0.0, -1.0);
            basis.push_back(im);
        }
    Eigen::MatrixXd design(16, 16);
    Eigen::VectorXd rhs(16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t p = 0; p < 4; ++p) {
            const int row = static_cast<int>(i * 4 + p);
            rhs(row) = prob[i][p];
            for (std::size_t k = 0; k < basis.size(); ++k)
                design(row, static_cast<int>(k)) = (basis[k] * s[i][p]).trace().real();
        }
    const Eigen::VectorXd x = design.colPivHouseholderQr().solve(rhs);
    ChoiMatrix j = ChoiMatrix::Zero();
    for (std::size_t k = 0; k < basis.size(); ++k)
        j += x(static_cast<int>(k)) * basis[k];
    return j;
}

// Maximum-likelihood reconstruction: projected gradient ascent on the
// Poisson log likelihood with backtracking line search, every iterate
// pulled back onto the CPTP set.
inline MleResult mle_process(const CountMatrix& m, NoisePolicy policy = NoisePolicy::model,
                             const MleOptions& opt = {},
                             const TomoSettings& settings = TomoSettings::standard()) {
    const auto s = detail::measurement_operators(settings);
    const detail::FitData data = detail::prepare_fit_data(m, policy);

    ChoiMatrix j = detail::cptp_project(
        linear_inversion_choi(measured_probabilities(m, policy), settings),
        opt.projection_iterations);
    double ll = detail::log_likelihood(data, s, j);

    double total = 0.0;
    for (const auto& row : data.clicks)
        for (double c : row)
            total += c;
    double step = 1.0 / std::max(total, 1.0);

    MleResult result;
    std::size_t iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        const ChoiMatrix grad = detail::likelihood_gradient(data, s, j);
        bool improved = false;
        ChoiMatrix j_next;
        double ll_next = ll;
        for (int shrink = 0; shrink < 60 && !improved; ++shrink) {
            j_next = detail::cptp_project(j + step * grad, opt.projection_iterations);
            ll_next = detail::log_likelihood(data, s, j_next);
            if (ll_next > ll) {
                improved = true;
                step *= 1.6;
            } else {
                step *= 0.5;
            }
        }
        if (!improved) {
            // No ascent direction left at line-search resolution.
            result.converged = true;
            break;
        }
        const bool settled = std::abs(ll_next - ll) <= opt.rel_tol * (std::abs(ll) + 1.0);
        j = j_next;
        ll = ll_next;
        if (settled) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    result.choi = j;
    result.chi = chi_from_choi(j);
    result.fidelity = result.chi(0, 0).real();
    result.log_likelihood = ll;
    result.iterations = iter;
    return result;
}

} // namespace nlpesim
