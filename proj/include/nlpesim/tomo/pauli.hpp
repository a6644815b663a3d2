#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "nlpesim/channel/jones.hpp"
#include "nlpesim/util/error.hpp"

namespace nlpesim {

using ChoiMatrix = Eigen::Matrix4cd;
using ChiMatrix = Eigen::Matrix4cd;

inline Eigen::Matrix2cd pauli_matrix(int m) {
    const std::complex<double> i(0.0, 1.0);
    Eigen::Matrix2cd p;
    switch (m) {
        case 0: p << 1, 0, 0, 1; break;
        case 1: p << 0, 1, 1, 0; break;
        case 2: p << 0, -i, i, 0; break;
        case 3: p << 1, 0, 0, -1; break;
        default: throw input_error("pauli: index out of range");
    }
    return p;
}

namespace detail {

// Columns of (P_m x I)|Phi> with |Phi> = |00> + |11>, output leg first.
// <phi_m|phi_n> = tr(P_m P_n) = 2 delta_mn.
inline const std::array<Eigen::Vector4cd, 4>& pauli_bell_vectors() {
    static const std::array<Eigen::Vector4cd, 4> vs = [] {
        std::array<Eigen::Vector4cd, 4> out;
        Eigen::Vector4cd phi;
        phi << 1, 0, 0, 1;
        for (int m = 0; m < 4; ++m) {
            Eigen::Matrix4cd pm = Eigen::Matrix4cd::Zero();
            const Eigen::Matrix2cd p = pauli_matrix(m);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int k = 0; k < 2; ++k)
                        pm(a * 2 + k, b * 2 + k) = p(a, b);
            out[m] = pm * phi;
        }
        return out;
    }();
    return vs;
}

} // namespace nlpesim::detail

// Choi matrix with the output leg first: J = sum_ij E(|i><j|) x |i><j|,
// so a trace-preserving map satisfies Tr_out J = I.
inline ChoiMatrix choi_from_kraus(const Eigen::Matrix2cd& k) {
    ChoiMatrix j = ChoiMatrix::Zero();
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj) {
            Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
            e(i, jj) = 1.0;
            const Eigen::Matrix2cd out = k * e * k.adjoint();
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    j(a * 2 + i, b * 2 + jj) += out(a, b);
        }
    return j;
}

inline ChoiMatrix identity_choi() { return choi_from_kraus(Eigen::Matrix2cd::Identity()); }

inline Eigen::Matrix2cd trace_out_output(const ChoiMatrix& j) {
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj)
            for (int a = 0; a < 2; ++a)
                t(i, jj) += j(a * 2 + i, a * 2 + jj);
    return t;
}

// chi_mn = <phi_m|J|phi_n> / 4; the inverse expansion is
// J = sum_mn chi_mn |phi_m><phi_n|.
inline ChiMatrix chi_from_choi(const ChoiMatrix& j) {
    const auto& phi = detail::pauli_bell_vectors();
    ChiMatrix chi;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            chi(m, n) = 0.25 * phi[m].dot(j * phi[n]);
    return chi;
}

inline ChoiMatrix choi_from_chi(const ChiMatrix& chi) {
    const auto& phi = detail::pauli_bell_vectors();
    ChoiMatrix j = ChoiMatrix::Zero();
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            j += chi(m, n) * (phi[m] * phi[n].adjoint());
    return j;
}

// Probability of passing analyzer `proj` after sending `input` through the
// channel: Re tr(J (Pi x rho^T)).
inline double choi_probability(const ChoiMatrix& j, const Eigen::Matrix2cd& proj,
                               const Eigen::Matrix2cd& rho) {
    Eigen::Matrix4cd s;
    const Eigen::Matrix2cd rho_t = rho.transpose();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int i = 0; i < 2; ++i)
                for (int jj = 0; jj < 2; ++jj)
                    s(a * 2 + i, b * 2 + jj) = proj(a, b) * rho_t(i, jj);
    return (j * s).trace().real();
}

inline Eigen::Matrix2cd density_matrix(const JonesVector& psi) {
    const JonesVector n = normalized_jones(psi);
    return n * n.adjoint();
}

struct CptpTolerances {
    double hermiticity = 1e-9;
    double positivity = -1e-9;
    double trace_preservation = 1e-6;
};

inline void validate_cptp(const ChoiMatrix& j, const CptpTolerances& tol = {}) {
    if ((j - j.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
        throw input_error("process: Choi matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ChoiMatrix> es(0.5 * (j + j.adjoint()));
    if (es.eigenvalues().minCoeff() < tol.positivity)
        throw input_error("process: Choi matrix is not positive semidefinite");
    if ((trace_out_output(j) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() >
        tol.trace_preservation)
        throw input_error("process: map is not trace preserving");
}

// Process fidelity against the identity: Re chi_00 of a valid CPTP map.
inline double process_fidelity(const ChoiMatrix& j, const CptpTolerances& tol = {}) {
    validate_cptp(j, tol);
    const auto& phi = detail::pauli_bell_vectors();
    return (0.25 * phi[0].dot(j * phi[0])).real();
}

} // namespace nlpesim
