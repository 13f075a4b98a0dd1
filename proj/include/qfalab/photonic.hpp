#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include "qfalab/automata.hpp"
#include "qfalab/errors.hpp"
#include "qfalab/linalg.hpp"

namespace qfalab {

// Petal-mode realization of the 2d-state QFA. Each sub-QFA lives on the pair
// {p+_l, p-_l} of petal modes with OAM +-l; a Dove prism tilted by phi rotates
// the transverse structure by 2*phi per pass, which acts on the pair as a
// 2x2 unitary with imaginary off-diagonals.

/// Ordered OAM values of the sub-QFAs. Basis index 2j is p+ of ells[j],
/// index 2j+1 is p-.
struct PetalBasis {
    std::vector<int> ells;

    void validate() const {
        if (ells.empty()) throw InvalidParameterError("petal basis needs at least one OAM value");
        std::set<int> seen;
        for (int l : ells) {
            if (l < 1) throw InvalidParameterError("OAM values must be >= 1");
            if (!seen.insert(l).second) throw InvalidParameterError("duplicate OAM value");
        }
    }

    std::size_t dim() const { return 2 * ells.size(); }
    std::size_t index(std::size_t j, bool positive) const { return 2 * j + (positive ? 0 : 1); }
};

/// Dove prism tilt; the transverse structure rotates by 2*phi per pass.
struct DoveConfig {
    double phi = 0.0;  // radians

    void validate() const {
        if (!(phi >= 0.0 && phi < std::numbers::pi))
            throw InvalidParameterError("Dove angle must lie in [0, pi)");
    }
};

/// Loop optics: beamsplitter split ratio, per-round-trip transmission, delay.
struct LoopConfig {
    double reflectance = 0.5;
    double transmittance = 0.5;
    double eta_loop = 1.0;      // per-round-trip optical transmission
    double delta_t_s = 2.262e-9;
    DoveConfig dove;

    void validate() const {
        if (std::abs(reflectance + transmittance - 1.0) > 1e-12)
            throw InvalidParameterError("beamsplitter R + T must equal 1");
        if (!(transmittance > 0.0 && transmittance < 1.0))
            throw InvalidParameterError("beamsplitter T must lie in (0,1)");
        if (!(eta_loop > 0.0 && eta_loop <= 1.0))
            throw InvalidParameterError("eta_loop must lie in (0,1]");
        if (!(delta_t_s > 0.0)) throw InvalidParameterError("loop delay must be positive");
        dove.validate();
    }
};

/// One Dove pass on the petal pair of OAM ell:
/// [[cos 2*l*phi, -i sin 2*l*phi], [-i sin 2*l*phi, cos 2*l*phi]].
inline CMatrix dove_unitary(int ell, double phi) {
    if (ell < 1) throw InvalidParameterError("OAM value must be >= 1");
    const double t = 2.0 * double(ell) * phi;
    const double c = std::cos(t), s = std::sin(t);
    CMatrix u(2, 2);
    u(0, 0) = c;
    u(0, 1) = cplx{0.0, -s};
    u(1, 0) = cplx{0.0, -s};
    u(1, 1) = c;
    return u;
}

/// Block-diagonal symbol unitary: one dove_unitary block per OAM value.
inline CMatrix va_block(const PetalBasis& basis, double phi) {
    basis.validate();
    const std::size_t dim = basis.dim();
    CMatrix v(dim, dim);
    for (std::size_t j = 0; j < basis.ells.size(); ++j) {
        const CMatrix u = dove_unitary(basis.ells[j], phi);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) v(2 * j + r, 2 * j + c) = u(r, c);
    }
    return v;
}

/// Full QFA over the petal basis: V_cent carves the uniform superposition of
/// positive petal modes, V_a is the Dove block unitary, V_$ = V_cent^dag.
inline QfaSpec photonic_qfa_build(const PetalBasis& basis, double phi) {
    basis.validate();
    const std::size_t d = basis.ells.size();
    const std::size_t dim = basis.dim();
    CVector superpos(dim, cplx{});
    for (std::size_t j = 0; j < d; ++j)
        superpos[basis.index(j, true)] = cplx{1.0 / std::sqrt(double(d)), 0.0};
    QfaSpec q;
    q.dim = int(dim);
    q.v0 = basis_vector(dim, 0);
    q.V_cent = complete_unitary({superpos}, dim);
    q.V_dollar = q.V_cent.adjoint();
    q.V_a = va_block(basis, phi);
    q.accepting = {0};
    return q;
}

/// Closed-form acceptance after n loops: (1/d^2) (sum_j cos(2 n l_j phi))^2.
inline double accept_prob_closed_form(const std::vector<int>& ells, double phi, std::uint64_t n) {
    PetalBasis{ells}.validate();
    double sum = 0.0;
    for (int l : ells) sum += std::cos(2.0 * double(n) * double(l) * phi);
    const double d = double(ells.size());
    return (sum * sum) / (d * d);
}

/// |deviation| between the explicit-matrix acceptance probability and the
/// closed form; an algebraic identity, so it should vanish to rounding.
inline double matrix_vs_closed_form(const PetalBasis& basis, double phi, std::uint64_t n) {
    const QfaSpec q = photonic_qfa_build(basis, phi);
    const double via_matrices = qfa_run(q, n).accept_prob;
    return std::abs(via_matrices - accept_prob_closed_form(basis.ells, phi, n));
}

/// Angle selection rule: pi/(2p) is allowed only when the OAM values share
/// parity (all sub-QFAs then return home with a common phase); otherwise pi/p.
/// At phi = pi/(2p) the common return phase after p loops is -1 on every
/// sub-QFA; acceptance probabilities are insensitive to it, so no correction
/// is applied anywhere downstream.
inline double dove_angle_for_p(int p, const std::vector<int>& ells) {
    if (p < 2) throw InvalidParameterError("p must be >= 2");
    if (ells.empty()) throw InvalidParameterError("OAM set must be non-empty");
    bool all_even = true, all_odd = true;
    for (int l : ells) {
        if (l < 1) throw InvalidParameterError("OAM values must be >= 1");
        (l % 2 == 0 ? all_odd : all_even) = false;
    }
    const double pi = std::numbers::pi;
    return (all_even || all_odd) ? pi / (2.0 * double(p)) : pi / double(p);
}

/// Probability that a photon leaves the loop after exactly n >= 1 round
/// trips: T^2 R^(n-1), times eta_loop^n when the loop optics are lossy.
inline double exit_probability(const LoopConfig& loop, std::uint64_t n) {
    loop.validate();
    if (n < 1) throw InvalidParameterError("exit probability is defined for n >= 1");
    const double lossless =
        loop.transmittance * loop.transmittance * std::pow(loop.reflectance, double(n - 1));
    return lossless * std::pow(loop.eta_loop, double(n));
}

}  // namespace qfalab
