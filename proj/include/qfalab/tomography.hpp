#pragma once

#include <array>
#include <cmath>

#include "qfalab/errors.hpp"
#include "qfalab/linalg.hpp"

namespace qfalab {

// Single-qubit state tomography on the OAM Bloch sphere. Poles are the OAM
// eigenstates |+l>, |-l>; the equatorial axes are the petal pairs
// x+- = (|l> +- |-l>)/sqrt2 and y+- = (|l> +- i|-l>)/sqrt2.

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double dot(const BlochVector& a, const BlochVector& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Projection counts in the fixed order z+, z-, x+, x-, y+, y-.
using ProjectionCounts = std::array<double, 6>;

/// Direct inversion: each Bloch component is the count asymmetry of its axis.
inline BlochVector qst_direct_inversion(const ProjectionCounts& counts) {
    for (double c : counts)
        if (c < 0.0) throw InversionError("projection counts must be non-negative");
    auto axis = [&](int plus, int minus) {
        const double total = counts[std::size_t(plus)] + counts[std::size_t(minus)];
        if (!(total > 0.0)) throw InversionError("axis has zero total counts");
        return (counts[std::size_t(plus)] - counts[std::size_t(minus)]) / total;
    };
    BlochVector r;
    r.z = axis(0, 1);
    r.x = axis(2, 3);
    r.y = axis(4, 5);
    return r;
}

/// Poisson-propagated uncertainty of the reconstructed norm. The counts are
/// taken at face value (scale them first if they are in reduced units).
inline double bloch_norm_sigma(const ProjectionCounts& counts, const BlochVector& r) {
    const double norm = std::max(r.norm(), 1e-12);
    const double comps[3] = {r.z, r.x, r.y};
    double var = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        const double total = std::max(counts[std::size_t(2 * axis)] + counts[std::size_t(2 * axis + 1)], 1.0);
        // floor the binomial variance so saturated asymmetries keep a finite bar
        const double var_axis = std::max(1.0 - comps[axis] * comps[axis], 1.0 / total) / total;
        var += (comps[axis] / norm) * (comps[axis] / norm) * var_axis;
    }
    return std::sqrt(var);
}

/// A reconstruction is flagged when it leaves the Bloch sphere by more than
/// three standard deviations of the count statistics.
inline bool bloch_vector_unphysical(const ProjectionCounts& counts, const BlochVector& r) {
    return r.norm() > 1.0 + 3.0 * bloch_norm_sigma(counts, r);
}

/// Overlap of the reconstructed state with the accepting pure state:
/// (1 + r . r_ref) / 2.
inline double accept_prob_from_bloch(const BlochVector& r, const BlochVector& r_ref) {
    if (r_ref.norm() > 1.0 + 1e-9) throw InvalidParameterError("reference state must lie on or in the Bloch sphere");
    return 0.5 * (1.0 + dot(r, r_ref));
}

/// Exact Born-rule probabilities of a petal-basis qubit (a, b) along the six
/// tomography projectors, in ProjectionCounts order.
inline ProjectionCounts born_probabilities_petal(const cplx& a, const cplx& b) {
    const cplx c_plus = (a + b) / std::numbers::sqrt2;   // <l|psi>
    const cplx c_minus = (a - b) / std::numbers::sqrt2;  // <-l|psi>
    const cplx y_plus = (c_plus - cplx{0.0, 1.0} * c_minus) / std::numbers::sqrt2;
    const cplx y_minus = (c_plus + cplx{0.0, 1.0} * c_minus) / std::numbers::sqrt2;
    return {std::norm(c_plus), std::norm(c_minus), std::norm(a),
            std::norm(b),      std::norm(y_plus),  std::norm(y_minus)};
}

}  // namespace qfalab
