#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qfalab/errors.hpp"
#include "qfalab/field.hpp"

namespace qfalab {

// Gaussian-corrected mode carving: a phase-only hologram encodes target
// amplitude in the contrast of a blazed grating, M(rho) * mod(F + 2 pi x /
// Lambda_x, 2 pi), with M = 1 + asinc(A / A_G) / pi and F = Phi - pi M.
// Dividing by the illuminating Gaussian amplitude A_G makes the first
// diffraction order reproduce the target even though the input is not a
// plane wave.

inline double sinc_unnormalized(double x) {
    return x == 0.0 ? 1.0 : std::sin(x) / x;
}

/// Inverse of the unnormalized sinc restricted to [-pi, 0], where it rises
/// monotonically from 0 to 1. Bisection, 60 iterations; the endpoints are
/// returned exactly (the iteration would stall where sinc rounds to 1).
inline double inv_sinc(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("inv_sinc domain is [0, 1]");
    if (y == 1.0) return 0.0;
    if (y == 0.0) return -std::numbers::pi;
    double lo = -std::numbers::pi, hi = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sinc_unnormalized(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Unit-peak Gaussian amplitude envelope exp(-r^2 / w^2).
inline double gaussian_amplitude(double r, double w) { return std::exp(-r * r / (w * w)); }

struct HologramSpec {
    ScalarField target;
    double w_in = 0.0;           // illuminating Gaussian waist
    double grating_period = 0.0; // Lambda_x
    std::vector<double> phase;   // wrapped to [0, 2 pi)
    std::vector<double> m, f;    // modulation and phase functions
};

struct EnvelopeReport {
    double worst_ratio = 0.0;
    int ix = 0, iy = 0;
};

/// Largest A / A_G over the grid (the mode-carving feasibility measure).
inline EnvelopeReport envelope_ratio(const ScalarField& target, double w_in) {
    if (!(w_in > 0.0)) throw InvalidParameterError("input waist must be positive");
    EnvelopeReport rep;
    for (int iy = 0; iy < target.grid_n; ++iy) {
        const double y = target.coord(iy);
        for (int ix = 0; ix < target.grid_n; ++ix) {
            const double a = std::abs(target.at(ix, iy));
            if (a == 0.0) continue;
            const double ratio = a / gaussian_amplitude(std::hypot(target.coord(ix), y), w_in);
            if (ratio > rep.worst_ratio) rep = {ratio, ix, iy};
        }
    }
    return rep;
}

/// Rescales a field so its worst envelope ratio under A_G(w_in) is
/// `headroom` (<= 1); this is the brightest carvable copy of the target.
inline ScalarField scaled_into_envelope(const ScalarField& target, double w_in, double headroom = 1.0) {
    const EnvelopeReport rep = envelope_ratio(target, w_in);
    if (!(rep.worst_ratio > 0.0)) throw NormalizationError("cannot scale an empty field");
    ScalarField out = target;
    const double s = headroom / rep.worst_ratio;
    for (cplx& v : out.values) v *= s;
    return out;
}

/// Phase-only hologram for a target already inside the Gaussian envelope
/// (A <= A_G pointwise, or amplitude-exceeds-input is raised).
inline HologramSpec hologram_phase(const ScalarField& target, double w_in, double grating_period) {
    if (!(w_in > 0.0)) throw InvalidParameterError("input waist must be positive");
    if (!(grating_period > 0.0)) throw InvalidParameterError("grating period must be positive");

    const EnvelopeReport rep = envelope_ratio(target, w_in);
    if (rep.worst_ratio > 1.0 + 1e-12)
        throw AmplitudeExceedsInputError(
            "target amplitude exceeds the input Gaussian: ratio " + std::to_string(rep.worst_ratio) +
            " at sample (" + std::to_string(rep.ix) + ", " + std::to_string(rep.iy) + ")");

    HologramSpec h;
    h.target = target;
    h.w_in = w_in;
    h.grating_period = grating_period;
    const std::size_t total = target.values.size();
    h.phase.resize(total);
    h.m.resize(total);
    h.f.resize(total);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int iy = 0; iy < target.grid_n; ++iy) {
        const double y = target.coord(iy);
        for (int ix = 0; ix < target.grid_n; ++ix) {
            const std::size_t idx = std::size_t(iy) * std::size_t(target.grid_n) + std::size_t(ix);
            const double x = target.coord(ix);
            const cplx t = target.at(ix, iy);
            const double amp = std::abs(t);
            const double ratio =
                std::min(1.0, amp / gaussian_amplitude(std::hypot(x, y), w_in));
            const double m = amp == 0.0 ? 0.0 : 1.0 + inv_sinc(ratio) / std::numbers::pi;
            const double phi = amp == 0.0 ? 0.0 : std::arg(t);
            const double f = phi - std::numbers::pi * m;
            double wrapped = std::fmod(f + two_pi * x / grating_period, two_pi);
            if (wrapped < 0.0) wrapped += two_pi;
            h.m[idx] = m;
            h.f[idx] = f;
            h.phase[idx] = m * wrapped;
        }
    }
    return h;
}

/// First diffraction order of the hologram under its Gaussian illumination:
/// T1 = -sinc(pi (M - 1)) e^{i (F + pi M)} A_G(rho; w_in). With the carving
/// M and F this equals the target up to a global sign.
inline ScalarField first_order_field(const HologramSpec& h) {
    ScalarField out(h.target.grid_n, h.target.pitch);
    for (int iy = 0; iy < out.grid_n; ++iy) {
        const double y = out.coord(iy);
        for (int ix = 0; ix < out.grid_n; ++ix) {
            const std::size_t idx = std::size_t(iy) * std::size_t(out.grid_n) + std::size_t(ix);
            const double m = h.m[idx];
            const double mag = sinc_unnormalized(std::numbers::pi * (m - 1.0)) *
                               gaussian_amplitude(std::hypot(out.coord(ix), y), h.w_in);
            out.at(ix, iy) = -mag * std::exp(cplx{0.0, h.f[idx] + std::numbers::pi * m});
        }
    }
    return out;
}

/// Mode filter: the conjugated measurement structure plus the waist of the
/// fiber mode back-propagated to the hologram plane.
struct FilterSpec {
    ScalarField measured_structure;  // already conjugated
    double w_out = 0.0;
};

inline FilterSpec make_filter(const ScalarField& target, double w_out) {
    if (!(w_out > 0.0)) throw InvalidParameterError("fiber-mode waist must be positive");
    FilterSpec f;
    f.measured_structure = target;
    for (cplx& v : f.measured_structure.values) v = std::conj(v);
    f.measured_structure.normalize();
    f.w_out = w_out;
    return f;
}

/// Detection amplitude behind the filter hologram and fiber:
/// integral of H_holo * Psi_in * Psi_G(w_out) over the aperture r <= r_max,
/// with H_holo = Psi_meas^* / A_G(w_out). The division cancels the fiber
/// Gaussian exactly, so the result is <Psi_meas|Psi_in> restricted to the
/// aperture — the plane-wave-filter limit the correction is designed to
/// reach. r_max defaults to the grid half-extent.
inline cplx measurement_overlap(const ScalarField& incident, const FilterSpec& filter,
                                double r_max = 0.0) {
    require_same_grid(incident, filter.measured_structure);
    if (r_max <= 0.0) r_max = incident.half_extent();
    cplx acc{};
    for (int iy = 0; iy < incident.grid_n; ++iy) {
        const double y = incident.coord(iy);
        for (int ix = 0; ix < incident.grid_n; ++ix) {
            const double r = std::hypot(incident.coord(ix), y);
            if (r > r_max) continue;
            const double a_g = gaussian_amplitude(r, filter.w_out);
            const cplx h = filter.measured_structure.at(ix, iy) / a_g;
            acc += h * incident.at(ix, iy) * a_g;
        }
    }
    return acc * (incident.pitch * incident.pitch);
}

}  // namespace qfalab
