#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qfalab/errors.hpp"

namespace qfalab {

// Dove-prism angle calibration: the measured power of a petal mode against a
// rotated copy of itself follows A cos^2(l (theta - delta)) + B. Writing
// cos^2 as a single harmonic makes the fit linear in (a, b, c) with
// power = a cos(2 l theta) + b sin(2 l theta) + c, from which
// delta = atan2(b, a) / (2 l), A = 2 sqrt(a^2 + b^2), B = c - A/2.

struct CalibrationSample {
    double angle_deg = 0.0;
    double power = 0.0;
};

struct CalibrationFit {
    double offset_deg = 0.0;  // minimal-magnitude representative mod 180/l
    double amplitude = 0.0;
    double baseline = 0.0;
};

inline CalibrationFit calibration_fit(const std::vector<CalibrationSample>& samples, int ell) {
    if (ell < 1) throw InvalidParameterError("OAM value must be >= 1");
    if (samples.size() < 4) throw FitError("need at least 4 samples");

    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end(),
                                        [](const auto& a, const auto& b) { return a.angle_deg < b.angle_deg; });
    if (mx->angle_deg - mn->angle_deg < 180.0 / double(ell) - 1e-9)
        throw FitError("samples must span at least one period (180/l degrees)");

    auto [pmin, pmax] = std::minmax_element(samples.begin(), samples.end(),
                                            [](const auto& a, const auto& b) { return a.power < b.power; });
    if (pmax->power - pmin->power <= 1e-12 * std::max(1.0, std::abs(pmax->power)))
        throw FitError("constant power signal cannot constrain the offset");

    // normal equations for [cos, sin, 1]
    double s[3][3] = {};
    double rhs[3] = {};
    const double freq = 2.0 * double(ell) * std::numbers::pi / 180.0;
    for (const auto& smp : samples) {
        const double basis[3] = {std::cos(freq * smp.angle_deg), std::sin(freq * smp.angle_deg), 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) s[i][j] += basis[i] * basis[j];
            rhs[i] += basis[i] * smp.power;
        }
    }

    // 3x3 Gaussian elimination with partial pivoting
    std::array<std::array<double, 4>, 3> m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[std::size_t(i)][std::size_t(j)] = s[i][j];
        m[std::size_t(i)][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[std::size_t(r)][std::size_t(col)]) > std::abs(m[std::size_t(piv)][std::size_t(col)]))
                piv = r;
        if (std::abs(m[std::size_t(piv)][std::size_t(col)]) < 1e-12) throw FitError("degenerate sample design");
        std::swap(m[std::size_t(col)], m[std::size_t(piv)]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[std::size_t(r)][std::size_t(col)] / m[std::size_t(col)][std::size_t(col)];
            for (int j = col; j < 4; ++j) m[std::size_t(r)][std::size_t(j)] -= f * m[std::size_t(col)][std::size_t(j)];
        }
    }
    const double a = m[0][3] / m[0][0];
    const double b = m[1][3] / m[1][1];
    const double c = m[2][3] / m[2][2];

    const double harmonic = std::hypot(a, b);
    if (harmonic <= 1e-12 * std::max(1.0, std::abs(c))) throw FitError("no harmonic content at the expected frequency");

    CalibrationFit fit;
    fit.amplitude = 2.0 * harmonic;
    fit.baseline = c - harmonic;
    // atan2 already lands in (-pi, pi], i.e. the minimal |delta| representative
    fit.offset_deg = std::atan2(b, a) / (2.0 * double(ell)) * 180.0 / std::numbers::pi;
    return fit;
}

/// Noiseless instrument response used when generating calibration scans.
inline double calibration_model(double angle_deg, int ell, double offset_deg, double amplitude,
                                double baseline) {
    const double arg = double(ell) * (angle_deg - offset_deg) * std::numbers::pi / 180.0;
    const double c = std::cos(arg);
    return amplitude * c * c + baseline;
}

}  // namespace qfalab
