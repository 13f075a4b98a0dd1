#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "qfalab/errors.hpp"
#include "qfalab/linalg.hpp"

namespace qfalab {

// Complex scalar fields sampled on a square transverse grid with physical
// pitch. Unit-power fields satisfy sum |v|^2 * pitch^2 = 1. The grid is
// FFT-style: for even grid_n the sample at index grid_n/2 sits exactly on the
// axis, covering coordinates [-n/2, n/2) * pitch.

struct ScalarField {
    int grid_n = 0;
    double pitch = 0.0;  // meters per sample
    std::vector<cplx> values;

    ScalarField() = default;
    ScalarField(int n, double pitch_m) : grid_n(n), pitch(pitch_m), values(std::size_t(n) * std::size_t(n)) {
        if (n < 2 || !(pitch_m > 0.0)) throw GridError("grid needs n >= 2 and positive pitch");
    }

    double coord(int i) const { return (double(i) - double(grid_n) / 2.0) * pitch; }
    double half_extent() const { return double(grid_n) / 2.0 * pitch; }

    cplx& at(int ix, int iy) { return values[std::size_t(iy) * std::size_t(grid_n) + std::size_t(ix)]; }
    const cplx& at(int ix, int iy) const {
        return values[std::size_t(iy) * std::size_t(grid_n) + std::size_t(ix)];
    }

    double power() const {
        double acc = 0.0;
        for (const cplx& v : values) acc += std::norm(v);
        return acc * pitch * pitch;
    }

    /// Rescales to unit power. Fails on (numerically) empty fields.
    void normalize() {
        const double p = power();
        if (!(p > 1e-300)) throw NormalizationError("cannot normalize a zero field");
        const double s = 1.0 / std::sqrt(p);
        for (cplx& v : values) v *= s;
    }
};

/// Default working grid: 512 samples per side, physical extent eight times
/// the largest mode waist.
inline constexpr int kDefaultGridN = 512;

inline double default_pitch(double max_waist, int grid_n = kDefaultGridN) {
    return 8.0 * max_waist / double(grid_n);
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.grid_n != b.grid_n || a.pitch != b.pitch) throw GridError("fields live on different grids");
}

/// <a|b> = sum conj(a) * b * pitch^2.
inline cplx overlap(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    cplx acc{};
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::conj(a.values[i]) * b.values[i];
    return acc * (a.pitch * a.pitch);
}

/// Laguerre-Gauss mode with radial index zero: amplitude (r sqrt2 / w)^|l|
/// e^{-r^2/w^2} and helical phase e^{i l phi}. Unit power on the grid.
inline ScalarField lg_field(int ell, double w, int grid_n, double pitch) {
    ScalarField f(grid_n, pitch);
    if (!(w > 0.0)) throw InvalidParameterError("waist must be positive");
    const int a = std::abs(ell);
    if (w < 8.0 * pitch * std::sqrt(double(a) + 1.0))
        throw ResolutionError("grid does not resolve the requested mode");
    double fact = 1.0;
    for (int i = 2; i <= a; ++i) fact *= double(i);
    const double c0 = std::sqrt(2.0 / (std::numbers::pi * fact)) / w;
    for (int iy = 0; iy < grid_n; ++iy) {
        const double y = f.coord(iy);
        for (int ix = 0; ix < grid_n; ++ix) {
            const double x = f.coord(ix);
            const double r = std::hypot(x, y);
            const double amp = c0 * std::pow(r * std::numbers::sqrt2 / w, double(a)) * std::exp(-r * r / (w * w));
            const double ph = double(ell) * std::atan2(y, x);
            f.at(ix, iy) = std::polar(amp, ph);
        }
    }
    f.normalize();  // absorbs grid quantization of the analytic constant
    return f;
}

/// Petal mode (LG_{+l} +- LG_{-l}) / sqrt2; shows 2l azimuthal lobes.
inline ScalarField petal_field(int ell, bool positive, double w, int grid_n, double pitch) {
    if (ell < 1) throw InvalidParameterError("petal OAM must be >= 1");
    ScalarField plus = lg_field(ell, w, grid_n, pitch);
    const ScalarField minus = lg_field(-ell, w, grid_n, pitch);
    const double sign = positive ? 1.0 : -1.0;
    for (std::size_t i = 0; i < plus.values.size(); ++i)
        plus.values[i] = (plus.values[i] + sign * minus.values[i]) / std::numbers::sqrt2;
    plus.normalize();
    return plus;
}

/// Unit-power fundamental Gaussian.
inline ScalarField gaussian_field(double w, int grid_n, double pitch) {
    return lg_field(0, w, grid_n, pitch);
}

namespace field_detail {

/// Catmull-Rom weights for fractional offset t in [0, 1).
inline void catmull_rom_weights(double t, double w[4]) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

}  // namespace field_detail

/// Rotates the transverse structure counter-clockwise by `angle` via bicubic
/// (Catmull-Rom) resampling; samples whose stencil leaves the source grid
/// become zero. Bilinear resampling is not enough here: its smoothing biases
/// mode overlaps at first order in the pixel size.
inline ScalarField rotated(const ScalarField& src, double angle) {
    ScalarField out(src.grid_n, src.pitch);
    const double c = std::cos(angle), s = std::sin(angle);
    const int n = src.grid_n;
    const double center = double(n) / 2.0;
    for (int iy = 0; iy < n; ++iy) {
        const double y = out.coord(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double x = out.coord(ix);
            // source point: rotate the output coordinate backwards
            const double xs = c * x + s * y;
            const double ys = -s * x + c * y;
            const double fi = xs / src.pitch + center;
            const double fj = ys / src.pitch + center;
            const int i1 = int(std::floor(fi)), j1 = int(std::floor(fj));
            if (i1 < 1 || j1 < 1 || i1 + 2 >= n || j1 + 2 >= n) continue;
            double wx[4], wy[4];
            field_detail::catmull_rom_weights(fi - double(i1), wx);
            field_detail::catmull_rom_weights(fj - double(j1), wy);
            cplx acc{};
            for (int dj = 0; dj < 4; ++dj) {
                cplx row{};
                for (int di = 0; di < 4; ++di) row += wx[di] * src.at(i1 - 1 + di, j1 - 1 + dj);
                acc += wy[dj] * row;
            }
            out.at(ix, iy) = acc;
        }
    }
    return out;
}

// File formats: a small binary container (float32 interleaved re/im) for
// field dumps, and plain CSV grids of intensity / phase for plotting.

static_assert(std::endian::native == std::endian::little,
              "field binary format is defined little-endian");

inline void save_field_binary(const ScalarField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const char magic[4] = {'Q', 'F', 'L', 'D'};
    out.write(magic, 4);
    const std::uint32_t n = std::uint32_t(f.grid_n);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&f.pitch), sizeof f.pitch);
    std::vector<float> body;
    body.reserve(2 * f.values.size());
    for (const cplx& v : f.values) {
        body.push_back(float(v.real()));
        body.push_back(float(v.imag()));
    }
    out.write(reinterpret_cast<const char*>(body.data()), std::streamsize(body.size() * sizeof(float)));
    if (!out) throw IoError("short write: " + path);
}

inline ScalarField load_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (std::memcmp(magic, "QFLD", 4) != 0) throw IoError("bad field file magic: " + path);
    std::uint32_t n = 0;
    double pitch = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&pitch), sizeof pitch);
    if (!in || n < 2) throw IoError("corrupt field header: " + path);
    ScalarField f(int(n), pitch);
    std::vector<float> body(2 * f.values.size());
    in.read(reinterpret_cast<char*>(body.data()), std::streamsize(body.size() * sizeof(float)));
    if (!in) throw IoError("truncated field body: " + path);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = cplx{body[2 * i], body[2 * i + 1]};
    return f;
}

inline void save_intensity_phase_csv(const ScalarField& f, const std::string& intensity_path,
                                     const std::string& phase_path) {
    std::ofstream ii(intensity_path), pp(phase_path);
    if (!ii || !pp) throw IoError("cannot open CSV output");
    for (int iy = 0; iy < f.grid_n; ++iy) {
        for (int ix = 0; ix < f.grid_n; ++ix) {
            const cplx v = f.at(ix, iy);
            ii << std::norm(v) << (ix + 1 < f.grid_n ? ',' : '\n');
            pp << std::arg(v) << (ix + 1 < f.grid_n ? ',' : '\n');
        }
    }
}

}  // namespace qfalab
