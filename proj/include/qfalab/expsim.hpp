#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qfalab/errors.hpp"
#include "qfalab/parallel.hpp"
#include "qfalab/photonic.hpp"

namespace qfalab {

// Monte Carlo emulation of the loop experiment. Each heralded photon samples
// an exit loop n (P(0) = R for direct reflection at the in-coupling, P(n) =
// T^2 R^(n-1) afterwards), survives the per-loop optics and the mode filter,
// and lands in a 13 ps time-bin histogram with per-peak timing jitter.
// Accidental coincidences form a uniform Poisson floor over the record.

namespace rng_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// mt19937_64 engine with hand-rolled distributions; the standard specifies
/// the engine stream exactly, so histograms are reproducible bit-for-bit.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    double normal() {
        // Box-Muller without caching; one branch, fully deterministic
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace rng_detail

/// What travels through the loop: either the rotationally invariant Gaussian
/// reference or a petal-encoded QFA state.
struct ModeSpec {
    bool gaussian_reference = false;
    std::vector<int> ells;
    double phi = 0.0;

    std::string label() const { return gaussian_reference ? "gauss" : "qfa"; }

    void validate() const {
        if (!gaussian_reference) PetalBasis{ells}.validate();
    }
};

struct ExperimentConfig {
    ModeSpec mode;
    LoopConfig loop;
    int n_max = 10;
    double r1_hz = 1e6;  // heralding-arm singles rate
    double r2_hz = 1e4;  // signal-arm singles rate
    std::uint64_t budget = 1'000'000;  // heralded pairs per dataset
    double bin_width_s = 13e-12;
    int window_bins = 77;
    int peak_spacing_bins = 174;
    double pre_record_s = 10e-9;       // record starts this long before peak 0
    double accidental_avg_s = 4e-9;    // accidental floor averaged over this lead
    double jitter_sigma_bins = 5.0;
    double encoding_efficiency = 1.0;  // carving + coupling losses of QFA modes
    double depolarization = 0.0;       // imperfection knob; mixes in 1/dim
    std::uint64_t seed = 0;

    int t0_bin() const { return int(std::llround(pre_record_s / bin_width_s)); }
    int lead_bins() const { return int(std::llround(accidental_avg_s / bin_width_s)); }
    int span_bins() const { return t0_bin() + n_max * peak_spacing_bins + window_bins; }

    void validate() const {
        mode.validate();
        loop.validate();
        if (n_max < 1) throw ConfigError("n_max must be >= 1");
        if (window_bins < 1 || peak_spacing_bins < 1) throw ConfigError("bins must be positive");
        if (window_bins > peak_spacing_bins) throw ConfigError("window must not exceed the peak spacing");
        if (!(bin_width_s > 0.0)) throw ConfigError("bin width must be positive");
        if (!(r1_hz > 0.0) || r2_hz < 0.0) throw ConfigError("singles rates must be positive");
        if (!(encoding_efficiency > 0.0 && encoding_efficiency <= 1.0))
            throw ConfigError("encoding efficiency must lie in (0,1]");
        if (depolarization < 0.0 || depolarization > 1.0)
            throw ConfigError("depolarization must lie in [0,1]");
        if (jitter_sigma_bins < 0.0) throw ConfigError("jitter sigma must be non-negative");
        if (t0_bin() - window_bins / 2 < lead_bins())
            throw ConfigError("pre-record region too short for the accidental lead");
    }
};

/// Coincidence histogram plus the configuration that produced it (the
/// sidecar of the CSV export).
struct TimeHistogram {
    ExperimentConfig cfg;
    std::vector<std::uint64_t> counts;

    double bin_width_s() const { return cfg.bin_width_s; }
    int t0_bin() const { return cfg.t0_bin(); }
    int span() const { return int(counts.size()); }
};

/// Mode-filter acceptance per loop, including the depolarizing imperfection:
/// (1-q) * closed form + q / dim.
inline double filter_acceptance(const ModeSpec& mode, double depolarization, std::uint64_t n) {
    if (mode.gaussian_reference) return 1.0;
    const double ideal = accept_prob_closed_form(mode.ells, mode.phi, n);
    const double dim = 2.0 * double(mode.ells.size());
    return (1.0 - depolarization) * ideal + depolarization / dim;
}

/// One dataset. Deterministic: identical configs (seed included) give
/// bit-identical histograms.
inline TimeHistogram simulate_run(const ExperimentConfig& cfg) {
    cfg.validate();
    TimeHistogram hist;
    hist.cfg = cfg;
    hist.counts.assign(std::size_t(cfg.span_bins()), 0);

    rng_detail::Rng rng(cfg.seed);
    const double R = cfg.loop.reflectance, T = cfg.loop.transmittance;
    const double log_r = std::log(R);
    const int half_window = cfg.window_bins / 2;
    const int t0 = cfg.t0_bin();

    // per-loop detection probability: optics survival x mode filter x encoding
    std::vector<double> p_detect(std::size_t(cfg.n_max) + 1);
    for (int n = 0; n <= cfg.n_max; ++n) {
        const double optics = std::pow(cfg.loop.eta_loop, double(n));
        const double filter = filter_acceptance(cfg.mode, cfg.depolarization, std::uint64_t(n));
        const double encoding = cfg.mode.gaussian_reference ? 1.0 : cfg.encoding_efficiency;
        p_detect[std::size_t(n)] = optics * filter * encoding;
    }

    for (std::uint64_t ph = 0; ph < cfg.budget; ++ph) {
        const double u = rng.uniform();
        int n = 0;
        if (u >= R) {
            // entered the loop; exits are geometric with success T
            const double v = (u - R) / T;
            const double loops = 1.0 + std::floor(std::log1p(-v) / log_r);
            if (!(loops <= double(cfg.n_max))) continue;  // never exits inside the record
            n = int(loops);
        }
        if (rng.uniform() > p_detect[std::size_t(n)]) continue;
        long long jitter;
        do {
            jitter = std::llround(rng.normal() * cfg.jitter_sigma_bins);
        } while (std::llabs(jitter) > half_window);
        const long long bin = t0 + (long long)(n)*cfg.peak_spacing_bins + jitter;
        ++hist.counts[std::size_t(bin)];
    }

    // uniform accidental floor: R1 R2 tau per coincidence window over the
    // effective record time budget / R1
    const double lambda = cfg.r2_hz * cfg.bin_width_s * double(cfg.budget);
    if (lambda > 0.0)
        for (auto& c : hist.counts) c += rng.poisson(lambda);

    return hist;
}

/// Independent repeats; each derives its own stream from (seed, index), so
/// the result does not depend on scheduling.
inline std::vector<TimeHistogram> simulate_repeats(const ExperimentConfig& cfg, int repeats) {
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    std::vector<TimeHistogram> out;
    out.resize(std::size_t(repeats));
    parallel_chunks(std::size_t(repeats), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            ExperimentConfig c = cfg;
            c.seed = rng_detail::splitmix64(cfg.seed ^ rng_detail::splitmix64(i + 1));
            out[i] = simulate_run(c);
        }
    });
    return out;
}

namespace hist_detail {

inline std::uint64_t window_sum_at(const TimeHistogram& hist, int center) {
    const int half = hist.cfg.window_bins / 2;
    if (center - half < 0 || center + half >= hist.span())
        throw RangeError("window falls outside the histogram span");
    std::uint64_t acc = 0;
    for (int b = center - half; b <= center + half; ++b) acc += hist.counts[std::size_t(b)];
    return acc;
}

}  // namespace hist_detail

/// Raw coincidences in the 77-bin window around peak n.
inline std::uint64_t window_counts(const TimeHistogram& hist, int n) {
    if (n < 0 || n > hist.cfg.n_max) throw RangeError("loop index outside the recorded range");
    return hist_detail::window_sum_at(hist, hist.t0_bin() + n * hist.cfg.peak_spacing_bins);
}

/// Mean accidental coincidences per bin over the lead region of the record
/// (before any signal peak).
inline double estimate_accidentals(const TimeHistogram& hist) {
    const int lead = hist.cfg.lead_bins();
    if (lead < 1 || lead > hist.span()) throw ConfigError("no accidental lead region in the record");
    std::uint64_t acc = 0;
    for (int b = 0; b < lead; ++b) acc += hist.counts[std::size_t(b)];
    return double(acc) / double(lead);
}

/// Accidental-corrected counts per loop: sum over the window of (C_b - Abar).
/// May be negative under noise; clamping would bias the normalization upward.
inline double loop_counts_corrected(const TimeHistogram& hist, int n) {
    return double(window_counts(hist, n)) - double(hist.cfg.window_bins) * estimate_accidentals(hist);
}

struct LoopPoint {
    int n = 0;
    double p = 0.0;
    double sigma = 0.0;
};

struct LoopProbabilities {
    std::vector<LoopPoint> points;  // n = 0 .. n_max
};

namespace hist_detail {

inline void require_same_geometry(const TimeHistogram& a, const TimeHistogram& b) {
    if (a.cfg.bin_width_s != b.cfg.bin_width_s || a.cfg.window_bins != b.cfg.window_bins ||
        a.cfg.peak_spacing_bins != b.cfg.peak_spacing_bins || a.t0_bin() != b.t0_bin() ||
        a.span() != b.span() || a.cfg.n_max != b.cfg.n_max)
        throw ConfigError("histograms do not share bin geometry");
}

/// Corrected per-loop counts of one dataset at explicit window centers.
inline std::vector<double> corrected_counts(const TimeHistogram& hist, const std::vector<int>& centers) {
    const double abar = estimate_accidentals(hist);
    std::vector<double> c(centers.size());
    for (std::size_t n = 0; n < centers.size(); ++n)
        c[n] = double(window_sum_at(hist, centers[n])) - double(hist.cfg.window_bins) * abar;
    return c;
}

}  // namespace hist_detail

/// Full histogram reduction. Window centers come from the per-peak maximum
/// of the summed Gaussian reference (zeroth peak), then a fixed 174-bin
/// spacing. Each dataset is normalized to its own zeroth loop, datasets are
/// averaged per mode, and the QFA curve is divided by the Gaussian one.
/// sigma is the standard deviation across repeats (Poisson propagation when
/// only one dataset of each mode exists).
inline LoopProbabilities accept_probabilities(const std::vector<TimeHistogram>& qfa_hists,
                                              const std::vector<TimeHistogram>& gauss_hists,
                                              int n_max) {
    if (qfa_hists.empty() || gauss_hists.empty()) throw ConfigError("need at least one dataset per mode");
    for (const auto& h : qfa_hists) hist_detail::require_same_geometry(h, gauss_hists.front());
    for (const auto& h : gauss_hists) hist_detail::require_same_geometry(h, gauss_hists.front());
    const ExperimentConfig& g0 = gauss_hists.front().cfg;
    if (n_max < 1 || n_max > g0.n_max) throw ConfigError("n_max outside the recorded range");

    // zeroth-peak center from the summed Gaussian reference
    const int t0 = gauss_hists.front().t0_bin();
    const int half_search = g0.peak_spacing_bins / 2;
    std::vector<std::uint64_t> summed(std::size_t(gauss_hists.front().span()), 0);
    for (const auto& h : gauss_hists)
        for (std::size_t b = 0; b < summed.size(); ++b) summed[b] += h.counts[b];
    int c0 = t0;
    std::uint64_t best = 0;
    for (int b = std::max(0, t0 - half_search); b <= t0 + half_search && b < int(summed.size()); ++b)
        if (summed[std::size_t(b)] > best) {
            best = summed[std::size_t(b)];
            c0 = b;
        }
    std::vector<int> centers(std::size_t(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) centers[std::size_t(n)] = c0 + n * g0.peak_spacing_bins;

    // per-dataset relative probabilities P_n = C_n / C_0
    auto relative = [&](const std::vector<TimeHistogram>& hists) {
        std::vector<std::vector<double>> rel;
        rel.reserve(hists.size());
        for (const auto& h : hists) {
            std::vector<double> c = hist_detail::corrected_counts(h, centers);
            const double c0 = c[0];
            if (!(c0 > 0.0)) throw NormalizationError("zeroth-loop counts are not positive");
            for (double& x : c) x /= c0;
            rel.push_back(std::move(c));
        }
        return rel;
    };
    const auto rel_q = relative(qfa_hists);
    const auto rel_g = relative(gauss_hists);

    std::vector<double> gauss_mean(std::size_t(n_max) + 1, 0.0);
    for (const auto& r : rel_g)
        for (std::size_t n = 0; n <= std::size_t(n_max); ++n) gauss_mean[n] += r[n];
    for (double& x : gauss_mean) x /= double(rel_g.size());
    for (std::size_t n = 0; n <= std::size_t(n_max); ++n)
        if (!(gauss_mean[n] > 0.0)) throw NormalizationError("Gaussian reference vanished at some loop");

    LoopProbabilities result;
    result.points.resize(std::size_t(n_max) + 1);
    for (std::size_t n = 0; n <= std::size_t(n_max); ++n) {
        std::vector<double> ratios(rel_q.size());
        for (std::size_t i = 0; i < rel_q.size(); ++i) ratios[i] = rel_q[i][n] / gauss_mean[n];
        const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / double(ratios.size());
        double sigma = 0.0;
        if (ratios.size() >= 2) {
            double ss = 0.0;
            for (double r : ratios) ss += (r - mean) * (r - mean);
            sigma = std::sqrt(ss / double(ratios.size() - 1));
        } else {
            // single datasets: Poisson propagation through C_n/C_0 and the ratio
            auto relvar = [&](const TimeHistogram& h) {
                const double abar = estimate_accidentals(h);
                const double var_abar = abar / double(h.cfg.lead_bins());
                auto var_c = [&](int loop) {
                    const double raw = double(hist_detail::window_sum_at(h, centers[std::size_t(loop)]));
                    const double c = raw - double(h.cfg.window_bins) * abar;
                    const double var = raw + double(h.cfg.window_bins) * double(h.cfg.window_bins) * var_abar;
                    return std::pair{c, var};
                };
                const auto [cn, vn] = var_c(int(n));
                const auto [c0v, v0] = var_c(0);
                return vn / (cn * cn) + v0 / (c0v * c0v);
            };
            const double rv = relvar(qfa_hists.front()) + relvar(gauss_hists.front());
            sigma = std::abs(mean) * std::sqrt(std::max(0.0, rv));
        }
        result.points[n] = {int(n), mean, sigma};
    }
    return result;
}

}  // namespace qfalab
