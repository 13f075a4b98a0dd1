// Acceptance suite: one pass/fail line per criterion. Where a criterion
// compares against statistics, seeds are fixed, so reruns are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qfalab/automata.hpp"
#include "qfalab/calibration.hpp"
#include "qfalab/expsim.hpp"
#include "qfalab/field.hpp"
#include "qfalab/holography.hpp"
#include "qfalab/kset_search.hpp"
#include "qfalab/photonic.hpp"
#include "qfalab/tomography.hpp"

using namespace qfalab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
    void note(const std::string& what) { detail << (detail.str().empty() ? "" : "; ") << what; }
};

double sq(double x) { return x * x; }

ExperimentConfig two_cycle_config(bool gaussian, std::uint64_t budget, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.mode.gaussian_reference = gaussian;
    if (!gaussian) {
        cfg.mode.ells = {1, 3};
        cfg.mode.phi = 18.0 * kDeg;
    }
    cfg.loop.reflectance = 0.7;
    cfg.loop.transmittance = 0.3;
    cfg.loop.dove.phi = 18.0 * kDeg;
    cfg.n_max = 10;
    cfg.budget = budget;
    cfg.r1_hz = 1e6;
    cfg.r2_hz = 0.0;
    cfg.seed = seed;
    return cfg;
}

// ---------------------------------------------------------- criteria ----

// 2-state QFA worst case: cos^2(pi/5) at n in {1,4}, exact acceptance at 5.
Outcome criterion1() {
    Outcome o;
    const double worst = sq(std::cos(kPi / 5.0));  // ~0.6545085
    for (std::uint64_t n : {1ull, 4ull}) {
        const double p = accept_prob_closed_form({1}, 18.0 * kDeg, n);
        o.require(std::abs(p - worst) <= 1e-9, "n=" + std::to_string(n) + " off cos^2(pi/5)");
    }
    const double at5 = accept_prob_closed_form({1}, 18.0 * kDeg, 5);
    o.require(std::abs(at5 - 1.0) <= 1e-12, "n=5 not accepted with probability 1");
    o.note("worst=" + std::to_string(worst));
    return o;
}

// 4-state MOD_5 plateau: 0.0625 off-cycle, 1 at 5 and 10.
Outcome criterion2() {
    Outcome o;
    for (std::uint64_t n = 1; n <= 10; ++n) {
        const double p = accept_prob_closed_form({1, 3}, 18.0 * kDeg, n);
        const double expected = (n % 5 == 0) ? 1.0 : 0.0625;
        o.require(std::abs(p - expected) <= 1e-12,
                  "n=" + std::to_string(n) + " deviates from " + std::to_string(expected));
    }
    return o;
}

// 8-state MOD_11: perfect acceptance at 11; worst case matches the matrix
// oracle and stays below 1/3.
Outcome criterion3() {
    Outcome o;
    const std::vector<int> K = {1, 2, 3, 4};
    const double phi = kPi / 11.0;
    o.require(std::abs(accept_prob_closed_form(K, phi, 11) - 1.0) <= 1e-12, "P_11 != 1");

    double worst_formula = 0.0;
    for (std::uint64_t n = 1; n <= 10; ++n)
        worst_formula = std::max(worst_formula, accept_prob_closed_form(K, phi, n));

    const QfaSpec q = photonic_qfa_build(PetalBasis{K}, phi);
    double worst_matrix = 0.0;
    for (std::uint64_t n = 1; n <= 10; ++n) worst_matrix = std::max(worst_matrix, qfa_run(q, n).accept_prob);

    o.require(std::abs(worst_formula - worst_matrix) <= 1e-12, "closed form disagrees with the matrix oracle");
    o.require(worst_formula < 1.0 / 3.0, "worst case not below 1/3");
    o.note("worst=" + std::to_string(worst_formula));
    return o;
}

// K-set optimizer against the oracle, plus the log-size bound on odd primes.
Outcome criterion4() {
    Outcome o;
    const double reference = worst_false_accept(11, {1, 2, 3, 4}, kPi / 11.0).second;
    const KSetResult best = exhaustive_best_kset(11, 4, /*dedup=*/false);
    o.require(best.worst_prob <= reference + 1e-12, "optimizer worse than {1,2,3,4}");

    const QfaSpec q = qfa2d_build(11, best.K);
    double via_matrices = 0.0;
    for (std::uint64_t n = 1; n <= 10; ++n) via_matrices = std::max(via_matrices, qfa_run(q, n).accept_prob);
    o.require(std::abs(best.worst_prob - via_matrices) <= 1e-10, "matrix oracle disagrees");

    const double eps = 1.0 / 3.0;
    for (int p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
        const LogBoundResult r = verify_log_bound(p, eps);
        const int bound = int(std::ceil((4.0 / eps) * std::log(2.0 * double(p))));
        o.require(r.success, "no bounded-error K found for p=" + std::to_string(p));
        o.require(r.d_used <= bound, "d exceeds the log bound for p=" + std::to_string(p));
    }
    o.note("odd primes 3..31; p=2 has no 2k pi/p decider (theta=pi fixes |0> up to sign)");
    return o;
}

// Closed-loop reproduction of the 70:30 two-full-cycle run plus the
// 1/sqrt(budget) error scaling.
Outcome criterion5() {
    Outcome o;
    auto analyze_at = [&](std::uint64_t budget) {
        const auto q = simulate_repeats(two_cycle_config(false, budget, 42), 40);
        const auto g = simulate_repeats(two_cycle_config(true, budget, 4242), 40);
        return accept_probabilities(q, g, 10);
    };
    const LoopProbabilities full = analyze_at(1'000'000);
    for (const LoopPoint& pt : full.points) {
        if (pt.n == 0) continue;
        const double expected = (pt.n % 5 == 0) ? 1.0 : 0.0625;
        o.require(std::abs(pt.p - expected) < 3.0 * pt.sigma,
                  "n=" + std::to_string(pt.n) + " beyond 3 sigma of " + std::to_string(expected));
    }

    const LoopProbabilities quarter = analyze_at(250'000);
    double ratio_sum = 0.0;
    for (int n = 1; n <= 10; ++n)
        ratio_sum += full.points[std::size_t(n)].sigma / quarter.points[std::size_t(n)].sigma;
    const double mean_ratio = ratio_sum / 10.0;  // expect ~ sqrt(1/4) = 0.5
    o.require(mean_ratio > 0.35 && mean_ratio < 0.65, "error bars do not scale like 1/sqrt(budget)");
    o.note("P_5=" + std::to_string(full.points[5].p) + " P_10=" + std::to_string(full.points[10].p) +
           " sigma-ratio=" + std::to_string(mean_ratio));
    return o;
}

// Accidental subtraction: the measured uniform floor moves no point by 1 sigma.
Outcome criterion6() {
    Outcome o;
    auto run_with_rate = [&](double r2) {
        ExperimentConfig qc = two_cycle_config(false, 1'000'000, 777);
        ExperimentConfig gc = two_cycle_config(true, 1'000'000, 7812);
        qc.r2_hz = gc.r2_hz = r2;
        const auto q = simulate_repeats(qc, 20);
        const auto g = simulate_repeats(gc, 20);
        return accept_probabilities(q, g, 10);
    };
    const LoopProbabilities clean = run_with_rate(0.0);
    const LoopProbabilities noisy = run_with_rate(1e4);  // R1=1e6 Hz, R2=1e4 Hz, tau=13 ps
    for (int n = 1; n <= 10; ++n) {
        const double shift = std::abs(noisy.points[std::size_t(n)].p - clean.points[std::size_t(n)].p);
        o.require(shift < noisy.points[std::size_t(n)].sigma,
                  "n=" + std::to_string(n) + " shifted by more than 1 sigma");
    }
    return o;
}

// Holography: carve-and-diffract round trip, and the Dove rotation read off
// a rotated grid against cos^2(2 l phi).
Outcome criterion7() {
    Outcome o;
    const int n = 512;
    const double w = 1.0e-3;
    const double pitch = 8.0 * w / n;
    const double w_in = 3.0 * w;

    for (int ell : {1, 2, 3, 4}) {
        const ScalarField target = petal_field(ell, true, w, n, pitch);
        const HologramSpec holo = hologram_phase(scaled_into_envelope(target, w_in), w_in, 8.0 * pitch);
        ScalarField out = first_order_field(holo);
        out.normalize();
        const double fidelity = std::abs(overlap(target, out));
        o.require(fidelity >= 0.999, "l=" + std::to_string(ell) + " round trip " + std::to_string(fidelity));
    }

    const ScalarField petal = petal_field(1, true, w, n, pitch);
    const FilterSpec filter = make_filter(petal, 2.0 * w);
    double worst_dev = 0.0;
    for (int deg = 0; deg <= 45; ++deg) {
        const double phi = double(deg) * kDeg;
        const double detected = std::norm(measurement_overlap(rotated(petal, 2.0 * phi), filter));
        worst_dev = std::max(worst_dev, std::abs(detected - sq(std::cos(2.0 * phi))));
    }
    o.require(worst_dev <= 1e-3, "rotation trace off by " + std::to_string(worst_dev));
    o.note("max |trace - cos^2| = " + std::to_string(worst_dev));
    return o;
}

// Tomography: exact Born counts along the Dove trajectory invert to the
// analytic Bloch rotation; Table I row l1 inverts to the published vector.
Outcome criterion8() {
    Outcome o;
    const CMatrix u = dove_unitary(4, 4.5 * kDeg);
    const double step = 2.0 * (2.0 * 4.0 * 4.5 * kDeg);  // Bloch rotation per loop
    CVector state = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    for (int n = 0; n <= 5; ++n) {
        const BlochVector r = qst_direct_inversion(born_probabilities_petal(state[0], state[1]));
        o.require(std::abs(r.x - std::cos(step * n)) <= 1e-9 && std::abs(r.y - std::sin(step * n)) <= 1e-9 &&
                      std::abs(r.z) <= 1e-9,
                  "Bloch trajectory off at n=" + std::to_string(n));
        if (n == 5)
            o.require(std::abs(accept_prob_from_bloch(r, {1.0, 0.0, 0.0}) - 1.0) <= 1e-9,
                      "n=5 acceptance not 1");
        state = u * state;
    }

    const BlochVector t1 = qst_direct_inversion({2.00, 2.28, 2.15, 0.09, 1.39, 0.87});
    const double hx = (2.15 - 0.09) / (2.15 + 0.09);
    const double hy = (1.39 - 0.87) / (1.39 + 0.87);
    const double hz = (2.00 - 2.28) / (2.00 + 2.28);
    o.require(std::abs(t1.x - hx) <= 1e-3 && std::abs(t1.y - hy) <= 1e-3 && std::abs(t1.z - hz) <= 1e-3,
              "Table I row l1 inversion off");
    o.require(std::abs(t1.x - 0.920) <= 1e-3 && std::abs(t1.y - 0.230) <= 1e-3 &&
                  std::abs(t1.z + 0.065) <= 1e-3,
              "Table I row l1 differs from the published rounding");
    return o;
}

// Calibration: noiseless 0.1-degree scans over 34 degrees pin the offset.
Outcome criterion9() {
    Outcome o;
    const int ell = 10;
    for (double delta : {-0.25, -0.10, 0.05, 0.25}) {
        std::vector<CalibrationSample> samples;
        for (int i = 0; i <= 340; ++i) {
            const double angle = 0.1 * double(i);
            samples.push_back({angle, calibration_model(angle, ell, delta, 1.7, 0.2)});
        }
        const double recovered = calibration_fit(samples, ell).offset_deg;
        o.require(std::abs(recovered - delta) <= 0.02,
                  "offset " + std::to_string(delta) + " recovered as " + std::to_string(recovered));
    }
    return o;
}

// Imperfect-device property: with a depolarizing knob the 4- and 8-state
// machines keep members near 1 and non-members below 1/3 (the exact theory
// values are anchored by criteria 1-3).
Outcome criterion10() {
    Outcome o;
    struct Machine {
        std::vector<int> ells;
        double phi;
        int p;
        int n_max;
    };
    for (const Machine& m : {Machine{{1, 3}, 18.0 * kDeg, 5, 10}, Machine{{1, 2, 3, 4}, kPi / 11.0, 11, 11}}) {
        ExperimentConfig qc = two_cycle_config(false, 400'000, 31337);
        qc.mode.ells = m.ells;
        qc.mode.phi = m.phi;
        qc.n_max = m.n_max;
        qc.depolarization = 0.1;
        ExperimentConfig gc = two_cycle_config(true, 400'000, 1331);
        gc.n_max = m.n_max;
        const LoopProbabilities probs =
            accept_probabilities(simulate_repeats(qc, 10), simulate_repeats(gc, 10), m.n_max);
        for (int n = 1; n <= m.n_max; ++n) {
            const double p = probs.points[std::size_t(n)].p;
            if (n % m.p == 0)
                o.require(std::abs(p - 1.0) < 0.1, "member n=" + std::to_string(n) + " strayed from 1");
            else
                o.require(p < 1.0 / 3.0, "non-member n=" + std::to_string(n) + " above 1/3");
        }
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        Outcome (*fn)();
        double limit_s;
    };
    const std::vector<Criterion> criteria = {
        {1, "2-state QFA worst case", criterion1, 1.0},
        {2, "4-state MOD_5 plateau", criterion2, 1.0},
        {3, "8-state MOD_11", criterion3, 1.0},
        {4, "K-set optimizer and log bound", criterion4, 10.0},
        {5, "closed-loop experiment reproduction", criterion5, 60.0},
        {6, "accidental subtraction", criterion6, 60.0},
        {7, "holography round trip and rotation trace", criterion7, 120.0},
        {8, "tomography by direct inversion", criterion8, 1.0},
        {9, "Dove angle calibration", criterion9, 1.0},
        {10, "imperfect-device property", criterion10, 60.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note(std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds >= c.limit_s) {
            o.pass = false;
            o.note("runtime limit " + std::to_string(c.limit_s) + " s exceeded");
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %2d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.label, seconds,
                    o.detail.str().empty() ? "" : " -- ", o.detail.str().c_str());
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - std::size_t(failures),
                criteria.size());
    return failures == 0 ? 0 : 1;
}
