#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "qfalab/errors.hpp"
#include "qfalab/parallel.hpp"
#include "qfalab/photonic.hpp"

namespace qfalab {

// Optimization over rotation sets K for the 2d-state MOD_p decider. All
// candidates are scored in the abstract formulation theta_k = 2*k*pi/p,
// i.e. the closed form evaluated at phi = pi/p, which the photonic angle
// rules reduce to. Periodicity in n makes the worst case over n = 1..p-1
// exact.

struct KSetResult {
    int p = 0;
    std::vector<int> K;  // sorted
    int worst_n = 0;
    double worst_prob = 1.0;
    std::optional<double> epsilon_target;

    int d() const { return int(K.size()); }
};

namespace kset_detail {

/// Abstract-formulation acceptance with the rotation angles reduced as
/// integers first: theta summands are cos(pi * e / p) with
/// e = min(2nk mod 2p, 2p - 2nk mod 2p). Equivalent sets (k <-> p-k, and
/// n <-> p-n) then produce bit-identical doubles, which keeps the
/// lexicographic tie-break meaningful across platforms.
inline double acceptance_canonical(int p, const std::vector<int>& K, int n) {
    double sum = 0.0;
    for (int k : K) {
        const long long m = (2ll * n * k) % (2ll * p);
        const long long e = std::min(m, 2ll * p - m);
        sum += std::cos(std::numbers::pi * double(e) / double(p));
    }
    const double d = double(K.size());
    return (sum * sum) / (d * d);
}

inline std::pair<int, double> worst_canonical(int p, const std::vector<int>& K) {
    int worst_n = 1;
    double worst = -1.0;
    for (int n = 1; n <= p - 1; ++n) {
        const double prob = acceptance_canonical(p, K, n);
        if (prob > worst) {
            worst = prob;
            worst_n = n;
        }
    }
    return {worst_n, worst};
}

}  // namespace kset_detail

/// Exact worst-case false acceptance: max over n = 1..p-1 of the closed-form
/// acceptance at angle phi. Returns (attaining n, probability); the smallest
/// attaining n is reported.
inline std::pair<int, double> worst_false_accept(int p, const std::vector<int>& K, double phi) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    PetalBasis{K}.validate();
    for (int k : K)
        if (k > p - 1) throw InvalidParameterError("k must lie in 1..p-1");
    int worst_n = 1;
    double worst = -1.0;
    for (int n = 1; n <= p - 1; ++n) {
        const double prob = accept_prob_closed_form(K, phi, std::uint64_t(n));
        if (prob > worst) {
            worst = prob;
            worst_n = n;
        }
    }
    return {worst_n, worst};
}

/// Abstract formulation theta_k = 2 k pi / p (equals phi = pi/p).
inline std::pair<int, double> worst_false_accept(int p, const std::vector<int>& K) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    PetalBasis{K}.validate();
    for (int k : K)
        if (k > p - 1) throw InvalidParameterError("k must lie in 1..p-1");
    return kset_detail::worst_canonical(p, K);
}

namespace kset_detail {

inline constexpr std::uint64_t kCandidateBudget = 100'000'000ull;

/// C(n, k) capped at `cap + 1` to stay clear of overflow.
inline std::uint64_t comb_count_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i is always integral at this point
        if (c > (cap + 1) / (n - k + i) * i) return cap + 1;
        c = c / i * (n - k + i) + (c % i) * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

/// Index combination of the given lexicographic rank (combinatorial number
/// system); counts here are small enough that the capped C() is exact.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
    std::vector<std::size_t> idx(k);
    std::size_t start = 0;
    for (std::size_t pos = 0; pos < k; ++pos) {
        for (std::size_t v = start;; ++v) {
            const std::uint64_t block = comb_count_capped(n - v - 1, k - pos - 1, kCandidateBudget);
            if (rank < block) {
                idx[pos] = v;
                start = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return idx;
}

/// Advances an index combination in lexicographic order; false at the end.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - (k - i)) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct Candidate {
    double worst_prob = 2.0;
    int worst_n = 0;
    std::vector<int> K;

    bool better_than(const Candidate& other) const {
        if (K.empty()) return false;
        if (other.K.empty()) return true;
        if (worst_prob != other.worst_prob) return worst_prob < other.worst_prob;
        return K < other.K;  // lexicographic tie-break
    }
};

}  // namespace kset_detail

/// Candidate pool for the exhaustive enumerator (see exhaustive_best_kset).
inline std::size_t exhaustive_pool_size(int p, int d, bool dedup = true) {
    const int half = (p - 1) / 2;
    return std::size_t((dedup && d <= half) ? half : p - 1);
}

/// True when C(pool, d) fits the exhaustive candidate budget.
inline bool exhaustive_within_budget(int p, int d, bool dedup = true) {
    return kset_detail::comb_count_capped(exhaustive_pool_size(p, d, dedup), std::size_t(d),
                                          kset_detail::kCandidateBudget) <= kset_detail::kCandidateBudget;
}

/// Global minimizer of worst_false_accept over all size-d subsets of the
/// candidate pool. With dedup (default) the pool is the canonical half
/// k <= (p-1)/2, since k and p-k generate identical probabilities; if d
/// exceeds that pool the enumeration transparently widens to 1..p-1.
/// Candidate chunks are scanned in parallel and merged by
/// min(worst_prob, K), so the result is scheduling-independent.
inline KSetResult exhaustive_best_kset(int p, int d, bool dedup = true) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    if (d < 1) throw InvalidParameterError("d must be >= 1");

    std::vector<int> pool;
    for (int k = 1; k <= int(exhaustive_pool_size(p, d, dedup)); ++k) pool.push_back(k);
    if (d > int(pool.size()))
        throw InvalidParameterError("d exceeds the number of distinct k values");

    const std::uint64_t count =
        kset_detail::comb_count_capped(pool.size(), std::size_t(d), kset_detail::kCandidateBudget);
    if (count > kset_detail::kCandidateBudget)
        throw BudgetExceededError("candidate space exceeds the exhaustive budget; use randomized search");

    const unsigned workers = worker_count();
    std::vector<kset_detail::Candidate> best_per_chunk(workers);

    parallel_chunks(std::size_t(count), [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::vector<std::size_t> idx = kset_detail::unrank_combination(pool.size(), std::size_t(d), begin);
        kset_detail::Candidate local;
        std::vector<int> K(std::size_t(d), 0);
        for (std::size_t r = begin; r < end; ++r) {
            for (std::size_t i = 0; i < idx.size(); ++i) K[i] = pool[idx[i]];
            const auto [worst_n, worst] = kset_detail::worst_canonical(p, K);
            kset_detail::Candidate c{worst, worst_n, K};
            if (c.better_than(local)) local = std::move(c);
            if (r + 1 < end) kset_detail::next_combination(idx, pool.size());
        }
        best_per_chunk[chunk] = std::move(local);
    }, workers);

    kset_detail::Candidate best;
    for (auto& c : best_per_chunk)
        if (c.better_than(best)) best = std::move(c);

    return {p, best.K, best.worst_n, best.worst_prob, std::nullopt};
}

/// Best of `trials` uniformly sampled d-subsets of 1..p-1. Deterministic for
/// a given seed; sampling is a partial Fisher-Yates shuffle per trial.
inline KSetResult randomized_best_kset(int p, int d, std::uint64_t trials, std::uint64_t seed) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    if (d < 1 || d > p - 1) throw InvalidParameterError("d must lie in 1..p-1");
    if (trials < 1) throw InvalidParameterError("trials must be >= 1");

    std::mt19937_64 rng(seed);
    std::vector<int> pool(std::size_t(p - 1));
    for (int k = 1; k <= p - 1; ++k) pool[std::size_t(k - 1)] = k;

    kset_detail::Candidate best;
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (int i = 0; i < d; ++i) {
            const std::size_t j = std::size_t(i) + std::size_t(rng() % std::uint64_t(pool.size() - std::size_t(i)));
            std::swap(pool[std::size_t(i)], pool[j]);
        }
        std::vector<int> K(pool.begin(), pool.begin() + d);
        std::sort(K.begin(), K.end());
        const auto [worst_n, worst] = kset_detail::worst_canonical(p, K);
        kset_detail::Candidate c{worst, worst_n, std::move(K)};
        if (c.better_than(best)) best = std::move(c);
    }
    return {p, best.K, best.worst_n, best.worst_prob, std::nullopt};
}

struct LogBoundResult {
    bool success = false;
    int d_used = 0;
    int d_bound = 0;
    std::vector<int> K;
    double worst_prob = 1.0;
};

/// Searches d = 1, 2, ... for the smallest rotation set whose worst-case
/// false acceptance is <= epsilon, and checks it against the
/// ceil((4/eps) ln 2p) size bound (natural log). Odd primes only: for p = 2
/// the lone rotation theta = pi maps |0> to -|0>, so every input is accepted
/// with probability 1 and no bound below 1/2 is reachable.
inline LogBoundResult verify_log_bound(int p, double epsilon) {
    if (!is_prime(p) || p == 2) throw InvalidParameterError("p must be an odd prime");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidParameterError("epsilon must lie in (0, 0.5)");

    LogBoundResult r;
    r.d_bound = int(std::ceil((4.0 / epsilon) * std::log(2.0 * double(p))));
    const int d_max = std::min(r.d_bound, p - 1);
    for (int d = 1; d <= d_max; ++d) {
        KSetResult best = exhaustive_best_kset(p, d);
        if (best.worst_prob <= epsilon) {
            r.success = true;
            r.d_used = d;
            r.K = best.K;
            r.worst_prob = best.worst_prob;
            return r;
        }
    }
    return r;
}

}  // namespace qfalab
