#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "qfalab/automata.hpp"
#include "qfalab/kset_search.hpp"

using namespace qfalab;

namespace {
constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

/// Independent route: worst false acceptance through explicit 2d x 2d matrix
/// products of the abstract machine.
double worst_via_matrices(int p, const std::vector<int>& K) {
    const QfaSpec q = qfa2d_build(p, K);
    double worst = 0.0;
    for (std::uint64_t n = 1; n <= std::uint64_t(p - 1); ++n)
        worst = std::max(worst, qfa_run(q, n).accept_prob);
    return worst;
}
}  // namespace

TEST_CASE("worst false acceptance of known sets") {
    const auto [n1, p1] = worst_false_accept(5, {1}, kPi / 10.0);
    REQUIRE(p1 == Catch::Approx(sq(std::cos(kPi / 5.0))).margin(1e-12));
    REQUIRE((n1 == 1 || n1 == 4));

    const auto [n2, p2] = worst_false_accept(5, {1, 3}, kPi / 10.0);
    REQUIRE(p2 == Catch::Approx(0.0625).margin(1e-12));

    const auto [n3, p3] = worst_false_accept(11, {1, 2, 3, 4}, kPi / 11.0);
    REQUIRE((n3 == 2 || n3 == 9));
    REQUIRE(p3 == Catch::Approx(worst_via_matrices(11, {1, 2, 3, 4})).margin(1e-10));
    REQUIRE(p3 == Catch::Approx(0.1124).margin(1e-4));
    REQUIRE(p3 < 1.0 / 3.0);
}

TEST_CASE("exhaustive search over singletons") {
    const KSetResult r = exhaustive_best_kset(5, 1);
    REQUIRE(r.K == std::vector<int>{1});
    REQUIRE(r.worst_prob == Catch::Approx(sq(std::cos(kPi / 5.0))).margin(1e-12));
}

TEST_CASE("exhaustive search finds the 0.0625 plateau for p = 5, d = 2") {
    const KSetResult with_dedup = exhaustive_best_kset(5, 2);
    REQUIRE(with_dedup.worst_prob <= 0.0625 + 1e-12);

    const KSetResult full = exhaustive_best_kset(5, 2, /*dedup=*/false);
    REQUIRE(full.worst_prob == Catch::Approx(with_dedup.worst_prob).margin(1e-12));
    REQUIRE(full.K == std::vector<int>{1, 2});  // lex-smallest among the ties
}

TEST_CASE("exhaustive search for p = 11, d = 4 beats the reference set") {
    const double reference = worst_false_accept(11, {1, 2, 3, 4}, kPi / 11.0).second;
    const KSetResult full = exhaustive_best_kset(11, 4, /*dedup=*/false);
    REQUIRE(full.worst_prob <= reference + 1e-12);
    REQUIRE(full.worst_prob == Catch::Approx(worst_via_matrices(11, full.K)).margin(1e-10));

    // dedup scans a smaller pool but reaches the same optimum value
    const KSetResult canonical = exhaustive_best_kset(11, 4);
    REQUIRE(canonical.worst_prob == Catch::Approx(full.worst_prob).margin(1e-12));
}

TEST_CASE("exhaustive search guards its candidate budget") {
    REQUIRE_THROWS_AS(exhaustive_best_kset(1009, 4), BudgetExceededError);
    REQUIRE_THROWS_AS(exhaustive_best_kset(6, 1), InvalidParameterError);  // not prime
}

TEST_CASE("randomized search saturates a tiny space and is deterministic") {
    const KSetResult a = randomized_best_kset(5, 2, 100, 1);
    REQUIRE(a.worst_prob == Catch::Approx(0.0625).margin(1e-12));
    const KSetResult b = randomized_best_kset(5, 2, 100, 1);
    REQUIRE(a.K == b.K);
    REQUIRE(a.worst_prob == b.worst_prob);
    REQUIRE(a.worst_n == b.worst_n);
    REQUIRE_THROWS_AS(randomized_best_kset(101, 8, 0, 3), InvalidParameterError);
}

TEST_CASE("log-bound verification on small primes") {
    const LogBoundResult r5 = verify_log_bound(5, 1.0 / 3.0);
    REQUIRE(r5.success);
    REQUIRE(r5.d_used <= 2);
    REQUIRE(r5.worst_prob <= 1.0 / 3.0);

    const LogBoundResult r11 = verify_log_bound(11, 1.0 / 3.0);
    REQUIRE(r11.success);
    REQUIRE(r11.d_used <= 4);

    const LogBoundResult r3 = verify_log_bound(3, 0.49);
    REQUIRE(r3.success);
    REQUIRE(r3.d_used == 1);
    REQUIRE(r3.worst_prob == Catch::Approx(0.25).margin(1e-12));

    REQUIRE_THROWS_AS(verify_log_bound(2, 1.0 / 3.0), InvalidParameterError);
    REQUIRE_THROWS_AS(verify_log_bound(5, 0.6), InvalidParameterError);
}

TEST_CASE("invariant: the optimum improves (weakly) with set size") {
    for (int p : {11, 13}) {
        double prev = 1.0;
        for (int d = 1; d <= 4; ++d) {
            const KSetResult r = exhaustive_best_kset(p, d, /*dedup=*/false);
            REQUIRE(r.worst_prob <= prev + 1e-12);
            prev = r.worst_prob;
        }
    }
}

TEST_CASE("invariant: closed form matches matrix products on every candidate") {
    const int p = 7;
    for (int k1 = 1; k1 <= p - 2; ++k1)
        for (int k2 = k1 + 1; k2 <= p - 1; ++k2) {
            const std::vector<int> K = {k1, k2};
            const double via_formula = worst_false_accept(p, K, kPi / p).second;
            REQUIRE(via_formula == Catch::Approx(worst_via_matrices(p, K)).margin(1e-10));
        }
}

TEST_CASE("invariant: members are accepted perfectly by the optimizer's pick") {
    const KSetResult r = exhaustive_best_kset(11, 4, /*dedup=*/false);
    REQUIRE(accept_prob_closed_form(r.K, kPi / 11.0, 11) == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(qfa_run(qfa2d_build(11, r.K), 11).accept_prob == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("quantum advantage witness: 8 states suffice where 11 are classically needed") {
    const KSetResult r = exhaustive_best_kset(11, 4, /*dedup=*/false);
    REQUIRE(2 * r.d() == 8);
    REQUIRE(r.worst_prob < 1.0 / 3.0);
}
