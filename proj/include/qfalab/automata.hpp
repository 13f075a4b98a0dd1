#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qfalab/errors.hpp"
#include "qfalab/linalg.hpp"

namespace qfalab {

// Classical and quantum finite automata for the unary languages MOD_n.
// All machines read cent + a^len + dollar; the unary alphabet keeps every
// transition structure a single matrix (or table) per end-marker and symbol.

inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kStochasticTol = 1e-12;

/// Deterministic finite automaton over the unary alphabet {a}.
struct DfaSpec {
    int n_states = 0;
    int initial = 0;
    std::set<int> accepting;
    std::vector<int> transition;  // transition[s] = next state on reading `a`

    void validate() const {
        if (n_states <= 0) throw InvalidSpecError("DFA needs at least one state");
        if (initial < 0 || initial >= n_states) throw InvalidSpecError("DFA initial state out of range");
        if (int(transition.size()) != n_states) throw InvalidSpecError("DFA transition table incomplete");
        for (int s : transition)
            if (s < 0 || s >= n_states) throw InvalidSpecError("DFA transition target out of range");
        for (int s : accepting)
            if (s < 0 || s >= n_states) throw InvalidSpecError("DFA accepting state out of range");
    }
};

/// Probabilistic finite automaton: left-stochastic matrices for cent, a, dollar.
struct PfaSpec {
    int n_states = 0;
    RVector v0;
    RMatrix A_cent, A_a, A_dollar;
    std::set<int> accepting;

    void validate() const {
        if (n_states <= 0) throw InvalidSpecError("PFA needs at least one state");
        const std::size_t n = std::size_t(n_states);
        if (v0.size() != n) throw InvalidSpecError("PFA v0 dimension mismatch");
        double sum = 0.0;
        for (double p : v0) {
            if (p < -kStochasticTol || p > 1.0 + kStochasticTol)
                throw InvalidSpecError("PFA v0 entry outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kStochasticTol) throw InvalidSpecError("PFA v0 does not sum to 1");
        for (const RMatrix* m : {&A_cent, &A_a, &A_dollar}) {
            if (m->rows() != n || m->cols() != n) throw InvalidSpecError("PFA matrix dimension mismatch");
            for (std::size_t j = 0; j < n; ++j) {
                double col = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double p = (*m)(i, j);
                    if (p < -kStochasticTol || p > 1.0 + kStochasticTol)
                        throw InvalidSpecError("PFA matrix entry outside [0,1]");
                    col += p;
                }
                if (std::abs(col - 1.0) > kStochasticTol)
                    throw InvalidSpecError("PFA matrix column does not sum to 1");
            }
        }
        for (int s : accepting)
            if (s < 0 || s >= n_states) throw InvalidSpecError("PFA accepting state out of range");
    }
};

/// Quantum finite automaton: unit initial state, per-symbol unitaries, and a
/// projective acceptance set.
struct QfaSpec {
    int dim = 0;
    CVector v0;
    CMatrix V_cent, V_a, V_dollar;
    std::set<int> accepting;

    void validate() const {
        if (dim <= 0) throw InvalidSpecError("QFA needs positive dimension");
        const std::size_t n = std::size_t(dim);
        if (v0.size() != n) throw InvalidSpecError("QFA v0 dimension mismatch");
        if (std::abs(norm2(v0) - 1.0) > kStochasticTol) throw InvalidSpecError("QFA v0 is not a unit vector");
        for (const CMatrix* m : {&V_cent, &V_a, &V_dollar}) {
            if (m->rows() != n || m->cols() != n) throw InvalidSpecError("QFA matrix dimension mismatch");
            if (m->unitarity_defect() > kUnitaryTol) throw InvalidSpecError("QFA matrix is not unitary");
        }
        for (int s : accepting)
            if (s < 0 || s >= dim) throw InvalidSpecError("QFA accepting state out of range");
    }
};

template <class StateVec>
struct RunResult {
    double accept_prob = 0.0;
    StateVec final_state;
};

using PfaRunResult = RunResult<RVector>;
using QfaRunResult = RunResult<CVector>;

/// The n-state cycle recognizing MOD_n: s0 -> s1 -> ... -> s0, accepting {s0}.
inline DfaSpec dfa_build_modn(int n) {
    if (n < 2) throw InvalidModulusError("MOD_n needs n >= 2");
    DfaSpec d;
    d.n_states = n;
    d.initial = 0;
    d.accepting = {0};
    d.transition.resize(n);
    for (int s = 0; s < n; ++s) d.transition[s] = (s + 1) % n;
    return d;
}

inline bool dfa_accepts(const DfaSpec& spec, std::uint64_t len) {
    spec.validate();
    int s = spec.initial;
    for (std::uint64_t i = 0; i < len; ++i) s = spec.transition[std::size_t(s)];
    return spec.accepting.count(s) > 0;
}

/// v_f = A_$ A_a^len A_cent v0; acceptance is the probability mass on the
/// accepting states.
inline PfaRunResult pfa_run(const PfaSpec& spec, std::uint64_t len) {
    spec.validate();
    RVector v = spec.A_cent * spec.v0;
    if (len > 0) {
        const RMatrix an = spec.A_a.pow(len);
        v = an * v;
    }
    v = spec.A_dollar * v;
    double p = 0.0;
    for (int s : spec.accepting) p += v[std::size_t(s)];
    return {p, std::move(v)};
}

inline double qfa_accept_prob(const QfaSpec& spec, const CVector& state) {
    double p = 0.0;
    for (int s : spec.accepting) p += std::norm(state[std::size_t(s)]);
    return p;
}

/// v_f = V_$ V_a^len V_cent v0. The a-symbol unitary is applied once per read
/// symbol rather than as a precomputed power, so intermediate states can be
/// observed by the optional callback.
inline QfaRunResult qfa_run(const QfaSpec& spec, std::uint64_t len,
                            const std::function<void(std::uint64_t, const CVector&)>& observer = {}) {
    spec.validate();
    CVector v = spec.V_cent * spec.v0;
    if (observer) observer(0, v);
    for (std::uint64_t i = 1; i <= len; ++i) {
        v = spec.V_a * v;
        if (observer) observer(i, v);
    }
    v = spec.V_dollar * v;
    return {qfa_accept_prob(spec, v), std::move(v)};
}

/// Unbounded-error decision at an arbitrary cutpoint (default 1/2): accept
/// strictly above, reject at or below.
inline bool accepts_at_cutpoint(double accept_prob, double cutpoint = 0.5) {
    if (!(cutpoint >= 0.0 && cutpoint < 1.0)) throw InvalidParameterError("cutpoint must lie in [0,1)");
    return accept_prob > cutpoint;
}

/// Bounded-error decision: definite accept above 1 - epsilon, definite
/// reject at or below epsilon, otherwise indeterminate.
inline std::optional<bool> accepts_with_error_bound(double accept_prob, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw InvalidParameterError("epsilon must lie in [0, 1/2)");
    if (accept_prob > 1.0 - epsilon) return true;
    if (accept_prob <= epsilon) return false;
    return std::nullopt;
}

/// 2x2 counter-clockwise rotation embedded as a complex matrix.
inline CMatrix rotation_matrix(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    CMatrix u(2, 2);
    u(0, 0) = c;
    u(0, 1) = -s;
    u(1, 0) = s;
    u(1, 1) = c;
    return u;
}

/// 2-state QFA for MOD_p: each symbol rotates the state by 2*k*pi/p on the
/// real plane; end-markers act as the identity; |0> accepts.
inline QfaSpec qfa2_build(int p, int k) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    if (k < 1 || k > p - 1) throw InvalidParameterError("k must lie in 1..p-1");
    QfaSpec q;
    q.dim = 2;
    q.v0 = basis_vector(2, 0);
    q.V_cent = CMatrix::identity(2);
    q.V_dollar = CMatrix::identity(2);
    q.V_a = rotation_matrix(2.0 * double(k) * std::numbers::pi / double(p));
    q.accepting = {0};
    return q;
}

/// 2d-state QFA built from d parallel sub-QFAs with rotation angles
/// 2*k_j*pi/p. V_cent sends e0 to the uniform superposition of the even basis
/// states and is completed to a full unitary by deterministic Gram-Schmidt;
/// V_$ is its inverse, so members of MOD_p land back on |0> exactly.
inline QfaSpec qfa2d_build(int p, const std::vector<int>& K) {
    if (!is_prime(p)) throw InvalidParameterError("p must be prime");
    if (K.empty()) throw InvalidParameterError("K must be non-empty");
    std::set<int> seen;
    for (int k : K) {
        if (k < 1 || k > p - 1) throw InvalidParameterError("k must lie in 1..p-1");
        if (!seen.insert(k).second) throw InvalidParameterError("duplicate k in K");
    }
    const std::size_t d = K.size();
    const std::size_t dim = 2 * d;

    CVector superpos(dim, cplx{});
    for (std::size_t j = 0; j < d; ++j) superpos[2 * j] = cplx{1.0 / std::sqrt(double(d)), 0.0};

    QfaSpec q;
    q.dim = int(dim);
    q.v0 = basis_vector(dim, 0);
    q.V_cent = complete_unitary({superpos}, dim);
    q.V_dollar = q.V_cent.adjoint();
    q.V_a = CMatrix(dim, dim);
    for (std::size_t j = 0; j < d; ++j) {
        const CMatrix u = rotation_matrix(2.0 * double(K[j]) * std::numbers::pi / double(p));
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) q.V_a(2 * j + r, 2 * j + c) = u(r, c);
    }
    q.accepting = {0};
    return q;
}

/// Embeds a DFA as a PFA whose matrices are the corresponding permutation
/// (deterministic) column-stochastic matrices.
inline PfaSpec pfa_from_dfa(const DfaSpec& dfa) {
    dfa.validate();
    const std::size_t n = std::size_t(dfa.n_states);
    PfaSpec p;
    p.n_states = dfa.n_states;
    p.v0.assign(n, 0.0);
    p.v0[std::size_t(dfa.initial)] = 1.0;
    p.A_cent = RMatrix::identity(n);
    p.A_dollar = RMatrix::identity(n);
    p.A_a = RMatrix(n, n);
    for (std::size_t s = 0; s < n; ++s) p.A_a(std::size_t(dfa.transition[s]), s) = 1.0;
    p.accepting = dfa.accepting;
    return p;
}

}  // namespace qfalab
