#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "qfalab/linalg.hpp"

using namespace qfalab;

TEST_CASE("matrix product and adjoint") {
    CMatrix a = {{cplx{1, 0}, cplx{0, 1}}, {cplx{2, 0}, cplx{0, 0}}};
    CMatrix b = {{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}};
    CMatrix c = a * b;
    REQUIRE(c(0, 0) == cplx{0, 1});
    REQUIRE(c(0, 1) == cplx{1, 0});
    REQUIRE(c(1, 0) == cplx{0, 0});
    REQUIRE(c(1, 1) == cplx{2, 0});

    CMatrix ad = a.adjoint();
    REQUIRE(ad(1, 0) == cplx{0, -1});
    REQUIRE(ad(0, 1) == cplx{2, 0});
}

TEST_CASE("matrix power by repeated squaring matches the naive chain") {
    const double t = 0.37;
    CMatrix r(2, 2);
    r(0, 0) = std::cos(t);
    r(0, 1) = -std::sin(t);
    r(1, 0) = std::sin(t);
    r(1, 1) = std::cos(t);

    CMatrix naive = CMatrix::identity(2);
    for (int i = 0; i < 25; ++i) naive = naive * r;
    REQUIRE(max_abs_diff(naive, r.pow(25)) < 1e-13);
    REQUIRE(max_abs_diff(r.pow(0), CMatrix::identity(2)) == 0.0);
}

TEST_CASE("unitarity defect measures deviation from U^dag U = I") {
    CMatrix u = CMatrix::identity(3);
    REQUIRE(u.unitarity_defect() < 1e-15);
    u(0, 0) = cplx{1.0 + 1e-6, 0.0};
    REQUIRE(u.unitarity_defect() > 1e-6);
}

TEST_CASE("unitary completion extends a given column set deterministically") {
    const std::size_t dim = 6;
    CVector first(dim, cplx{});
    for (std::size_t j = 0; j < dim; j += 2) first[j] = cplx{1.0 / std::sqrt(3.0), 0.0};

    CMatrix u = complete_unitary({first}, dim);
    REQUIRE(u.unitarity_defect() < 1e-13);
    for (std::size_t i = 0; i < dim; ++i) REQUIRE(std::abs(u(i, 0) - first[i]) < 1e-15);

    // deterministic: same input, same matrix
    CMatrix v = complete_unitary({first}, dim);
    REQUIRE(max_abs_diff(u, v) == 0.0);
}

TEST_CASE("primality helper") {
    for (int p : {2, 3, 5, 7, 11, 13, 29, 31}) REQUIRE(is_prime(p));
    for (int n : {-3, 0, 1, 4, 9, 15, 21, 25}) REQUIRE_FALSE(is_prime(n));
}
