#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hyplab/dynamics.hpp"
#include "hyplab/error.hpp"
#include "hyplab/interval.hpp"

using namespace hyplab;

TEST_CASE("interval arithmetic keeps exact results as points") {
    const Interval a{-1.0};
    const Interval sq = a * a - Interval{1.0};
    CHECK(sq.is_point());
    CHECK(sq.lo == 0.0);
    const Interval tenth = Interval{0.1} + Interval{0.2};
    CHECK(tenth.contains(0.1 + 0.2));
    CHECK(tenth.lo < tenth.hi);  // inexact sums are widened
    CHECK(pow(Interval{-2.0, 1.0}, 2).lo == 0.0);
    CHECK(pow(Interval{-2.0, 1.0}, 2).hi == 4.0);
    Interval out;
    CHECK_FALSE(intersect(Interval{0.0, 1.0}, Interval{2.0, 3.0}, out));
}

TEST_CASE("evaluate") {
    const PerturbedMap quad(PolynomialMap::univariate({-1.0, 0.0, 1.0}));
    CHECK(quad.evaluate(Vector::Constant(1, 0.0))(0) == -1.0);
    CHECK_THROWS_AS(quad.evaluate(Vector::Constant(1, 1.5)), DomainError);

    const PerturbedMap two(PolynomialMap::univariate({0.0, 2.0}));
    const auto closed = two.with_term(ProductTerm{-3.0, {0.1}, {1}});
    CHECK(std::abs(closed.value_1d(0.2) - 0.1) < 1e-15);
    CHECK(closed.value_1d(0.1) == two.value_1d(0.1));

    const PerturbedMap id(PolynomialMap::identity(2));
    Vector x(2);
    x << 0.3, -0.4;
    CHECK((id.evaluate(x) - x).norm() == 0.0);
}

TEST_CASE("orbit and cocycle") {
    const PerturbedMap quad(PolynomialMap::univariate({-1.0, 0.0, 1.0}));
    const auto seg = orbit(quad, 0.0, 2);
    CHECK(seg.points_1d() == std::vector<double>{0.0, -1.0});
    CHECK(seg.images[0](0) == -1.0);
    CHECK(seg.images[1](0) == 0.0);
    CHECK(cocycle(seg)(0, 0) == 0.0);

    const PerturbedMap id(PolynomialMap::identity(2));
    const auto c = orbit(id, Vector::Constant(2, 0.2), 5);
    for (const auto& p : c.points) CHECK((p - Vector::Constant(2, 0.2)).norm() == 0.0);
    CHECK((cocycle(c) - Matrix::Identity(2, 2)).norm() == 0.0);

    Matrix a(2, 2);
    a << 0.5, 0.1, -0.2, 0.3;
    const PerturbedMap lin(PolynomialMap::linear(a));
    CHECK((cocycle(orbit(lin, Vector::Constant(2, 0.1), 4)) - a * a * a * a).norm() < 1e-15);

    const PerturbedMap two(PolynomialMap::univariate({0.0, 2.0}));
    try {
        orbit(two, 0.6, 2);
        FAIL("expected an escape");
    } catch (const EscapeError& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("concatenate") {
    const PerturbedMap quad(PolynomialMap::univariate({-1.0, 0.0, 1.0}));
    const auto head = orbit(quad, 0.3, 3);
    const auto tail = orbit(quad, head.images.back(), 2);
    const auto whole = concatenate(head, tail);
    CHECK(whole.points_1d() == orbit(quad, 0.3, 5).points_1d());
}

TEST_CASE("norm bounds") {
    const auto half = norm_bounds(PolynomialMap::univariate({0.0, 0.5}), BrickSpec::empty(), 1.0);
    CHECK(half.invertibility_certified);
    CHECK(std::abs(half.m1 - 2.0) < 1e-9);
    CHECK(std::abs(half.m1rho - 2.0) < 1e-9);

    const auto id = norm_bounds(PolynomialMap::identity(1), BrickSpec::empty(), 1.0);
    CHECK(id.m1 >= 1.0);
    CHECK(std::abs(id.m1rho - 2.0) < 1e-9);

    const auto rho_half = norm_bounds(PolynomialMap::univariate({0.0, 0.5}), BrickSpec::empty(), 0.5);
    CHECK(rho_half.m1rho >= 4.0);

    // a brick can only enlarge the forward bounds
    const auto bricked = norm_bounds(PolynomialMap::univariate({0.0, 0.5}), BrickSpec::factorial(0.01, 6), 1.0);
    CHECK(bricked.forward_c1 > half.forward_c1);

    // the quadratic is not invertible on [-1, 1]
    const auto quad = norm_bounds(PolynomialMap::univariate({-1.0, 0.0, 1.0}), BrickSpec::empty(), 1.0);
    CHECK_FALSE(quad.invertibility_certified);
    CHECK(std::isinf(quad.inverse_c1));
}

TEST_CASE("into-interior check") {
    CHECK(check_into_interior(PerturbedMap(PolynomialMap::univariate({0.0, 0.5}))).holds);
    const auto quad = check_into_interior(PerturbedMap(PolynomialMap::univariate({-1.0, 0.0, 1.0})));
    CHECK_FALSE(quad.holds);  // f(0) = -1 touches the boundary
    CHECK(check_into_interior(PerturbedMap(PolynomialMap::univariate({-1.0, 0.0, 1.0}, 1.25))).holds);
    Matrix a = 0.4 * Matrix::Identity(2, 2);
    CHECK(check_into_interior(PerturbedMap(PolynomialMap::linear(a))).holds);
}
