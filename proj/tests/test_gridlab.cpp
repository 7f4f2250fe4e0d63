#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplab/error.hpp"
#include "hyplab/gridlab.hpp"

using namespace hyplab;

namespace {

PerturbedMap half() { return PerturbedMap(PolynomialMap::univariate({0.0, 0.5})); }

// exhaustive count over all lattice sequences of length n starting at `start`
double brute_count(const PerturbedMap& f, double h, long long kmax, double slack, long long start, int n) {
    if (n == 1) return 1.0;
    double total = 0.0;
    const double y = f.value_1d(static_cast<double>(start) * h);
    for (long long k = -kmax; k <= kmax; ++k) {
        if (std::abs(y - static_cast<double>(k) * h) <= slack) total += brute_count(f, h, kmax, slack, k, n - 1);
    }
    return total;
}

}  // namespace

TEST_CASE("stage tolerances") {
    const GrowthParams p{1.0, 0.1, 1.0};
    const auto s = stage_tolerances(p, 2.0, 1, 2);
    CHECK(std::abs(s.gamma_n - std::exp(-std::pow(2.0, 1.1))) < 1e-15);
    CHECK(std::abs(s.grid_spacing - s.gamma_n / 16.0) < 1e-17);
    CHECK(std::abs(s.pseudo_slack - 3.0 * s.grid_spacing) < 1e-16);

    for (double delta : {0.1, 1.0, 3.0}) CHECK(std::abs(stage_tolerances({2.0, delta, 1.0}, 2.0, 1, 1).gamma_n - std::exp(-2.0)) < 1e-16);
    const auto flat = stage_tolerances(p, 1.0, 3, 4);
    CHECK(std::abs(flat.grid_spacing - flat.gamma_n / 3.0) < 1e-17);

    double prev = 1.0;
    for (int n = 1; n <= 8; ++n) {
        const auto t = stage_tolerances({1.0, 0.5, 0.5}, 3.0, 2, n);
        CHECK(t.gamma_n < prev);
        CHECK(t.grid_spacing <= std::pow(t.gamma_n, 1.0 / 0.5) / 2.0);
        prev = t.gamma_n;
    }
    const auto huge = stage_tolerances({1.0, 1.0, 1.0}, 2.0, 1, 40);
    CHECK(huge.saturated);
    CHECK(huge.log_gamma_n == -1600.0);
    CHECK_THROWS_AS(stage_tolerances(p, 0.5, 1, 2), InvalidInput);
    CHECK_THROWS_AS(stage_tolerances(p, 2.0, 1, 0), InvalidInput);
}

TEST_CASE("snapping") {
    const auto seg = orbit(half(), 0.3, 3);
    const auto t = snap_orbit(half(), seg, 0.01);
    REQUIRE(t.length() == 3);
    CHECK(t.cells[0][0] == 30);
    CHECK(t.cells[1][0] == 15);
    CHECK((t.cells[2][0] == 8 || t.cells[2][0] == 7));
    const auto nb = norm_bounds(half().base(), BrickSpec::empty(), 1.0);
    CHECK(t.slack <= 1.0 * (nb.m1rho + 1.0) * 0.01);

    const auto exact = orbit(half(), 0.5, 3);
    const auto on_grid = snap_orbit(half(), exact, 0.125);
    for (std::size_t j = 0; j < on_grid.length(); ++j) CHECK(on_grid.points[j](0) == exact.points[j](0));
    CHECK(on_grid.slack == 0.0);

    const auto coarse = snap_orbit(half(), seg, 5.0);
    for (const auto& c : coarse.cells) CHECK(c[0] == 0);
    CHECK(coarse.slack == 0.0);
}

TEST_CASE("rounding drift of the derivative") {
    const PerturbedMap f(PolynomialMap::univariate({0.1, 0.6, 0.1, -0.05}));
    const auto nb = norm_bounds(f.base(), BrickSpec::empty(), 1.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 1; n <= 3; ++n) {
        const auto s = stage_tolerances({1.0, 0.5, 1.0}, nb, 1, n);
        const Lattice lattice(s.grid_spacing, 1.0, 1);
        const double bound = std::pow(nb.m1rho, 1.0 - 2.0 * n) * s.gamma_n;
        for (int i = 0; i < 200; ++i) {
            const double x = u(rng);
            const double xs = lattice.point(lattice.snap(Vector::Constant(1, x)))(0);
            CHECK(std::abs(f.derivative_1d(xs) - f.derivative_1d(x)) <= bound * (1 + 1e-12));
        }
    }
}

TEST_CASE("enumeration against exhaustive search") {
    const auto r = enumerate_pseudotrajectories(half(), 0.1, 0.06, Vector::Constant(1, 0.4), 3);
    CHECK(r.exact);
    CHECK(r.count == brute_count(half(), 0.1, 10, 0.06, 4, 3));
    CHECK(r.count == 1.0);
    REQUIRE(r.samples.size() == 1);
    CHECK(std::abs(r.samples[0][2](0) - 0.1) < 1e-15);

    for (double slack : {0.04, 0.11, 0.27}) {
        for (int n = 2; n <= 4; ++n) {
            const auto e = enumerate_pseudotrajectories(half(), 0.1, slack, Vector::Constant(1, -0.7), n);
            CHECK(e.count == brute_count(half(), 0.1, 10, slack, -7, n));
        }
    }

    // unlimited slack counts every lattice sequence
    const Lattice lattice(0.25, 1.0, 1);
    const auto all = enumerate_pseudotrajectories(half(), 0.25, 10.0, Vector::Constant(1, 0.0), 4);
    CHECK(all.count == std::pow(static_cast<double>(lattice.cells_per_axis()), 3));

    EnumerationOptions tiny;
    tiny.budget = 3;
    const auto partial = enumerate_pseudotrajectories(half(), 0.25, 10.0, Vector::Constant(1, 0.0), 4, tiny);
    CHECK_FALSE(partial.exact);
    CHECK(partial.count <= all.count);
}

TEST_CASE("close returns") {
    CHECK(close_return(PointTuple{{0.0, 0.5, 1e-9}}, 1e-6) == std::optional<std::size_t>(2));
    CHECK_FALSE(close_return(PointTuple{{0.1, 0.2, 0.4, 0.8}}, 0.05).has_value());
    CHECK_FALSE(close_return(PointTuple{{0.0, 0.0, 0.0}}, 0.0).has_value());
    // appending after the first return changes nothing
    CHECK(close_return(PointTuple{{0.0, 0.5, 1e-9, 0.0, 0.3}}, 1e-6) == std::optional<std::size_t>(2));
    const std::vector<Vector> planar{Vector::Zero(2), Vector::Constant(2, 0.5), Vector::Constant(2, 1e-8)};
    CHECK(close_return(planar, 1e-6) == std::optional<std::size_t>(2));
}

TEST_CASE("simple and recurrent trajectories") {
    CHECK(classify_simple(PointTuple{{0.0, 0.5, 0.25}}, 0.01) == TrajectoryClass::Simple);
    CHECK(classify_simple(PointTuple{{0.0, 0.5, 1e-12}}, 1e-6) == TrajectoryClass::Recurrent);
    CHECK(classify_simple(PointTuple{{0.3, 0.3}}, 0.0) == TrajectoryClass::Simple);
}
