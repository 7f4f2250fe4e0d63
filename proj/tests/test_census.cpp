#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "hyplab/census.hpp"
#include "hyplab/error.hpp"
#include "hyplab/hyperbolicity.hpp"
#include "hyplab/lagrange.hpp"

using namespace hyplab;

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

std::vector<double> poly_compose(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out{0.0};
    for (std::size_t k = p.size(); k-- > 0;) {
        out = poly_mul(out, q);
        out[0] += p[k];
    }
    return out;
}

// simple real roots of f^n(x) - x inside [-r, r] from companion eigenvalues
std::vector<double> root_oracle(const std::vector<double>& f, int n, double r) {
    std::vector<double> g{0.0, 1.0};
    for (int i = 0; i < n; ++i) g = poly_compose(f, g);
    g[1] -= 1.0;
    while (g.back() == 0.0) g.pop_back();
    const int deg = static_cast<int>(g.size()) - 1;
    Matrix comp = Matrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -g[static_cast<std::size_t>(i)] / g.back();
    Eigen::EigenSolver<Matrix> es(comp);
    std::vector<double> out;
    for (int i = 0; i < deg; ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) < 1e-8 && std::abs(z.real()) <= r) out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

PerturbedMap quad() { return PerturbedMap(PolynomialMap::univariate({-1.0, 0.0, 1.0})); }
PerturbedMap half() { return PerturbedMap(PolynomialMap::univariate({0.0, 0.5})); }

// x/2 plus phi with phi'(0) = 1/2 and a flat jet at +-1: g(0) = 0 with g'(0) = 1.
// This anchor keeps every coefficient exact, so the multiplier is exactly 1.
PerturbedMap parabolic() {
    const PointTuple anchor{{-1.0, 0.0, 1.0}};
    const MultijetPoint target{anchor, {0.0, 0.0, 0.0}, {0.0, 0.5, 0.0}};
    auto coeffs = lagrange_map_inverse(jet_solve(anchor, target)).eps;
    coeffs[1] += 0.5;
    return PerturbedMap(PolynomialMap::univariate(coeffs));
}

}  // namespace

TEST_CASE("quadratic census") {
    const auto c1 = find_periodic(quad(), 1);
    CHECK(c1.certified);
    REQUIRE(c1.count == 1);
    CHECK(std::abs(c1.records[0].point(0) - (1.0 - std::sqrt(5.0)) / 2.0) < 1e-12);

    const auto c2 = find_periodic(quad(), 2);
    CHECK(c2.certified);
    REQUIRE(c2.count == 3);
    CHECK(c2.records[0].point(0) == -1.0);
    CHECK(c2.records[2].point(0) == 0.0);
    CHECK(c2.records[0].is_least_period);
    CHECK_FALSE(c2.records[1].is_least_period);
    CHECK(c2.records[1].enclosure[0].width() <= 1e-12);

    CHECK(std::abs(gamma_n_of_map(quad(), 1).value - 0.2360680) < 1e-6);
    CHECK(std::abs(gamma_n_of_map(quad(), 2).value - 0.5278640) < 1e-6);
}

TEST_CASE("contraction census") {
    for (int n = 1; n <= 6; ++n) {
        const auto c = find_periodic(half(), n);
        CHECK(c.count == 1);
        CHECK(c.certified);
    }
    CHECK(std::abs(gamma_n_of_map(half(), 2).value - 0.75) < 1e-12);
}

TEST_CASE("gamma_n is the minimum over records") {
    const auto c = find_periodic(quad(), 4);
    double m = INFINITY;
    for (const auto& r : c.records) m = std::min(m, r.gamma.gamma);
    CHECK(c.gamma_n == m);
}

TEST_CASE("empty censuses") {
    // a translation of the plane has no fixed points
    std::vector<std::vector<PolynomialMap::Term>> comps{{{MultiIndex{{1, 0}}, 1.0}, {MultiIndex{{0, 0}}, 0.5}},
                                                         {{MultiIndex{{0, 1}}, 1.0}}};
    const PerturbedMap shift(PolynomialMap(2, comps, 1.0));
    const auto c = find_periodic(shift, 1);
    CHECK(c.count == 0);
    CHECK(std::isinf(c.gamma_n));
    CHECK(implied_constant(0, INFINITY, 2.0, 3, 1, 1.0) == 0.0);
    CHECK(std::isinf(implied_constant(2, 0.0, 2.0, 3, 1, 1.0)));
}

TEST_CASE("oracle equivalence on random polynomials") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 30) {
        // random quadratic / cubic scaled into [-1, 1]
        std::vector<double> c{u(rng) * 0.3, u(rng) * 0.8, u(rng) * 0.8, u(rng) * 0.5};
        double sum = 0.0;
        for (double v : c) sum += std::abs(v);
        if (sum >= 0.98) {
            for (double& v : c) v *= 0.97 / sum;
        }
        const PerturbedMap f(PolynomialMap::univariate(c));
        for (int n = 1; n <= 3; ++n) {
            const auto census = find_periodic(f, n);
            if (!census.certified) continue;
            const auto roots = root_oracle(c, n, 1.0);
            REQUIRE(census.count == roots.size());
            for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(census.records[i].point(0) - roots[i]) < 1e-7);
        }
        ++checked;
    }
}

TEST_CASE("period divisibility") {
    const auto c2 = find_periodic(quad(), 2);
    const auto c6 = find_periodic(quad(), 6);
    for (const auto& r : c2.records) {
        const bool found = std::any_of(c6.records.begin(), c6.records.end(),
                                       [&](const PeriodicPointRecord& s) { return std::abs(s.point(0) - r.point(0)) < 1e-9; });
        CHECK(found);
    }
}

TEST_CASE("tangential zeros are reported, never counted") {
    const auto c = find_periodic(parabolic(), 1);
    CHECK_FALSE(c.certified);
    CHECK_FALSE(c.unresolved.empty());
    const bool near = std::any_of(c.unresolved.begin(), c.unresolved.end(),
                                  [](Interval i) { return i.lo <= 1e-6 && i.hi >= -1e-6; });
    CHECK(near);
}

TEST_CASE("almost periodic covers") {
    const auto whole = find_almost_periodic(half(), 1, 2.0);
    REQUIRE(whole.merged.size() == 1);
    CHECK(whole.merged[0].lo == -1.0);
    CHECK(whole.merged[0].hi == 1.0);

    const auto band = find_almost_periodic(half(), 1, 0.1);
    for (const auto& c : band.merged) {
        CHECK(c.lo >= -0.2 - 1e-9);
        CHECK(c.hi <= 0.2 + 1e-9);
    }
    CHECK(band.merged.front().lo <= -0.2 + 1e-9);

    // nested for nested slack
    const auto wide = find_almost_periodic(quad(), 2, 1e-2);
    const auto narrow = find_almost_periodic(quad(), 2, 1e-6);
    for (const auto& c : narrow.cells) {
        const bool inside = std::any_of(wide.merged.begin(), wide.merged.end(),
                                        [&](Interval w) { return w.lo <= c.lo && c.hi <= w.hi; });
        CHECK(inside);
    }
    const auto points = find_periodic(quad(), 2);
    for (const auto& r : points.records) {
        const bool covered = std::any_of(narrow.merged.begin(), narrow.merged.end(),
                                         [&](Interval w) { return w.lo <= r.point(0) && r.point(0) <= w.hi; });
        CHECK(covered);
    }
    for (const auto& w : narrow.merged) CHECK(w.width() < 1e-4);
}

TEST_CASE("inductive hypothesis") {
    const GrowthParams p{1.0, 1.0, 1.0};
    const auto ok = ih_check(half(), 6, p);
    CHECK(ok.status == CheckStatus::Pass);
    CHECK(ok.passed_order == 6);

    CHECK(ih_check(quad(), 0, p).status == CheckStatus::Pass);

    const auto bad = ih_check(parabolic(), 3, p);
    CHECK(bad.status == CheckStatus::Fail);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->k == 1);
    // the witness is (1, gamma_1)-almost periodic but not gamma_1-hyperbolic
    const auto g = parabolic();
    const double x = bad.witness->point;
    CHECK(std::abs(g.value_1d(x) - x) <= std::exp(-1.0));
    CHECK(std::abs(std::abs(g.derivative_1d(x)) - 1.0) < std::exp(-1.0));
    CHECK(bad.witness->box.contains(x));
}

TEST_CASE("implied constant") {
    const auto r = prop11_check(half(), 8, 1.0);
    CHECK(r.status == Prop11Status::Applicable);
    for (const auto& e : r.entries) {
        const double closed = (1.0 - std::ldexp(1.0, -e.n)) * std::ldexp(1.0, -2 * e.n);
        CHECK(std::abs(e.c_impl - closed) < 1e-12);
        CHECK(e.c_impl <= 1.0);
    }
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].c_impl < r.entries[i - 1].c_impl);

    const auto q = prop11_check(quad(), 2, 1.0);
    CHECK(q.status == Prop11Status::Applicable);
    for (const auto& e : q.entries) CHECK(std::isfinite(e.c_impl));

    CHECK(prop11_check(parabolic(), 1, 1.0).status != Prop11Status::Applicable);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(find_periodic(quad(), 0), InvalidInput);
    const PerturbedMap escaping(PolynomialMap::univariate({0.0, 2.0}));
    CHECK_THROWS_AS(find_periodic(escaping, 1), DomainError);
    CensusOptions tight;
    tight.overflow_log_guard = 1.0;
    CHECK_THROWS_AS(find_periodic(PerturbedMap(PolynomialMap::univariate({-1.0, 0.0, 1.0})), 5, tight), InvalidInput);
}

TEST_CASE("two-dimensional best effort") {
    Matrix a(2, 2);
    a << 0.5, 0.1, 0.0, 0.25;
    const PerturbedMap lin(PolynomialMap::linear(a));
    const auto c = find_periodic(lin, 1);
    CHECK_FALSE(c.certified);
    REQUIRE(c.count == 1);
    CHECK(c.records[0].point.norm() < 1e-10);
    // not normal, so gamma sits below the spectral gap 0.5
    CHECK(c.gamma_n == gamma_linear(a).gamma);
    CHECK(c.gamma_n < 0.5);
}
