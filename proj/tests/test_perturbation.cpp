#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyplab/error.hpp"
#include "hyplab/perturbation.hpp"
#include "hyplab/polynomial.hpp"

using namespace hyplab;

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// stars and bars count of monomials of degree k in N variables, times N
std::uint64_t count_nu(int k, int dim) {
    std::uint64_t total = 0;
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    // enumerate all exponent vectors with entries <= k and keep those of degree k
    for (;;) {
        if (std::accumulate(e.begin(), e.end(), 0) == k) ++total;
        int pos = 0;
        while (pos < dim && ++e[static_cast<std::size_t>(pos)] > k) e[static_cast<std::size_t>(pos++)] = 0;
        if (pos == dim) break;
    }
    return total * static_cast<std::uint64_t>(dim);
}

}  // namespace

TEST_CASE("multi-indices and nu") {
    for (int dim = 1; dim <= 3; ++dim) {
        for (int k = 0; k <= 6; ++k) {
            CHECK(nu(k, dim) == count_nu(k, dim));
            CHECK(multi_indices(k, dim).size() * static_cast<std::size_t>(dim) == count_nu(k, dim));
        }
    }
    CHECK(multinomial(MultiIndex{{2, 1}}) == 3.0);
}

TEST_CASE("weighted inner product") {
    HomogeneousComponent a = HomogeneousComponent::zero(2, 2);
    HomogeneousComponent b = HomogeneousComponent::zero(2, 2);
    a.coeffs[0](0) = 1.0;
    b.coeffs[1](0) = 1.0;
    CHECK(weighted_inner(a, b) == 0.0);
    // x1 x2 has weight 1/2
    HomogeneousComponent c = HomogeneousComponent::zero(2, 2);
    const auto& idx = c.indices;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i].exponents == std::vector<int>{1, 1}) c.coeffs[i](1) = 2.0;
    }
    CHECK(std::abs(weighted_norm(c) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("admissibility") {
    CHECK(check_admissible(BrickSpec::factorial(0.1, 10)).status == Admissibility::Admissible);
    CHECK(check_admissible(BrickSpec::geometric(0.1, 0.5, 10)).status == Admissibility::Admissible);
    CHECK(check_admissible(BrickSpec::custom({0.1, 0.01})).status == Admissibility::FinitePrefixOnly);
    CHECK(check_admissible(BrickSpec::geometric(0.1, 0.8, 10), 2).status == Admissibility::NotAdmissible);
}

TEST_CASE("tail bounds") {
    double ref = 0.0;
    for (int k = 21; k < 60; ++k) ref += 1.0 / factorial(k);
    const double t = tail_bound(BrickSpec::factorial(0.1, 20), 1, 20);
    CHECK(t >= 0.1 * ref * (1 - 1e-12));
    CHECK(t < 0.1 * 1e-18);
    CHECK(tail_bound(BrickSpec::custom({0.1, 0.01}), 1, 1) == 0.0);
    CHECK_THROWS_AS(tail_bound(BrickSpec::geometric(0.1, 1.0, 5), 1, 5), InvalidInput);
}

TEST_CASE("evaluation") {
    const auto zero = PerturbationVector::zero(BrickSpec::factorial(0.1, 3), 2);
    CHECK(eval_perturbation(zero, Vector::Constant(2, 0.3)).norm() == 0.0);

    auto lin = PerturbationVector::zero(BrickSpec::factorial(1.0, 1), 1);
    lin.components[1].coeffs[0](0) = 0.7;
    CHECK(eval_perturbation(lin, Vector::Constant(1, 0.5))(0) == 0.35);

    auto cross = PerturbationVector::zero(BrickSpec::factorial(1.0, 2), 2);
    for (std::size_t i = 0; i < cross.components[2].indices.size(); ++i) {
        if (cross.components[2].indices[i].exponents == std::vector<int>{1, 1}) cross.components[2].coeffs[i](0) = 1.0;
    }
    Vector x(2);
    x << 0.5, 0.4;
    const Vector y = eval_perturbation(cross, x);
    CHECK(std::abs(y(0) - 0.2) < 1e-15);
    CHECK(y(1) == 0.0);
    const Matrix j = eval_jacobian(cross, x);
    CHECK(std::abs(j(0, 0) - 0.4) < 1e-15);
    CHECK(std::abs(j(0, 1) - 0.5) < 1e-15);
}

TEST_CASE("sampling membership, moments and uniform interval") {
    const BrickSpec brick = BrickSpec::factorial(1.0, 3);
    const int samples = 10000;
    double mean = 0.0;
    std::vector<double> e0;
    for (int s = 0; s < samples; ++s) {
        const auto eps = sample(brick, 1, 42, static_cast<std::uint64_t>(s));
        CHECK(eps.in_brick());
        const double v = eps.components[0].coeffs[0](0);
        mean += v;
        e0.push_back(v);
    }
    mean /= samples;
    // uniform on [-1, 1]: variance r^2 / (nu + 2) = 1/3
    CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 / 3.0 / samples));
    std::sort(e0.begin(), e0.end());
    double d = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double f = (e0[static_cast<std::size_t>(i)] + 1.0) / 2.0;
        d = std::max({d, std::abs(f - static_cast<double>(i) / samples), std::abs(static_cast<double>(i + 1) / samples - f)});
    }
    CHECK(d < 1.6276 / std::sqrt(static_cast<double>(samples)));
}

TEST_CASE("sampling is a pure function of (seed, trial)") {
    const BrickSpec brick = BrickSpec::geometric(0.2, 0.5, 5);
    const auto a = sample(brick, 2, 9, 3);
    const auto b = sample(brick, 2, 9, 3);
    const auto c = sample(brick, 2, 9, 4);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a) != to_json(c));
    CHECK(substream_seed(9, 3) != substream_seed(9, 4));
}

TEST_CASE("json round trip") {
    const auto eps = sample(BrickSpec::factorial(0.3, 4), 2, 1, 0);
    const auto back = perturbation_from_json(nlohmann::json::parse(to_json(eps).dump()));
    CHECK(to_json(back) == to_json(eps));
    for (const auto& b : {BrickSpec::factorial(0.1, 3), BrickSpec::geometric(0.1, 0.5, 3), BrickSpec::custom({0.5}),
                          BrickSpec::empty()}) {
        CHECK(to_json(brick_from_json(to_json(b))) == to_json(b));
    }
    CHECK_THROWS_AS(brick_from_json(nlohmann::json{{"family", "nope"}}), ConfigError);
}

TEST_CASE("polynomial maps") {
    const auto f = PolynomialMap::univariate({1.0, -2.0, 0.5}, 2.0);
    CHECK(f.value_1d(2.0) == 1.0 - 4.0 + 2.0);
    CHECK(f.derivative_1d(2.0) == -2.0 + 2.0);
    CHECK(f.in_domain(Vector::Constant(1, -2.0)));
    CHECK_FALSE(f.in_domain(Vector::Constant(1, 2.5)));
    CHECK(f.sup_bound() >= 5.0);
    const auto sum = add(f, PolynomialMap::univariate({0.0, 2.0}, 2.0));
    CHECK(sum.coefficients_1d()[1] == 0.0);
    CHECK_THROWS_AS(PolynomialMap::univariate({1.0}, -1.0), InvalidInput);
}
