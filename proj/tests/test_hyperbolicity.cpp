#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "hyplab/error.hpp"
#include "hyplab/hyperbolicity.hpp"

using namespace hyplab;

namespace {

// brute force: dense phase grid, smallest singular value from the eigenvalues of M^* M
double dense_grid_gamma(const Matrix& l, int points) {
    double best = INFINITY;
    for (int i = 0; i < points; ++i) {
        const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * i / points);
        Eigen::MatrixXcd m = l.cast<std::complex<double>>();
        m.diagonal().array() -= z;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m);
        best = std::min(best, std::sqrt(std::max(0.0, es.eigenvalues().minCoeff())));
    }
    return best;
}

Matrix diag(std::initializer_list<double> d) {
    Vector v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return v.asDiagonal();
}

}  // namespace

TEST_CASE("identity and scaled identity") {
    CHECK(std::abs(gamma_linear(Matrix::Identity(2, 2)).gamma) < 1e-10);
    CHECK(std::abs(gamma_linear(2.0 * Matrix::Identity(2, 2)).gamma - 1.0) < 1e-10);
}

TEST_CASE("diag(3, 1/2) against the dense grid") {
    const Matrix l = diag({3.0, 0.5});
    const double g = gamma_linear(l).gamma;
    CHECK(std::abs(g - 0.5) < 1e-10);
    CHECK(std::abs(g - dense_grid_gamma(l, 20000)) < 1e-6);
}

TEST_CASE("rotation has gamma equal to the modulus gap") {
    // eigenvalues 1.3 e^{+-i theta}
    const double t = 0.7;
    Matrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const auto g = gamma_linear(1.3 * r);
    CHECK(std::abs(g.gamma - 0.3) < 1e-9);
    const double phase = std::min(std::abs(g.argmin_phase - t / (2 * std::numbers::pi)),
                                  std::abs(g.argmin_phase - (1.0 - t / (2 * std::numbers::pi))));
    CHECK(phase < 1e-6);
}

TEST_CASE("non-normal matrices agree with the dense grid") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 3;
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = n01(rng);
        }
        const auto g = gamma_linear(a);
        const double brute = dense_grid_gamma(a, 4000);
        // the refined value can only undercut the grid, and never by more than the bracket
        CHECK(g.gamma <= brute + 1e-12);
        CHECK(g.gamma >= brute - 2 * std::numbers::pi / 4000);
        CHECK(g.lower_bound() <= g.gamma);
    }
}

TEST_CASE("one-dimensional closed form") {
    CHECK(gamma_linear(Matrix::Constant(1, 1, -2.5)).gamma == 1.5);
    CHECK(gamma_linear(Matrix::Constant(1, 1, -2.5)).argmin_phase == 0.5);
    CHECK(gamma_linear(Matrix::Constant(1, 1, 0.25)).gamma == 0.75);
}

TEST_CASE("is_gamma_hyperbolic") {
    CHECK(is_gamma_hyperbolic(2.0 * Matrix::Identity(2, 2), 0.5));
    CHECK_FALSE(is_gamma_hyperbolic(Matrix::Identity(2, 2), 0.1));
    CHECK_FALSE(is_gamma_hyperbolic(diag({3.0, 0.5}), 0.6));
    CHECK_THROWS_AS(is_gamma_hyperbolic(Matrix::Identity(2, 2), -1.0), InvalidInput);
}

TEST_CASE("orbit hyperbolicity") {
    const PerturbedMap quad(PolynomialMap::univariate({-1.0, 0.0, 1.0}));
    const double xs = (1.0 - std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(orbit_hyperbolicity(quad, Vector::Constant(1, xs), 1).gamma - (std::abs(2 * xs) - 1)) < 1e-12);

    const PerturbedMap lin(PolynomialMap::linear(diag({0.5, 1.0 / 3.0})));
    CHECK(std::abs(orbit_hyperbolicity(lin, Vector::Zero(2), 3).gamma - 0.875) < 1e-9);

    const PerturbedMap id(PolynomialMap::identity(2));
    CHECK(orbit_hyperbolicity(id, Vector::Constant(2, 0.1), 4).gamma < 1e-10);
}

TEST_CASE("invalid input") {
    CHECK_THROWS_AS(gamma_linear(Matrix(2, 3)), InvalidInput);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = NAN;
    CHECK_THROWS_AS(gamma_linear(bad), InvalidInput);
    CHECK_THROWS_AS(gamma_linear(Matrix::Identity(2, 2), GammaOptions{4, 1e-10}), InvalidInput);
}
