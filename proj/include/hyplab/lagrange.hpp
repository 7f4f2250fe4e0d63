#pragma once

// One-dimensional Lagrange-interpolation perturbation kernel.
//
// A degree-(2n-1) polynomial phi(x) = sum_k eps_k x^k is rewritten in the
// Newton basis built on the doubled tuple z_j = x_{j mod n}, j = 0..2n-1:
//
//     phi(x) = sum_k u_k prod_{j<k} (x - z_j).
//
// The u are the divided differences of phi on z_0..z_m. The change of
// coordinates eps -> u is upper triangular with unit diagonal, and the
// values and first derivatives of phi on the tuple are recovered from u
// one coordinate at a time.

#include <optional>
#include <span>
#include <vector>

#include "hyplab/dynamics.hpp"

namespace hyplab {

struct PointTuple {
    std::vector<double> points;

    std::size_t size() const { return points.size(); }
    /// min over i != j of |x_i - x_j|; +inf for a single point
    double min_gap() const;
    /// z_j = x_{j mod n}
    double cyclic(std::size_t j) const { return points[j % points.size()]; }
};

/// Value (and optionally derivative) of g at one node.
struct HermiteNode {
    double x = 0.0;
    double value = 0.0;
    std::optional<double> derivative;
};

/// Delta^m g(pts[0], ..., pts[m]) with confluent entries g'(x) where a point
/// repeats. Points are matched to `data` by exact equality; each may repeat at
/// most twice.
double divided_difference(std::span<const HermiteNode> data, std::span<const double> pts);

/// Sum of all degree-(k-m) monomials in pts[0..m] with unit coefficients;
/// zero for m > k.
double p_km(std::span<const double> pts, int k);

struct EpsPolynomial {
    std::vector<double> eps;  // monomial coefficients, length 2n
};

struct LagrangeCoefficients {
    std::vector<double> u;  // length 2n
    PointTuple anchor;
};

struct MultijetPoint {
    PointTuple anchor;
    std::vector<double> values;
    std::vector<double> derivs;
};

/// The 2n x 2n upper-triangular matrix T with u = T eps.
Matrix lagrange_matrix(const PointTuple& anchor);

LagrangeCoefficients lagrange_map(const EpsPolynomial& eps, const PointTuple& anchor);
EpsPolynomial lagrange_map_inverse(const LagrangeCoefficients& u);

/// Values and derivatives of sum_k u_k prod_{j<k}(x - z_j) at every anchor point.
MultijetPoint jet_eval(const LagrangeCoefficients& u);

/// Smallest |product of differences| jet_solve divides by.
inline constexpr double kDefaultSolvabilityFloor = 1e-250;

/// Inverse of jet_eval away from the diagonal. Throws NearDiagonalError when a
/// pivot product is below `floor` (scaled by the anchor magnitude).
LagrangeCoefficients jet_solve(const PointTuple& anchor, const MultijetPoint& target,
                               double floor = kDefaultSolvabilityFloor);

struct ClosingResult {
    double u = 0.0;
    PerturbedMap map;
    double log_product = 0.0;  // log of prod_{k<n-1} |x_{n-1} - x_k|
};

/// Given the orbit x_0..x_n (length n+1) of f, the map
/// g(x) = f(x) + u prod_{k=0}^{n-2} (x - x_k) has x_0 as a period-n point.
/// Throws RecurrenceError when the product of distances is zero or below `floor`.
ClosingResult closing_perturbation(const PerturbedMap& f, const OrbitSegment& orbit, double floor = 1e-300);

struct HyperbolicityPerturbation {
    double v = 0.0;
    PerturbedMap map;
    /// (g^n)'(x_0) predicted by the affine relation
    double derivative = 0.0;
};

/// Given the orbit x_0..x_{n-1} of f, returns the smallest-|v| map
/// g(x) = f(x) + v (x - x_{n-1}) prod_{k=0}^{n-2} (x - x_k)^2 with
/// ||(g^n)'(x_0)| - 1| >= gamma (1 + margin_fraction), or v = 0 when the orbit
/// already has ||(f^n)'(x_0)| - 1| > gamma. Throws CannotPerturbError when v
/// multiplies a zero product, including orbits that need no change.
HyperbolicityPerturbation hyperbolicity_perturbation(const PerturbedMap& f, const OrbitSegment& orbit, double gamma,
                                                     double margin_fraction = 0.1);

/// Values f(x_j) and derivatives f'(x_j) on the anchor.
MultijetPoint multijet(const PerturbedMap& f, const PointTuple& anchor);

struct ProductOfDistances {
    double value = 0.0;
    double log_value = 0.0;  // -inf when value is exactly zero
};

/// prod_{k=0}^{n-2} |x_{n-1} - x_k|
ProductOfDistances product_of_distances(std::span<const double> traj);

}  // namespace hyplab
