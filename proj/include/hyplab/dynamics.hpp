#pragma once

#include <cstddef>
#include <vector>

#include "hyplab/interval.hpp"
#include "hyplab/perturbation.hpp"
#include "hyplab/polynomial.hpp"

namespace hyplab {

/// c * prod_j (x - roots[j])^{multiplicity[j]} on the line.
///
/// Kept in factored form so that the term vanishes exactly (in floating
/// point) at its roots, and its derivative vanishes exactly at roots of
/// multiplicity two or more.
struct ProductTerm {
    double coeff = 0.0;
    std::vector<double> roots;
    std::vector<int> multiplicity;

    double value(double x) const;
    double derivative(double x) const;
    Interval value(Interval x) const;
    Interval derivative(Interval x) const;
    /// Monomial coefficients, lowest degree first.
    std::vector<double> expand() const;
};

/// f_eps = f + phi_eps (+ factored local terms in 1-D).
class PerturbedMap {
public:
    PerturbedMap() = default;
    explicit PerturbedMap(PolynomialMap base);
    PerturbedMap(PolynomialMap base, PerturbationVector perturbation);

    const PolynomialMap& base() const { return base_; }
    const PerturbationVector& perturbation() const { return perturbation_; }
    const std::vector<ProductTerm>& local_terms() const { return local_terms_; }

    int dim() const { return base_.dim(); }
    double domain_radius() const { return base_.domain_radius(); }
    bool in_domain(const Vector& x) const { return base_.in_domain(x); }

    /// A copy with an extra factored term; 1-D only.
    PerturbedMap with_term(ProductTerm term) const;

    /// Domain-checked evaluation; throws DomainError outside the domain ball.
    Vector evaluate(const Vector& x) const;

    Vector value(const Vector& x) const;
    Matrix jacobian(const Vector& x) const;

    double value_1d(double x) const;
    double derivative_1d(double x) const;
    Interval value_1d(Interval x) const;
    Interval derivative_1d(Interval x) const;

    /// Everything expanded into one polynomial map (local terms included).
    PolynomialMap as_polynomial() const;

private:
    void rebuild_interval_cache();

    PolynomialMap base_;
    PerturbationVector perturbation_ = PerturbationVector::zero(BrickSpec::empty(), 1);
    std::vector<ProductTerm> local_terms_;
    std::vector<Interval> coeffs_1d_;
    std::vector<Interval> dcoeffs_1d_;
};

/// Points x_0..x_{n-1} with their images and Jacobians.
struct OrbitSegment {
    std::vector<Vector> points;
    std::vector<Vector> images;
    std::vector<Matrix> jacobians;

    std::size_t length() const { return points.size(); }
    std::vector<double> points_1d() const;
};

/// Iterates n steps from x0. Throws EscapeError carrying the first index whose
/// point is outside the domain.
OrbitSegment orbit(const PerturbedMap& f, const Vector& x0, std::size_t n);
OrbitSegment orbit(const PerturbedMap& f, double x0, std::size_t n);

/// jacobians[n-1] * ... * jacobians[0]
Matrix cocycle(const OrbitSegment& orbit);

/// Concatenation of two segments; `tail` must start where `head` ends.
OrbitSegment concatenate(const OrbitSegment& head, const OrbitSegment& tail);

struct NormBounds {
    double m1 = 1.0;            // max of forward and inverse C^1 bounds
    double m1rho = 2.0;         // max(C^{1+rho} bound, m1, 2^{1/rho})
    double rho = 1.0;
    double forward_c1 = 0.0;    // sup over the brick of ||f_eps||_{C^1}
    double forward_c1rho = 0.0; // sup over the brick of ||f_eps||_{C^{1+rho}}
    double second_derivative = 0.0;
    double inverse_c1 = 1.0;    // +inf when invertibility could not be certified
    double certification_radius = 0.0;
    bool invertibility_certified = false;
};

/// Coefficient-certified norm bounds over every map f + phi_eps with eps in the
/// (truncated) brick, plus the brick tail. `grid_points` per axis controls the
/// inverse-derivative certification grid.
NormBounds norm_bounds(const PolynomialMap& f, const BrickSpec& brick, double rho, int grid_points = 2001);

/// The proposition's constant max(||f||_{C^{1+rho}}, 2^{1/rho}) for one map.
double forward_c1rho_constant(const PerturbedMap& f, double rho);

struct IntoInteriorCheck {
    bool holds = false;
    /// R minus the certified bound on sup |f(x)| (positive when it holds)
    double margin = 0.0;
};

/// Certifies that f maps its closed domain ball into the open ball.
IntoInteriorCheck check_into_interior(const PerturbedMap& f, int cells_per_axis = 512);

}  // namespace hyplab
