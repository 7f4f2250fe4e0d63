#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "hyplab/interval.hpp"

namespace hyplab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Exponent vector alpha = (alpha_1, ..., alpha_N) of the monomial x^alpha.
struct MultiIndex {
    std::vector<int> exponents;

    int dim() const { return static_cast<int>(exponents.size()); }
    int degree() const;
    bool operator==(const MultiIndex&) const = default;
};

/// All alpha with |alpha| = k in `dim` variables, graded-lex order
/// (first exponent descending). There are binomial(k+dim-1, dim-1) of them.
std::vector<MultiIndex> multi_indices(int k, int dim);

/// k! / (alpha_1! ... alpha_N!)
double multinomial(const MultiIndex& alpha);

double binomial(int n, int k);

/// x^alpha
double monomial(const MultiIndex& alpha, const Vector& x);

/// A polynomial self-map of the closed ball of radius `domain_radius` in R^N.
///
/// Each output component is a sparse list of (multi-index, coefficient)
/// terms. In one dimension the map also keeps a dense coefficient vector
/// for Horner evaluation.
class PolynomialMap {
public:
    struct Term {
        MultiIndex alpha;
        double coeff = 0.0;
    };

    PolynomialMap() = default;
    PolynomialMap(int dim, std::vector<std::vector<Term>> components, double domain_radius = 1.0);

    /// 1-D map x -> sum_k coeffs[k] x^k.
    static PolynomialMap univariate(std::vector<double> coeffs, double domain_radius = 1.0);
    static PolynomialMap identity(int dim, double domain_radius = 1.0);
    static PolynomialMap linear(const Matrix& a, double domain_radius = 1.0);

    int dim() const { return dim_; }
    double domain_radius() const { return radius_; }
    int degree() const { return degree_; }
    const std::vector<std::vector<Term>>& components() const { return components_; }

    /// Dense coefficients of the single component; 1-D maps only.
    const std::vector<double>& coefficients_1d() const;

    bool in_domain(const Vector& x) const;

    /// Evaluates without checking the domain.
    Vector value(const Vector& x) const;
    Matrix jacobian(const Vector& x) const;

    double value_1d(double x) const;
    double derivative_1d(double x) const;

    /// Sup bounds over the domain ball, from coefficient magnitudes
    /// (|x^alpha| <= R^|alpha| on the ball of radius R).
    double sup_bound() const;
    double jacobian_bound() const;
    double second_derivative_bound() const;

private:
    int dim_ = 0;
    double radius_ = 1.0;
    int degree_ = 0;
    std::vector<std::vector<Term>> components_;
    std::vector<double> dense_;
};

/// Coefficient-wise sum. Both maps must share dimension; the domain of `a` is kept.
PolynomialMap add(const PolynomialMap& a, const PolynomialMap& b);

}  // namespace hyplab
