#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyplab/polynomial.hpp"

namespace hyplab {

/// Degree-k block of a vector polynomial: one N-vector coefficient per |alpha| = k.
struct HomogeneousComponent {
    int degree = 0;
    int dim = 1;
    std::vector<MultiIndex> indices;  // multi_indices(degree, dim)
    std::vector<Vector> coeffs;       // parallel to indices

    static HomogeneousComponent zero(int degree, int dim);

    /// number of real coordinates, nu(degree, dim)
    std::size_t size() const { return indices.size() * static_cast<std::size_t>(dim); }
};

/// <a, b>_k = sum over |alpha| = k of multinomial(k, alpha)^{-1} <a_alpha, b_alpha>.
/// Invariant under orthogonal changes of variables.
double weighted_inner(const HomogeneousComponent& a, const HomogeneousComponent& b);
double weighted_norm(const HomogeneousComponent& a);

/// dim W_{k,N} = N * binomial(k+N-1, N-1)
std::uint64_t nu(int k, int dim);

/// Radii r_0 >= r_1 >= ... >= r_{K_max} > 0 of a truncated Hilbert brick.
class BrickSpec {
public:
    enum class Family { Factorial, Geometric, Custom };

    static BrickSpec factorial(double tau, int k_max);
    static BrickSpec geometric(double tau, double q, int k_max);
    static BrickSpec custom(std::vector<double> radii);
    /// A brick with no coordinates at all (the unperturbed map).
    static BrickSpec empty();

    Family family() const { return family_; }
    double tau() const { return tau_; }
    double ratio() const { return q_; }
    int k_max() const { return static_cast<int>(sizes_.size()) - 1; }
    const std::vector<double>& sizes() const { return sizes_; }
    double radius(int k) const;
    bool is_empty() const { return sizes_.empty(); }

    /// r_k for any k, from the closed form; custom lists give 0 past their end.
    double closed_form_radius(int k) const;

    std::string family_name() const;

private:
    Family family_ = Family::Custom;
    double tau_ = 0.0;
    double q_ = 0.0;
    std::vector<double> sizes_;
};

enum class Admissibility { Admissible, FinitePrefixOnly, NotAdmissible };

struct AdmissibilityReport {
    Admissibility status = Admissibility::NotAdmissible;
    /// condition A proxy: sum_k r_k N^{k/2} converges
    bool analytic_sum_converges = false;
    std::string certificate;
};

AdmissibilityReport check_admissible(const BrickSpec& brick, int dim = 1);

/// Rigorous sup bound over the ball of radius `radius` of the dropped tail
/// sum_{k > k_max} phi_k, where |phi_k| <= r_k N^{k/2} sqrt(N) radius^k.
/// `derivative_order` j in {0,1,2} multiplies term k by k!/(k-j)! and
/// radius^{k-j} instead, bounding the j-th derivative of the tail.
/// Throws InvalidInput for divergent families.
double tail_sum(const BrickSpec& brick, int dim, int k_max, int derivative_order = 0, double radius = 1.0);

/// sum_{k > k_max} r_k N^{k/2} sqrt(N) on the unit ball.
double tail_bound(const BrickSpec& brick, int dim, int k_max);

/// A point of the truncated brick: components for k = 0..K_max.
struct PerturbationVector {
    int dim = 1;
    std::vector<HomogeneousComponent> components;
    BrickSpec brick = BrickSpec::empty();
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trial;

    static PerturbationVector zero(const BrickSpec& brick, int dim);

    int k_max() const { return static_cast<int>(components.size()) - 1; }
    bool in_brick() const;

    /// The perturbation as an ordinary polynomial map on the given domain.
    PolynomialMap as_polynomial(double domain_radius = 1.0) const;
};

/// Uniform sample from the product of balls ||eps_k||_k <= r_k.
/// The draw depends only on (seed, trial).
PerturbationVector sample(const BrickSpec& brick, int dim, std::uint64_t seed, std::uint64_t trial = 0);

Vector eval_perturbation(const PerturbationVector& eps, const Vector& x);
Matrix eval_jacobian(const PerturbationVector& eps, const Vector& x);

/// Seed of the independent substream for (seed, trial).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial);

nlohmann::json to_json(const BrickSpec& brick);
BrickSpec brick_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PerturbationVector& eps);
PerturbationVector perturbation_from_json(const nlohmann::json& j);

}  // namespace hyplab
