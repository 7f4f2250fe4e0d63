#include "hyplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyplab/error.hpp"

namespace hyplab {

// ---------------------------------------------------------------- ProductTerm

double ProductTerm::value(double x) const {
    double r = coeff;
    for (std::size_t j = 0; j < roots.size(); ++j) {
        for (int p = 0; p < multiplicity[j]; ++p) r *= (x - roots[j]);
    }
    return r;
}

double ProductTerm::derivative(double x) const {
    double total = 0.0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
        double s = coeff * multiplicity[j];
        for (int p = 0; p < multiplicity[j] - 1; ++p) s *= (x - roots[j]);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (i == j) continue;
            for (int p = 0; p < multiplicity[i]; ++p) s *= (x - roots[i]);
        }
        total += s;
    }
    return total;
}

Interval ProductTerm::value(Interval x) const {
    Interval r{coeff};
    for (std::size_t j = 0; j < roots.size(); ++j) r *= pow(x - Interval{roots[j]}, multiplicity[j]);
    return r;
}

Interval ProductTerm::derivative(Interval x) const {
    Interval total{0.0};
    for (std::size_t j = 0; j < roots.size(); ++j) {
        Interval s = Interval{coeff} * Interval{double(multiplicity[j])};
        s *= pow(x - Interval{roots[j]}, multiplicity[j] - 1);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (i != j) s *= pow(x - Interval{roots[i]}, multiplicity[i]);
        }
        total += s;
    }
    return total;
}

std::vector<double> ProductTerm::expand() const {
    std::vector<double> poly{coeff};
    for (std::size_t j = 0; j < roots.size(); ++j) {
        for (int p = 0; p < multiplicity[j]; ++p) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k];
                next[k] -= roots[j] * poly[k];
            }
            poly = std::move(next);
        }
    }
    return poly;
}

// ---------------------------------------------------------------- PerturbedMap

PerturbedMap::PerturbedMap(PolynomialMap base)
    : PerturbedMap(base, PerturbationVector::zero(BrickSpec::empty(), base.dim())) {}

PerturbedMap::PerturbedMap(PolynomialMap base, PerturbationVector perturbation)
    : base_(std::move(base)), perturbation_(std::move(perturbation)) {
    if (perturbation_.dim != base_.dim()) throw InvalidInput("PerturbedMap: perturbation dimension mismatch");
    rebuild_interval_cache();
}

PerturbedMap PerturbedMap::with_term(ProductTerm term) const {
    if (dim() != 1) throw InvalidInput("with_term: factored terms are one-dimensional");
    if (term.roots.size() != term.multiplicity.size()) throw InvalidInput("with_term: roots/multiplicity mismatch");
    PerturbedMap g = *this;
    g.local_terms_.push_back(std::move(term));
    return g;
}

void PerturbedMap::rebuild_interval_cache() {
    coeffs_1d_.clear();
    dcoeffs_1d_.clear();
    if (dim() != 1) return;
    const auto& b = base_.coefficients_1d();
    const std::size_t len = std::max(b.size(), perturbation_.components.size());
    coeffs_1d_.assign(len, Interval{0.0});
    for (std::size_t k = 0; k < b.size(); ++k) coeffs_1d_[k] = Interval{b[k]};
    for (std::size_t k = 0; k < perturbation_.components.size(); ++k) {
        coeffs_1d_[k] = coeffs_1d_[k] + Interval{perturbation_.components[k].coeffs[0](0)};
    }
    for (std::size_t k = 1; k < len; ++k) dcoeffs_1d_.push_back(Interval{double(k)} * coeffs_1d_[k]);
}

Vector PerturbedMap::evaluate(const Vector& x) const {
    if (!in_domain(x)) throw DomainError("evaluate: point outside the domain ball");
    return value(x);
}

Vector PerturbedMap::value(const Vector& x) const {
    if (dim() == 1) return Vector::Constant(1, value_1d(x(0)));
    return base_.value(x) + eval_perturbation(perturbation_, x);
}

Matrix PerturbedMap::jacobian(const Vector& x) const {
    if (dim() == 1) return Matrix::Constant(1, 1, derivative_1d(x(0)));
    return base_.jacobian(x) + eval_jacobian(perturbation_, x);
}

double PerturbedMap::value_1d(double x) const {
    const Vector xv = Vector::Constant(1, x);
    double v = base_.value_1d(x) + eval_perturbation(perturbation_, xv)(0);
    for (const auto& t : local_terms_) v += t.value(x);
    return v;
}

double PerturbedMap::derivative_1d(double x) const {
    const Vector xv = Vector::Constant(1, x);
    double d = base_.derivative_1d(x) + eval_jacobian(perturbation_, xv)(0, 0);
    for (const auto& t : local_terms_) d += t.derivative(x);
    return d;
}

Interval PerturbedMap::value_1d(Interval x) const {
    Interval v = horner(coeffs_1d_, x);
    for (const auto& t : local_terms_) v += t.value(x);
    return v;
}

Interval PerturbedMap::derivative_1d(Interval x) const {
    Interval d = horner(dcoeffs_1d_, x);
    for (const auto& t : local_terms_) d += t.derivative(x);
    return d;
}

PolynomialMap PerturbedMap::as_polynomial() const {
    PolynomialMap p = add(base_, perturbation_.as_polynomial(domain_radius()));
    if (!local_terms_.empty()) {
        std::vector<double> extra;
        for (const auto& t : local_terms_) {
            const auto e = t.expand();
            if (e.size() > extra.size()) extra.resize(e.size(), 0.0);
            for (std::size_t k = 0; k < e.size(); ++k) extra[k] += e[k];
        }
        p = add(p, PolynomialMap::univariate(extra, domain_radius()));
    }
    return p;
}

// ---------------------------------------------------------------- orbits

std::vector<double> OrbitSegment::points_1d() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p(0));
    return out;
}

OrbitSegment orbit(const PerturbedMap& f, const Vector& x0, std::size_t n) {
    if (n == 0) throw InvalidInput("orbit: length must be >= 1");
    if (x0.size() != f.dim()) throw InvalidInput("orbit: dimension mismatch");
    OrbitSegment seg;
    Vector x = x0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!f.in_domain(x)) {
            throw EscapeError(j, "orbit: point " + std::to_string(j) + " left the domain");
        }
        seg.points.push_back(x);
        seg.images.push_back(f.value(x));
        seg.jacobians.push_back(f.jacobian(x));
        x = seg.images.back();
    }
    return seg;
}

OrbitSegment orbit(const PerturbedMap& f, double x0, std::size_t n) { return orbit(f, Vector::Constant(1, x0), n); }

Matrix cocycle(const OrbitSegment& seg) {
    if (seg.jacobians.empty()) throw InvalidInput("cocycle: empty orbit");
    Matrix prod = Matrix::Identity(seg.jacobians[0].rows(), seg.jacobians[0].cols());
    for (const auto& j : seg.jacobians) prod = j * prod;
    return prod;
}

OrbitSegment concatenate(const OrbitSegment& head, const OrbitSegment& tail) {
    OrbitSegment out = head;
    out.points.insert(out.points.end(), tail.points.begin(), tail.points.end());
    out.images.insert(out.images.end(), tail.images.begin(), tail.images.end());
    out.jacobians.insert(out.jacobians.end(), tail.jacobians.begin(), tail.jacobians.end());
    return out;
}

// ---------------------------------------------------------------- norms

namespace {

struct BrickDerivativeBounds {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

// |D^j phi_k(x)| <= k!/(k-j)! ||eps_k||_k |x|^{k-j}: the weighted norm is the
// Frobenius norm of the symmetric coefficient tensor.
BrickDerivativeBounds brick_bounds(const BrickSpec& brick, int dim, double radius) {
    BrickDerivativeBounds b;
    for (int k = 0; k <= brick.k_max(); ++k) {
        const double r = brick.radius(k);
        b.c0 += r * std::pow(radius, k);
        if (k >= 1) b.c1 += k * r * std::pow(radius, k - 1);
        if (k >= 2) b.c2 += k * (k - 1.0) * r * std::pow(radius, k - 2);
    }
    if (!brick.is_empty() && brick.family() != BrickSpec::Family::Custom) {
        b.c0 += tail_sum(brick, dim, brick.k_max(), 0, radius);
        b.c1 += tail_sum(brick, dim, brick.k_max(), 1, radius);
        b.c2 += tail_sum(brick, dim, brick.k_max(), 2, radius);
    }
    return b;
}

double smallest_singular_value(const Matrix& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

}  // namespace

NormBounds norm_bounds(const PolynomialMap& f, const BrickSpec& brick, double rho, int grid_points) {
    if (!(rho > 0)) throw InvalidInput("norm_bounds: rho must be positive");
    rho = std::min(rho, 1.0);
    if (grid_points < 2) throw InvalidInput("norm_bounds: need at least two grid points");
    const int dim = f.dim();
    if (!brick.is_empty() && check_admissible(brick, dim).status == Admissibility::NotAdmissible) {
        throw ConfigError("norm_bounds: brick is not admissible for dimension " + std::to_string(dim));
    }
    const double radius = f.domain_radius();
    const auto pert = brick_bounds(brick, dim, radius);

    NormBounds nb;
    nb.rho = rho;
    const double c0 = f.sup_bound() + pert.c0;
    const double c1 = f.jacobian_bound() + pert.c1;
    const double base_c2 = f.second_derivative_bound();
    nb.second_derivative = base_c2 + pert.c2;
    nb.forward_c1 = std::max(c0, c1);
    const double holder = nb.second_derivative * std::pow(2.0 * radius, 1.0 - rho);
    nb.forward_c1rho = std::max(nb.forward_c1, holder);

    // smallest singular value of df on cell centres, corrected by the Jacobian
    // Lipschitz constant over the cell and by the brick's Jacobian bound
    const int per_axis = dim == 1 ? grid_points : std::min(grid_points, 201);
    const double h = 2.0 * radius / per_axis;
    nb.certification_radius = 0.5 * h * std::sqrt(double(dim));
    double sigma = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
        Vector c(dim);
        for (int i = 0; i < dim; ++i) c(i) = -radius + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
        if (c.norm() <= radius + nb.certification_radius) sigma = std::min(sigma, smallest_singular_value(f.jacobian(c)));
        int pos = 0;
        while (pos < dim && ++idx[static_cast<std::size_t>(pos)] == per_axis) idx[static_cast<std::size_t>(pos++)] = 0;
        if (pos == dim) break;
    }
    const double sigma_low = sigma - pert.c1 - base_c2 * nb.certification_radius;
    nb.invertibility_certified = sigma_low > 0;
    nb.inverse_c1 = nb.invertibility_certified ? std::max(radius, 1.0 / sigma_low)
                                               : std::numeric_limits<double>::infinity();
    nb.m1 = std::max({nb.forward_c1, nb.inverse_c1, 1.0});
    nb.m1rho = std::max({nb.forward_c1rho, nb.m1, std::pow(2.0, 1.0 / rho)});
    return nb;
}

double forward_c1rho_constant(const PerturbedMap& f, double rho) {
    if (!(rho > 0)) throw InvalidInput("forward_c1rho_constant: rho must be positive");
    rho = std::min(rho, 1.0);
    const PolynomialMap p = f.as_polynomial();
    const double c1 = std::max(p.sup_bound(), p.jacobian_bound());
    const double holder = p.second_derivative_bound() * std::pow(2.0 * p.domain_radius(), 1.0 - rho);
    return std::max({c1, holder, std::pow(2.0, 1.0 / rho)});
}

IntoInteriorCheck check_into_interior(const PerturbedMap& f, int cells_per_axis) {
    const double radius = f.domain_radius();
    IntoInteriorCheck out;
    if (f.dim() == 1) {
        double worst = 0.0;
        const double h = 2.0 * radius / cells_per_axis;
        for (int i = 0; i < cells_per_axis; ++i) {
            const double a = -radius + i * h;
            const double b = (i + 1 == cells_per_axis) ? radius : -radius + (i + 1) * h;
            const Interval x{a, b};
            const double m = x.mid();
            Interval range = f.value_1d(x);
            Interval mv = f.value_1d(Interval{m}) + f.derivative_1d(x) * (x - Interval{m});
            Interval tight;
            if (intersect(range, mv, tight)) range = tight;
            worst = std::max(worst, range.mag());
        }
        out.margin = radius - worst;
        out.holds = worst < radius;
        return out;
    }
    // Lipschitz bound over an enlarged ball covers cells straddling the boundary
    const int per_axis = std::min(cells_per_axis, 201);
    const double h = 2.0 * radius / per_axis;
    const double cell_radius = 0.5 * h * std::sqrt(double(f.dim()));
    const PolynomialMap p = f.as_polynomial();
    const PolynomialMap enlarged(p.dim(), p.components(), radius + cell_radius);
    const double lip = enlarged.jacobian_bound();
    double worst = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(f.dim()), 0);
    for (;;) {
        Vector c(f.dim());
        for (int i = 0; i < f.dim(); ++i) c(i) = -radius + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
        if (c.norm() <= radius + cell_radius) worst = std::max(worst, f.value(c).norm() + lip * cell_radius);
        int pos = 0;
        while (pos < f.dim() && ++idx[static_cast<std::size_t>(pos)] == per_axis) idx[static_cast<std::size_t>(pos++)] = 0;
        if (pos == f.dim()) break;
    }
    out.margin = radius - worst;
    out.holds = worst < radius;
    return out;
}

}  // namespace hyplab
