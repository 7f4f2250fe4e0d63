#include "hyplab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "hyplab/error.hpp"

namespace hyplab {

int MultiIndex::degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

namespace {

void fill_indices(int remaining, int pos, std::vector<int>& current, std::vector<MultiIndex>& out) {
    const int dim = static_cast<int>(current.size());
    if (pos == dim - 1) {
        current[pos] = remaining;
        out.push_back({current});
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        current[pos] = e;
        fill_indices(remaining - e, pos + 1, current, out);
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int k, int dim) {
    if (k < 0 || dim < 1) throw InvalidInput("multi_indices: need k >= 0 and dim >= 1");
    std::vector<MultiIndex> out;
    std::vector<int> current(static_cast<std::size_t>(dim), 0);
    fill_indices(k, 0, current, out);
    return out;
}

double multinomial(const MultiIndex& alpha) {
    // product of binomials keeps intermediate values small
    double r = 1.0;
    int partial = 0;
    for (int e : alpha.exponents) {
        partial += e;
        r *= binomial(partial, e);
    }
    return r;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r < 9e15 ? std::round(r) : r;
}

double monomial(const MultiIndex& alpha, const Vector& x) {
    double r = 1.0;
    for (int j = 0; j < alpha.dim(); ++j) {
        for (int p = 0; p < alpha.exponents[static_cast<std::size_t>(j)]; ++p) r *= x(j);
    }
    return r;
}

PolynomialMap::PolynomialMap(int dim, std::vector<std::vector<Term>> components, double domain_radius)
    : dim_(dim), radius_(domain_radius), components_(std::move(components)) {
    if (dim_ < 1) throw InvalidInput("PolynomialMap: dim must be >= 1");
    if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw InvalidInput("PolynomialMap: domain radius must be positive");
    if (static_cast<int>(components_.size()) != dim_) {
        throw InvalidInput("PolynomialMap: expected " + std::to_string(dim_) + " components");
    }
    for (auto& comp : components_) {
        // merge repeated monomials so coefficient norms are not overstated
        std::map<std::vector<int>, double> merged;
        for (const auto& t : comp) {
            if (t.alpha.dim() != dim_) throw InvalidInput("PolynomialMap: multi-index dimension mismatch");
            if (!std::isfinite(t.coeff)) throw InvalidInput("PolynomialMap: non-finite coefficient");
            for (int e : t.alpha.exponents) {
                if (e < 0) throw InvalidInput("PolynomialMap: negative exponent");
            }
            merged[t.alpha.exponents] += t.coeff;
        }
        comp.clear();
        for (const auto& [exps, c] : merged) {
            if (c == 0.0) continue;
            MultiIndex a{exps};
            degree_ = std::max(degree_, a.degree());
            comp.push_back({std::move(a), c});
        }
    }
    if (dim_ == 1) {
        dense_.assign(static_cast<std::size_t>(degree_ + 1), 0.0);
        for (const auto& t : components_[0]) dense_[static_cast<std::size_t>(t.alpha.exponents[0])] = t.coeff;
    }
}

PolynomialMap PolynomialMap::univariate(std::vector<double> coeffs, double domain_radius) {
    std::vector<Term> terms;
    for (std::size_t k = 0; k < coeffs.size(); ++k) terms.push_back({MultiIndex{{static_cast<int>(k)}}, coeffs[k]});
    return PolynomialMap(1, {std::move(terms)}, domain_radius);
}

PolynomialMap PolynomialMap::identity(int dim, double domain_radius) {
    return linear(Matrix::Identity(dim, dim), domain_radius);
}

PolynomialMap PolynomialMap::linear(const Matrix& a, double domain_radius) {
    if (a.rows() != a.cols()) throw InvalidInput("PolynomialMap::linear: matrix must be square");
    const int dim = static_cast<int>(a.rows());
    std::vector<std::vector<Term>> comps(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            MultiIndex e{std::vector<int>(static_cast<std::size_t>(dim), 0)};
            e.exponents[static_cast<std::size_t>(j)] = 1;
            comps[static_cast<std::size_t>(i)].push_back({e, a(i, j)});
        }
    }
    return PolynomialMap(dim, std::move(comps), domain_radius);
}

const std::vector<double>& PolynomialMap::coefficients_1d() const {
    if (dim_ != 1) throw InvalidInput("coefficients_1d: map is not one-dimensional");
    return dense_;
}

bool PolynomialMap::in_domain(const Vector& x) const {
    if (x.size() != dim_) return false;
    if (!x.allFinite()) return false;
    if (dim_ == 1) return std::abs(x(0)) <= radius_;
    return x.norm() <= radius_;
}

double PolynomialMap::value_1d(double x) const {
    const auto& c = coefficients_1d();
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double PolynomialMap::derivative_1d(double x) const {
    const auto& c = coefficients_1d();
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
    return acc;
}

Vector PolynomialMap::value(const Vector& x) const {
    if (x.size() != dim_) throw InvalidInput("PolynomialMap::value: dimension mismatch");
    if (dim_ == 1) return Vector::Constant(1, value_1d(x(0)));
    Vector out = Vector::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
        for (const auto& t : components_[static_cast<std::size_t>(i)]) out(i) += t.coeff * monomial(t.alpha, x);
    }
    return out;
}

Matrix PolynomialMap::jacobian(const Vector& x) const {
    if (x.size() != dim_) throw InvalidInput("PolynomialMap::jacobian: dimension mismatch");
    if (dim_ == 1) return Matrix::Constant(1, 1, derivative_1d(x(0)));
    Matrix jac = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
        for (const auto& t : components_[static_cast<std::size_t>(i)]) {
            for (int j = 0; j < dim_; ++j) {
                const int e = t.alpha.exponents[static_cast<std::size_t>(j)];
                if (e == 0) continue;
                MultiIndex lowered = t.alpha;
                lowered.exponents[static_cast<std::size_t>(j)] -= 1;
                jac(i, j) += t.coeff * e * monomial(lowered, x);
            }
        }
    }
    return jac;
}

double PolynomialMap::sup_bound() const {
    double total = 0.0;
    for (const auto& comp : components_) {
        double s = 0.0;
        for (const auto& t : comp) s += std::abs(t.coeff) * std::pow(radius_, t.alpha.degree());
        total += s * s;
    }
    return std::sqrt(total);
}

double PolynomialMap::jacobian_bound() const {
    // Frobenius norm of entrywise sup bounds dominates the operator norm
    double total = 0.0;
    for (const auto& comp : components_) {
        for (int j = 0; j < dim_; ++j) {
            double s = 0.0;
            for (const auto& t : comp) {
                const int e = t.alpha.exponents[static_cast<std::size_t>(j)];
                if (e > 0) s += std::abs(t.coeff) * e * std::pow(radius_, t.alpha.degree() - 1);
            }
            total += s * s;
        }
    }
    return std::sqrt(total);
}

double PolynomialMap::second_derivative_bound() const {
    double total = 0.0;
    for (const auto& comp : components_) {
        for (int j = 0; j < dim_; ++j) {
            for (int l = 0; l < dim_; ++l) {
                double s = 0.0;
                for (const auto& t : comp) {
                    const int ej = t.alpha.exponents[static_cast<std::size_t>(j)];
                    const int el = t.alpha.exponents[static_cast<std::size_t>(l)];
                    const double factor = (j == l) ? double(ej) * (ej - 1) : double(ej) * el;
                    if (factor > 0) s += std::abs(t.coeff) * factor * std::pow(radius_, t.alpha.degree() - 2);
                }
                total += s * s;
            }
        }
    }
    return std::sqrt(total);
}

PolynomialMap add(const PolynomialMap& a, const PolynomialMap& b) {
    if (a.dim() != b.dim()) throw InvalidInput("add: dimension mismatch");
    auto comps = a.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto& extra = b.components()[i];
        comps[i].insert(comps[i].end(), extra.begin(), extra.end());
    }
    return PolynomialMap(a.dim(), std::move(comps), a.domain_radius());
}

}  // namespace hyplab
