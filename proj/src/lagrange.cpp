#include "hyplab/lagrange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hyplab/error.hpp"

namespace hyplab {

double PointTuple::min_gap() const {
    if (points.size() < 2) return std::numeric_limits<double>::infinity();
    std::vector<double> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
    return gap;
}

// ---------------------------------------------------------------- divided differences

double divided_difference(std::span<const HermiteNode> data, std::span<const double> pts) {
    if (pts.empty()) throw InvalidInput("divided_difference: need at least one point");
    // confluent tables need repeats adjacent; divided differences are symmetric
    std::vector<double> z(pts.begin(), pts.end());
    std::sort(z.begin(), z.end());
    for (std::size_t i = 2; i < z.size(); ++i) {
        if (z[i] == z[i - 2]) throw InvalidInput("divided_difference: a point repeats three times (needs g'')");
    }
    auto lookup = [&](double x) -> const HermiteNode& {
        for (const auto& node : data) {
            if (node.x == x) return node;
        }
        throw InvalidInput("divided_difference: no data for point " + std::to_string(x));
    };

    const std::size_t m = z.size() - 1;
    std::vector<double> table(z.size());
    for (std::size_t i = 0; i <= m; ++i) table[i] = lookup(z[i]).value;
    for (std::size_t level = 1; level <= m; ++level) {
        for (std::size_t i = 0; i + level <= m; ++i) {
            if (z[i + level] == z[i]) {
                const auto& node = lookup(z[i]);
                if (!node.derivative) throw InvalidInput("divided_difference: repeated point without derivative");
                table[i] = *node.derivative;
            } else {
                table[i] = (table[i + 1] - table[i]) / (z[i + level] - z[i]);
            }
        }
    }
    return table[0];
}

double p_km(std::span<const double> pts, int k) {
    if (pts.empty() || k < 0) throw InvalidInput("p_km: need at least one point and k >= 0");
    const int m = static_cast<int>(pts.size()) - 1;
    if (m > k) return 0.0;
    const int d = k - m;
    // complete homogeneous symmetric polynomial h_d, one variable at a time
    std::vector<double> h(static_cast<std::size_t>(d + 1), 0.0);
    h[0] = 1.0;
    for (double x : pts) {
        for (int e = 1; e <= d; ++e) h[static_cast<std::size_t>(e)] += x * h[static_cast<std::size_t>(e - 1)];
    }
    return h[static_cast<std::size_t>(d)];
}

// ---------------------------------------------------------------- Lagrange map

namespace {

std::vector<double> doubled_tuple(const PointTuple& anchor) {
    std::vector<double> z(2 * anchor.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = anchor.cyclic(j);
    return z;
}

void require_anchor(const PointTuple& anchor) {
    if (anchor.points.empty()) throw InvalidInput("lagrange: anchor tuple is empty");
}

// Newton-form value and derivative of sum_{k<count} u_k prod_{j<k}(x - z_j).
std::array<double, 2> newton_eval(std::span<const double> u, std::span<const double> z, std::size_t count, double x) {
    if (count == 0) return {0.0, 0.0};
    double p = u[count - 1];
    double dp = 0.0;
    for (std::size_t k = count - 1; k-- > 0;) {
        dp = dp * (x - z[k]) + p;
        p = p * (x - z[k]) + u[k];
    }
    return {p, dp};
}

}  // namespace

Matrix lagrange_matrix(const PointTuple& anchor) {
    require_anchor(anchor);
    const auto z = doubled_tuple(anchor);
    const int size = static_cast<int>(z.size());
    Matrix t = Matrix::Zero(size, size);
    for (int m = 0; m < size; ++m) {
        const std::span<const double> prefix(z.data(), static_cast<std::size_t>(m + 1));
        for (int k = m; k < size; ++k) t(m, k) = p_km(prefix, k);
    }
    return t;
}

LagrangeCoefficients lagrange_map(const EpsPolynomial& eps, const PointTuple& anchor) {
    require_anchor(anchor);
    if (eps.eps.size() != 2 * anchor.size()) throw InvalidInput("lagrange_map: eps must have length 2n");
    const Matrix t = lagrange_matrix(anchor);
    const Vector e = Eigen::Map<const Vector>(eps.eps.data(), static_cast<Eigen::Index>(eps.eps.size()));
    const Vector u = t.triangularView<Eigen::Upper>() * e;
    return {std::vector<double>(u.data(), u.data() + u.size()), anchor};
}

EpsPolynomial lagrange_map_inverse(const LagrangeCoefficients& u) {
    require_anchor(u.anchor);
    if (u.u.size() != 2 * u.anchor.size()) throw InvalidInput("lagrange_map_inverse: u must have length 2n");
    const Matrix t = lagrange_matrix(u.anchor);
    const int size = static_cast<int>(u.u.size());
    std::vector<double> eps(u.u.size(), 0.0);
    for (int m = size - 1; m >= 0; --m) {
        double s = u.u[static_cast<std::size_t>(m)];
        for (int k = m + 1; k < size; ++k) s -= t(m, k) * eps[static_cast<std::size_t>(k)];
        eps[static_cast<std::size_t>(m)] = s;  // unit diagonal
    }
    return {eps};
}

MultijetPoint jet_eval(const LagrangeCoefficients& u) {
    require_anchor(u.anchor);
    const std::size_t n = u.anchor.size();
    if (u.u.size() != 2 * n) throw InvalidInput("jet_eval: u must have length 2n");
    const auto z = doubled_tuple(u.anchor);
    MultijetPoint jet;
    jet.anchor = u.anchor;
    for (double x : u.anchor.points) {
        const auto [p, dp] = newton_eval(u.u, z, 2 * n, x);
        jet.values.push_back(p);
        jet.derivs.push_back(dp);
    }
    return jet;
}

LagrangeCoefficients jet_solve(const PointTuple& anchor, const MultijetPoint& target, double floor) {
    require_anchor(anchor);
    const std::size_t n = anchor.size();
    if (target.values.size() != n || target.derivs.size() != n) {
        throw InvalidInput("jet_solve: target must carry n values and n derivatives");
    }
    const auto z = doubled_tuple(anchor);
    double scale = 1.0;
    for (double x : anchor.points) scale = std::max(scale, std::abs(x));

    std::vector<double> u(2 * n, 0.0);
    auto pivot_check = [&](double log_product, std::size_t terms, const char* row) {
        const double threshold = std::log(floor) + static_cast<double>(terms) * std::log(scale);
        if (!(log_product >= threshold)) {
            throw NearDiagonalError(log_product, std::string("jet_solve: ") + row +
                                                     " pivot is a near-zero product of differences (log = " +
                                                     std::to_string(log_product) + ")");
        }
    };

    // value rows: phi(x_i) involves u_0..u_i only
    for (std::size_t i = 0; i < n; ++i) {
        const double x = anchor.points[i];
        double pivot = 1.0;
        double log_pivot = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            pivot *= (x - z[j]);
            log_pivot += std::log(std::abs(x - z[j]));
        }
        pivot_check(log_pivot, i, "value");
        const double partial = newton_eval(u, z, i, x)[0];
        u[i] = (target.values[i] - partial) / pivot;
    }
    // derivative rows: phi'(x_i) involves u_0..u_{n+i} only
    for (std::size_t i = 0; i < n; ++i) {
        const double x = anchor.points[i];
        double pivot = 1.0;
        double log_pivot = 0.0;
        for (std::size_t j = 0; j < n + i; ++j) {
            if (j == i) continue;
            pivot *= (x - z[j]);
            log_pivot += std::log(std::abs(x - z[j]));
        }
        pivot_check(log_pivot, n + i - 1, "derivative");
        const double partial = newton_eval(u, z, n + i, x)[1];
        u[n + i] = (target.derivs[i] - partial) / pivot;
    }
    return {u, anchor};
}

// ---------------------------------------------------------------- perturbations

ProductOfDistances product_of_distances(std::span<const double> traj) {
    if (traj.size() < 2) throw InvalidInput("product_of_distances: need n >= 2");
    const double last = traj.back();
    ProductOfDistances out;
    out.log_value = 0.0;
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) out.log_value += std::log(std::abs(last - traj[k]));
    out.value = std::exp(out.log_value);
    return out;
}

ClosingResult closing_perturbation(const PerturbedMap& f, const OrbitSegment& seg, double floor) {
    if (f.dim() != 1) throw InvalidInput("closing_perturbation: one-dimensional maps only");
    if (seg.length() < 2) throw InvalidInput("closing_perturbation: need an orbit x_0..x_n with n >= 1");
    const auto x = seg.points_1d();
    const std::size_t n = x.size() - 1;

    ClosingResult out;
    double product = 1.0;
    out.log_product = 0.0;
    ProductTerm term;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        product *= (x[n - 1] - x[k]);
        out.log_product += std::log(std::abs(x[n - 1] - x[k]));
        term.roots.push_back(x[k]);
        term.multiplicity.push_back(1);
    }
    const double gap = x[0] - x[n];
    if (gap == 0.0) {
        out.u = 0.0;
        out.map = f;
        return out;
    }
    if (!(out.log_product >= std::log(floor))) {
        throw RecurrenceError(out.log_product, "closing_perturbation: product of distances along the orbit is " +
                                                   std::string(product == 0.0 ? "zero" : "below the floor"));
    }
    if (std::isnormal(product)) {
        // x_0 - x_n = gap + gap_err exactly; one fma correction of the quotient
        const double bb = gap - x[0];
        const double gap_err = (x[0] - (gap - bb)) + (-x[n] - bb);
        const double q = gap / product;
        const double r = std::fma(-q, product, gap) + gap_err;
        out.u = q + r / product;
    } else {
        const double sign = (gap < 0) != (product < 0) ? -1.0 : 1.0;
        out.u = sign * std::exp(std::log(std::abs(gap)) - out.log_product);
    }
    if (!std::isfinite(out.u)) throw RecurrenceError(out.log_product, "closing_perturbation: u overflows");
    term.coeff = out.u;
    out.map = f.with_term(std::move(term));
    return out;
}

HyperbolicityPerturbation hyperbolicity_perturbation(const PerturbedMap& f, const OrbitSegment& seg, double gamma,
                                                     double margin_fraction) {
    if (f.dim() != 1) throw InvalidInput("hyperbolicity_perturbation: one-dimensional maps only");
    if (seg.length() < 1) throw InvalidInput("hyperbolicity_perturbation: empty orbit");
    if (!(gamma >= 0) || !(margin_fraction >= 0)) throw InvalidInput("hyperbolicity_perturbation: bad gamma or margin");
    const auto x = seg.points_1d();
    const std::size_t n = x.size();

    double a = 1.0;
    for (const auto& j : seg.jacobians) a *= j(0, 0);

    // (g^n)'(x_0) = a + v * b with b = prod (x_{n-1}-x_k)^2 * prod_{k<n-1} f'(x_k)
    double log_b = 0.0;
    bool negative = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d = x[n - 1] - x[k];
        const double df = seg.jacobians[k](0, 0);
        log_b += 2.0 * std::log(std::abs(d)) + std::log(std::abs(df));
        if (df < 0) negative = !negative;
    }
    if (!std::isfinite(log_b)) {
        throw CannotPerturbError(log_b, "hyperbolicity_perturbation: v multiplies a zero product");
    }

    HyperbolicityPerturbation out;
    if (std::abs(std::abs(a) - 1.0) > gamma) {
        out.v = 0.0;
        out.map = f;
        out.derivative = a;
        return out;
    }

    const double target = gamma + std::max(gamma * margin_fraction, 1e-9);
    std::vector<double> levels{1.0 + target, -(1.0 + target)};
    if (target < 1.0) {
        levels.push_back(1.0 - target);
        levels.push_back(-(1.0 - target));
    }
    const double inv_b = (negative ? -1.0 : 1.0) * std::exp(-log_b);
    bool have = false;
    for (double c : levels) {
        const double v = (c - a) * inv_b;
        if (!std::isfinite(v)) continue;
        // ties (up to rounding) go to the expanding side, then to positive v
        const double slop = 1e-12 * std::max(std::abs(v), std::abs(out.v));
        const bool tie = have && std::abs(std::abs(v) - std::abs(out.v)) <= slop;
        if (!have || (!tie && std::abs(v) < std::abs(out.v)) || (tie && std::abs(c) > std::abs(out.derivative)) ||
            (tie && std::abs(c) == std::abs(out.derivative) && v > out.v)) {
            out.v = v;
            out.derivative = c;
            have = true;
        }
    }
    if (!have) throw CannotPerturbError(log_b, "hyperbolicity_perturbation: required v overflows");

    ProductTerm term;
    term.coeff = out.v;
    term.roots.push_back(x[n - 1]);
    term.multiplicity.push_back(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        term.roots.push_back(x[k]);
        term.multiplicity.push_back(2);
    }
    out.map = f.with_term(std::move(term));
    return out;
}

MultijetPoint multijet(const PerturbedMap& f, const PointTuple& anchor) {
    if (f.dim() != 1) throw InvalidInput("multijet: one-dimensional maps only");
    MultijetPoint jet;
    jet.anchor = anchor;
    for (double x : anchor.points) {
        jet.values.push_back(f.evaluate(Vector::Constant(1, x))(0));
        jet.derivs.push_back(f.derivative_1d(x));
    }
    return jet;
}

}  // namespace hyplab
