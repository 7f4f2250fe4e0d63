#include "hyplab/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct IterEnclosure {
    Interval value;  // f^n(X)
    Interval deriv;  // (f^n)'(X)
};

// Iterates of a 1-D map on an interval. Iterates are clipped to the domain,
// which is sound because the census first certifies f(domain) within domain.
class IntervalIterator {
public:
    IntervalIterator(const PerturbedMap& f, int n) : f_(f), n_(n), domain_{-f.domain_radius(), f.domain_radius()} {}

    IterEnclosure run(Interval x, int steps) const {
        Interval y = x;
        Interval d{1.0};
        for (int i = 0; i < steps; ++i) {
            d = d * f_.derivative_1d(y);
            Interval next = f_.value_1d(y);
            Interval clipped;
            y = intersect(next, domain_, clipped) ? clipped : next;
        }
        return {y, d};
    }
    IterEnclosure run(Interval x) const { return run(x, n_); }

    /// enclosure of g(x) = f^n(x) - x at a point
    Interval g_point(double x) const { return run(Interval{x}).value - Interval{x}; }

    /// enclosure of g over X, natural form intersected with the mean-value form
    Interval g_cell(Interval x, const IterEnclosure& e) const {
        const Interval natural = e.value - x;
        const double m = x.mid();
        const Interval mv = g_point(m) + (e.deriv - Interval{1.0}) * (x - Interval{m});
        Interval out;
        return intersect(natural, mv, out) ? out : mv;
    }

    int n() const { return n_; }

private:
    const PerturbedMap& f_;
    int n_;
    Interval domain_;
};

bool exact_zero(Interval g) { return g.lo == 0.0 && g.hi == 0.0; }

double distance_to_one(Interval d) {
    const Interval a = abs(d);
    if (a.contains(1.0)) return 0.0;
    return a.hi < 1.0 ? 1.0 - a.hi : a.lo - 1.0;
}

double point_iterate(const PerturbedMap& f, double x, int steps, double* deriv = nullptr) {
    double d = 1.0;
    for (int i = 0; i < steps; ++i) {
        d *= f.derivative_1d(x);
        x = f.value_1d(x);
    }
    if (deriv) *deriv = d;
    return x;
}

void check_preconditions(const PerturbedMap& f, int n, const CensusOptions& opts) {
    if (n < 1) throw InvalidInput("census: period must be >= 1");
    const double lip = std::max(1.0, f.as_polynomial().jacobian_bound());
    if (n * std::log(lip) > opts.overflow_log_guard) {
        throw InvalidInput("census: n log M_1 exceeds the overflow guard");
    }
    const auto into = check_into_interior(f);
    if (into.margin < 0) throw DomainError("census: the map does not send the domain into itself");
}

PeriodicPointRecord make_record(const PerturbedMap& f, int n, Interval enclosure, double point,
                                const IntervalIterator& it, const CensusOptions& opts) {
    PeriodicPointRecord rec;
    rec.enclosure = {enclosure};
    rec.period = n;
    rec.point = Vector::Constant(1, point);
    double d = 1.0;
    point_iterate(f, point, n, &d);
    rec.gamma = gamma_linear(Matrix::Constant(1, 1, d), opts.gamma);
    rec.gamma_lower = distance_to_one(it.run(enclosure).deriv);
    rec.is_least_period = true;
    for (int p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        if (std::abs(point_iterate(f, point, p) - point) <= 1e-9 * (1.0 + std::abs(point))) {
            rec.is_least_period = false;
            break;
        }
    }
    return rec;
}

// Narrow a cell holding exactly one root (g monotone, opposite strict signs at
// the ends) by interval Newton, falling back to bisection.
Interval refine_root(const IntervalIterator& it, Interval x, bool increasing, double tol) {
    for (int iter = 0; iter < 400 && x.width() > tol; ++iter) {
        const double m = x.mid();
        if (m <= x.lo || m >= x.hi) break;
        const Interval gm = it.g_point(m);
        if (exact_zero(gm)) return Interval{m};
        const Interval dg = it.run(x).deriv - Interval{1.0};
        Interval next = x;
        if (!dg.contains(0.0)) {
            const Interval newton = Interval{m} - divide(gm, dg);
            Interval cut;
            if (intersect(x, newton, cut)) next = cut;
        }
        if (next.width() > 0.5 * x.width()) {
            if (gm.contains(0.0)) {
                x = next;
                break;
            }
            const bool root_left = (gm.lo > 0) == increasing;
            next = root_left ? Interval{next.lo, std::min(m, next.hi)} : Interval{std::max(m, next.lo), next.hi};
        }
        if (next.width() >= x.width()) break;
        x = next;
    }
    return x;
}

double choose_split(const IntervalIterator& it, Interval x) {
    static constexpr double kOffsets[] = {0.0, 0.0917, -0.1373, 0.2113, -0.2711};
    for (double off : kOffsets) {
        const double c = x.mid() + off * x.width();
        if (c <= x.lo || c >= x.hi) continue;
        const Interval g = it.g_point(c);
        if (!g.contains(0.0) || exact_zero(g)) return c;
    }
    return x.mid();
}

CensusResult census_1d(const PerturbedMap& f, int n, const CensusOptions& opts) {
    check_preconditions(f, n, opts);
    const double radius = f.domain_radius();
    const IntervalIterator it(f, n);

    CensusResult res;
    res.n = n;
    res.certified = true;
    std::set<double> edge_roots;
    std::vector<Interval> interior_roots;
    std::vector<Interval> stack{{-radius, radius}};

    auto give_up = [&](Interval cell) {
        res.unresolved.push_back(cell);
        res.certified = false;
    };
    auto split = [&](Interval cell) {
        const double c = choose_split(it, cell);
        stack.push_back({c, cell.hi});
        stack.push_back({cell.lo, c});
    };

    while (!stack.empty()) {
        const Interval cell = stack.back();
        stack.pop_back();
        if (++res.cells_processed > opts.max_cells) {
            give_up(cell);
            continue;
        }
        const IterEnclosure e = it.run(cell);
        const Interval g = it.g_cell(cell, e);
        if (!g.contains(0.0)) continue;

        const Interval ga = it.g_point(cell.lo);
        const Interval gb = it.g_point(cell.hi);
        if (exact_zero(ga)) edge_roots.insert(cell.lo);
        if (exact_zero(gb)) edge_roots.insert(cell.hi);

        const Interval dg = e.deriv - Interval{1.0};
        const bool can_split = cell.width() > opts.min_width;
        if (dg.contains(0.0)) {
            if (can_split) split(cell);
            else give_up(cell);
            continue;
        }
        const bool a_definite = !ga.contains(0.0);
        const bool b_definite = !gb.contains(0.0);
        if (a_definite && b_definite) {
            if ((ga.lo > 0) != (gb.lo > 0)) interior_roots.push_back(refine_root(it, cell, dg.lo > 0, opts.tol));
            continue;
        }
        // monotone with a root sitting exactly on an end: nothing else inside
        if ((a_definite || exact_zero(ga)) && (b_definite || exact_zero(gb))) continue;
        if (can_split) split(cell);
        else give_up(cell);
    }

    for (double x : edge_roots) res.records.push_back(make_record(f, n, Interval{x}, x, it, opts));
    for (const Interval& x : interior_roots) res.records.push_back(make_record(f, n, x, x.mid(), it, opts));
    std::sort(res.records.begin(), res.records.end(),
              [](const PeriodicPointRecord& a, const PeriodicPointRecord& b) { return a.point(0) < b.point(0); });
    std::sort(res.unresolved.begin(), res.unresolved.end(), [](Interval a, Interval b) { return a.lo < b.lo; });
    res.count = res.records.size();
    res.gamma_n = kInf;
    for (const auto& r : res.records) res.gamma_n = std::min(res.gamma_n, r.gamma.gamma);
    return res;
}

CensusResult census_nd(const PerturbedMap& f, int n, const CensusOptions& opts) {
    if (n < 1) throw InvalidInput("census: period must be >= 1");
    const int dim = f.dim();
    const double radius = f.domain_radius();
    CensusResult res;
    res.n = n;
    res.certified = false;

    auto iterate = [&](const Vector& x, Matrix& jac) {
        Vector y = x;
        jac = Matrix::Identity(dim, dim);
        for (int i = 0; i < n; ++i) {
            jac = f.jacobian(y) * jac;
            y = f.value(y);
            if (!y.allFinite() || y.norm() > 1e6 * radius) return Vector(Vector::Constant(dim, kInf));
        }
        return y;
    };

    std::vector<Vector> found;
    const int per_axis = std::max(2, opts.seeds_per_axis);
    const double h = 2.0 * radius / per_axis;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
        Vector x(dim);
        for (int i = 0; i < dim; ++i) x(i) = -radius + (idx[static_cast<std::size_t>(i)] + 0.5) * h;
        ++res.cells_processed;
        if (x.norm() <= radius) {
            Matrix jac;
            bool ok = false;
            for (int it = 0; it < opts.newton_iterations; ++it) {
                const Vector y = iterate(x, jac);
                if (!y.allFinite()) break;
                const Vector g = y - x;
                if (g.norm() <= 1e-13 * (1.0 + x.norm())) {
                    ok = true;
                    break;
                }
                const Matrix dg = jac - Matrix::Identity(dim, dim);
                const Vector step = dg.fullPivLu().solve(g);
                if (!step.allFinite()) break;
                x -= step;
                if (x.norm() > 2.0 * radius) break;
            }
            if (ok && f.in_domain(x)) {
                const bool dup = std::any_of(found.begin(), found.end(),
                                             [&](const Vector& p) { return (p - x).norm() <= opts.dedupe_radius; });
                if (!dup) found.push_back(x);
            }
        }
        int pos = 0;
        while (pos < dim && ++idx[static_cast<std::size_t>(pos)] == per_axis) idx[static_cast<std::size_t>(pos++)] = 0;
        if (pos == dim) break;
    }
    std::sort(found.begin(), found.end(), [](const Vector& a, const Vector& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    for (const auto& x : found) {
        PeriodicPointRecord rec;
        rec.period = n;
        rec.point = x;
        for (int i = 0; i < dim; ++i) rec.enclosure.push_back({x(i) - opts.dedupe_radius, x(i) + opts.dedupe_radius});
        Matrix jac;
        iterate(x, jac);
        rec.gamma = gamma_linear(jac, opts.gamma);
        rec.gamma_lower = rec.gamma.lower_bound();
        for (int p = 1; p < n; ++p) {
            if (n % p != 0) continue;
            Vector y = x;
            for (int i = 0; i < p; ++i) y = f.value(y);
            if ((y - x).norm() <= 1e-9 * (1.0 + x.norm())) {
                rec.is_least_period = false;
                break;
            }
        }
        res.records.push_back(std::move(rec));
    }
    res.count = res.records.size();
    res.gamma_n = kInf;
    for (const auto& r : res.records) res.gamma_n = std::min(res.gamma_n, r.gamma.gamma);
    return res;
}

}  // namespace

CensusResult find_periodic(const PerturbedMap& f, int n, const CensusOptions& opts) {
    return f.dim() == 1 ? census_1d(f, n, opts) : census_nd(f, n, opts);
}

GammaN gamma_n_of_map(const PerturbedMap& f, int n, const CensusOptions& opts) {
    const auto c = find_periodic(f, n, opts);
    return {c.gamma_n, c.certified};
}

AlmostPeriodicCover find_almost_periodic(const PerturbedMap& f, int n, double gamma, const CensusOptions& opts) {
    if (f.dim() != 1) throw InvalidInput("find_almost_periodic: one-dimensional maps only");
    if (!(gamma > 0)) throw InvalidInput("find_almost_periodic: gamma must be positive");
    check_preconditions(f, n, opts);
    const IntervalIterator it(f, n);
    const Interval band{-gamma, gamma};
    const double radius = f.domain_radius();

    AlmostPeriodicCover cover;
    std::vector<Interval> stack{{-radius, radius}};
    std::size_t processed = 0;
    while (!stack.empty()) {
        const Interval cell = stack.back();
        stack.pop_back();
        if (++processed > opts.max_cells) {
            cover.complete = false;
            cover.cells.push_back(cell);
            continue;
        }
        const Interval g = it.g_cell(cell, it.run(cell));
        Interval overlap;
        if (!intersect(g, band, overlap)) continue;
        if (band.lo <= g.lo && g.hi <= band.hi) {
            cover.cells.push_back(cell);
            continue;
        }
        if (cell.width() > opts.min_width) {
            const double m = cell.mid();
            stack.push_back({m, cell.hi});
            stack.push_back({cell.lo, m});
        } else {
            cover.cells.push_back(cell);
        }
    }
    std::sort(cover.cells.begin(), cover.cells.end(), [](Interval a, Interval b) { return a.lo < b.lo; });
    for (const auto& c : cover.cells) {
        if (!cover.merged.empty() && cover.merged.back().hi >= c.lo) {
            cover.merged.back().hi = std::max(cover.merged.back().hi, c.hi);
        } else {
            cover.merged.push_back(c);
        }
    }
    return cover;
}

// ---------------------------------------------------------------- growth / IH

GrowthParams GrowthParams::normalized() const {
    if (!(C > 0) || !(delta > 0) || !(rho > 0)) throw InvalidInput("GrowthParams: C, delta, rho must be positive");
    GrowthParams p = *this;
    p.rho = std::min(rho, 1.0);
    return p;
}

double GrowthParams::log_gamma(int k) const { return -C * std::pow(static_cast<double>(k), 1.0 + delta); }

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::string to_string(Prop11Status s) {
    switch (s) {
        case Prop11Status::Applicable: return "applicable";
        case Prop11Status::Inapplicable: return "inapplicable";
        case Prop11Status::Uncertified: return "uncertified";
    }
    return "uncertified";
}

IHResult ih_check(const PerturbedMap& f, int n, const GrowthParams& raw_params, const CensusOptions& opts) {
    if (f.dim() != 1) throw InvalidInput("ih_check: one-dimensional maps only");
    if (n < 0) throw InvalidInput("ih_check: order must be >= 0");
    const GrowthParams params = raw_params.normalized();
    IHResult res;
    for (int k = 1; k <= n; ++k) {
        const double log_gamma = params.log_gamma(k);
        const double gamma_k = std::exp(log_gamma);
        const double slack = std::exp(log_gamma / params.rho);
        if (!(gamma_k > 0) || !(slack > 0)) {
            res.status = CheckStatus::Indeterminate;
            res.detail = "gamma_k underflows at k = " + std::to_string(k);
            return res;
        }
        const auto cover = find_almost_periodic(f, k, slack, opts);
        const IntervalIterator it(f, k);
        const Interval band{-slack, slack};
        bool undecided = !cover.complete;
        std::size_t budget = opts.max_cells;

        std::vector<Interval> stack(cover.cells.rbegin(), cover.cells.rend());
        while (!stack.empty()) {
            const Interval cell = stack.back();
            stack.pop_back();
            const IterEnclosure e = it.run(cell);
            Interval overlap;
            if (!intersect(it.g_cell(cell, e), band, overlap)) continue;
            if (distance_to_one(e.deriv) >= gamma_k) continue;
            const double m = cell.mid();
            double d = 1.0;
            const double residual = std::abs(point_iterate(f, m, k, &d) - m);
            const double hyp = std::abs(std::abs(d) - 1.0);
            if (residual <= slack && hyp < gamma_k) {
                res.status = CheckStatus::Fail;
                res.witness = IHWitness{k, cell, m, residual, hyp, gamma_k};
                res.detail = "almost periodic point of order " + std::to_string(k) + " is not hyperbolic enough";
                return res;
            }
            if (cell.width() > opts.min_width && budget-- > 0) {
                stack.push_back({m, cell.hi});
                stack.push_back({cell.lo, m});
            } else {
                undecided = true;
            }
        }
        if (undecided) {
            res.status = CheckStatus::Indeterminate;
            res.detail = "order " + std::to_string(k) + " could not be decided at the subdivision limit";
            return res;
        }
        res.passed_order = k;
    }
    res.status = CheckStatus::Pass;
    return res;
}

// ---------------------------------------------------------------- implied constant check

double implied_constant(std::size_t count, double gamma_n, double m1rho, int n, int dim, double rho) {
    if (count == 0) return 0.0;
    if (!(gamma_n > 0)) return kInf;
    if (std::isinf(gamma_n)) return kInf;
    const double log_c = std::log(static_cast<double>(count)) -
                         n * dim * (1.0 + rho) / rho * std::log(m1rho) + dim / rho * std::log(gamma_n);
    return std::exp(log_c);
}

Prop11Report prop11_check(const PerturbedMap& f, int n_max, double rho, const CensusOptions& opts) {
    if (n_max < 1) throw InvalidInput("prop11_check: n_max must be >= 1");
    if (!(rho > 0)) throw InvalidInput("prop11_check: rho must be positive");
    Prop11Report rep;
    rep.rho = std::min(rho, 1.0);
    rep.m1rho = forward_c1rho_constant(f, rep.rho);
    double running = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto census = find_periodic(f, n, opts);
        Prop11Entry e;
        e.n = n;
        e.count = census.count;
        e.gamma_n = census.gamma_n;
        if (!census.certified && rep.status == Prop11Status::Applicable) {
            rep.status = Prop11Status::Uncertified;
            rep.detail = "census for n = " + std::to_string(n) + " is not certified";
        }
        for (const auto& r : census.records) {
            if (r.gamma_lower <= 0.0 || r.gamma.gamma <= 0.0) {
                rep.status = Prop11Status::Inapplicable;
                rep.detail = "non-hyperbolic periodic point near x = " + std::to_string(r.point(0)) +
                             " (n = " + std::to_string(n) + ")";
                break;
            }
        }
        e.c_impl = implied_constant(census.count, census.gamma_n, rep.m1rho, n, f.dim(), rep.rho);
        if (rep.status == Prop11Status::Inapplicable) e.c_impl = kInf;
        running = std::max(running, e.c_impl);
        e.running_max = running;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace hyplab
