#include "hyplab/gridlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

using Cell = std::vector<long long>;

// Largest magnitude at which lattice indices stay exact as doubles.
constexpr double kMaxIndex = 4.0e15;

double safe_exp(double v, bool& saturated) {
    const double e = std::exp(v);
    if (!(e > 0) || !std::isfinite(e)) saturated = true;
    return e;
}

}  // namespace

StageTolerances stage_tolerances(const GrowthParams& raw, double m, int dim, int n) {
    if (n < 1) throw InvalidInput("stage_tolerances: n must be >= 1");
    if (dim < 1) throw InvalidInput("stage_tolerances: dim must be >= 1");
    if (!(m >= 1.0) || !std::isfinite(m)) throw InvalidInput("stage_tolerances: M must be finite and >= 1");
    const GrowthParams p = raw.normalized();
    StageTolerances s;
    s.n = n;
    s.log_gamma_n = p.log_gamma(n);
    s.log_grid_spacing = -std::log(static_cast<double>(dim)) + (s.log_gamma_n - 2.0 * n * std::log(m)) / p.rho;
    s.gamma_n = safe_exp(s.log_gamma_n, s.saturated);
    s.grid_spacing = safe_exp(s.log_grid_spacing, s.saturated);
    s.pseudo_slack =
        safe_exp(std::log(static_cast<double>(dim)) + std::log(m + 1.0) + s.log_grid_spacing, s.saturated);
    return s;
}

StageTolerances stage_tolerances(const GrowthParams& params, const NormBounds& norms, int dim, int n) {
    return stage_tolerances(params, norms.m1rho, dim, n);
}

Lattice::Lattice(double spacing, double radius, int dim) : h_(spacing), radius_(radius), dim_(dim) {
    if (!(spacing > 0) || !std::isfinite(spacing)) throw InvalidInput("Lattice: spacing must be positive");
    if (!(radius > 0)) throw InvalidInput("Lattice: radius must be positive");
    if (dim < 1) throw InvalidInput("Lattice: dim must be >= 1");
    const double k = std::floor(radius / spacing);
    if (k > kMaxIndex) throw InvalidInput("Lattice: spacing too small for exact lattice indices");
    kmax_ = static_cast<long long>(k);
    while (kmax_ > 0 && static_cast<double>(kmax_) * h_ > radius_) --kmax_;
}

Vector Lattice::point(const Cell& cell) const {
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = static_cast<double>(cell[static_cast<std::size_t>(i)]) * h_;
    return x;
}

bool Lattice::inside(const Cell& cell) const {
    for (long long c : cell) {
        if (c < -kmax_ || c > kmax_) return false;
    }
    return dim_ == 1 || point(cell).norm() <= radius_;
}

Cell Lattice::snap(const Vector& x) const {
    Cell c(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        const double k = std::clamp(std::nearbyint(x(i) / h_), static_cast<double>(-kmax_), static_cast<double>(kmax_));
        c[static_cast<std::size_t>(i)] = static_cast<long long>(k);
    }
    // pull back into the ball along the largest coordinate
    while (!inside(c)) {
        auto it = std::max_element(c.begin(), c.end(), [](long long a, long long b) { return std::llabs(a) < std::llabs(b); });
        *it += *it > 0 ? -1 : 1;
    }
    return c;
}

GridTrajectory snap_orbit(const PerturbedMap& f, const OrbitSegment& orbit, double spacing) {
    const Lattice lattice(spacing, f.domain_radius(), f.dim());
    GridTrajectory t;
    t.spacing = spacing;
    for (const auto& x : orbit.points) {
        t.cells.push_back(lattice.snap(x));
        t.points.push_back(lattice.point(t.cells.back()));
    }
    for (std::size_t j = 0; j + 1 < t.points.size(); ++j) {
        t.slack = std::max(t.slack, (f.value(t.points[j]) - t.points[j + 1]).norm());
    }
    return t;
}

namespace {

// Lattice cells c inside the domain with |y - c h| <= slack, lexicographic.
std::vector<Cell> successors(const Lattice& lattice, const Vector& y, double slack) {
    const int dim = lattice.dim();
    const double h = lattice.spacing();
    const double km = static_cast<double>(lattice.kmax());
    Cell lo(static_cast<std::size_t>(dim)), hi(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        const double a = std::max(-km, std::ceil((y(i) - slack) / h) - 1.0);
        const double b = std::min(km, std::floor((y(i) + slack) / h) + 1.0);
        if (a > b) return {};
        lo[static_cast<std::size_t>(i)] = static_cast<long long>(a);
        hi[static_cast<std::size_t>(i)] = static_cast<long long>(b);
    }
    std::vector<Cell> out;
    Cell c = lo;
    for (;;) {
        if (lattice.inside(c) && (lattice.point(c) - y).norm() <= slack) out.push_back(c);
        int pos = dim - 1;
        while (pos >= 0 && c[static_cast<std::size_t>(pos)] == hi[static_cast<std::size_t>(pos)]) {
            c[static_cast<std::size_t>(pos)] = lo[static_cast<std::size_t>(pos)];
            --pos;
        }
        if (pos < 0) break;
        ++c[static_cast<std::size_t>(pos)];
    }
    return out;
}

struct PathSearch {
    const PerturbedMap& f;
    const Lattice& lattice;
    double slack;
    int n;
    std::size_t max_samples;
    std::size_t budget;
    bool counting;  // keep going after max_samples paths
    std::size_t expansions = 0;
    double complete = 0.0;
    std::vector<std::vector<Vector>> samples;
    std::vector<Vector> path;

    // returns false once the budget is exhausted
    bool visit(const Cell& cell) {
        path.push_back(lattice.point(cell));
        bool ok = true;
        if (static_cast<int>(path.size()) == n) {
            complete += 1.0;
            if (samples.size() < max_samples) samples.push_back(path);
            if (!counting && samples.size() >= max_samples) ok = false;
        } else if (expansions++ >= budget) {
            ok = false;
        } else {
            for (const auto& next : successors(lattice, f.value(path.back()), slack)) {
                if (!visit(next)) {
                    ok = false;
                    break;
                }
            }
        }
        path.pop_back();
        return ok;
    }
};

}  // namespace

EnumerationResult enumerate_pseudotrajectories(const PerturbedMap& f, double spacing, double slack,
                                               const Vector& start, int n, const EnumerationOptions& opts) {
    if (n < 1) throw InvalidInput("enumerate_pseudotrajectories: n must be >= 1");
    if (!(slack >= 0)) throw InvalidInput("enumerate_pseudotrajectories: slack must be nonnegative");
    if (start.size() != f.dim()) throw InvalidInput("enumerate_pseudotrajectories: start has the wrong dimension");
    const Lattice lattice(spacing, f.domain_radius(), f.dim());
    const Cell start_cell = lattice.snap(start);

    EnumerationResult res;
    // counts per level, keyed by cell so the merge order is fixed
    std::map<Cell, double> level{{start_cell, 1.0}};
    for (int j = 1; j < n && res.exact; ++j) {
        std::map<Cell, double> next;
        for (const auto& [cell, mult] : level) {
            if (res.expansions++ >= opts.budget) {
                res.exact = false;
                break;
            }
            for (auto& s : successors(lattice, f.value(lattice.point(cell)), slack)) next[std::move(s)] += mult;
        }
        level = std::move(next);
    }

    if (res.exact) {
        for (const auto& [cell, mult] : level) res.count += mult;
        if (res.count >= 9007199254740992.0) res.exact = false;
    }

    // samples, and on budget exhaustion a lower bound from fully expanded paths
    PathSearch search{f, lattice, slack, n, opts.max_samples, opts.budget, !res.exact, 0, 0.0, {}, {}};
    search.visit(start_cell);
    res.samples = std::move(search.samples);
    if (!res.exact && res.count < search.complete) res.count = search.complete;
    return res;
}

}  // namespace hyplab

namespace hyplab {

std::optional<std::size_t> close_return(const PointTuple& traj, double threshold) {
    if (traj.size() < 2) throw InvalidInput("close_return: need at least two points");
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (std::abs(traj.points[k] - traj.points[0]) < threshold) return k;
    }
    return std::nullopt;
}

std::optional<std::size_t> close_return(const std::vector<Vector>& traj, double threshold) {
    if (traj.size() < 2) throw InvalidInput("close_return: need at least two points");
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if ((traj[k] - traj[0]).norm() < threshold) return k;
    }
    return std::nullopt;
}

TrajectoryClass classify_simple(const PointTuple& traj, double floor) {
    if (traj.size() < 2) throw InvalidInput("classify_simple: need at least two points");
    if (!(floor >= 0)) throw InvalidInput("classify_simple: floor must be nonnegative");
    if (floor == 0.0) return TrajectoryClass::Simple;
    const auto prod = product_of_distances(traj.points);
    return prod.log_value >= std::log(floor) ? TrajectoryClass::Simple : TrajectoryClass::Recurrent;
}

}  // namespace hyplab
