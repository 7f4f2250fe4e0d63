#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hyplab/census.hpp"
#include "hyplab/dynamics.hpp"
#include "hyplab/lagrange.hpp"

namespace hyplab {

struct StageTolerances {
    int n = 0;
    double gamma_n = 0.0;       // exp(-C n^{1+delta})
    double grid_spacing = 0.0;  // N^{-1} (M^{-2n} gamma_n)^{1/rho}
    double pseudo_slack = 0.0;  // N (M + 1) grid_spacing
    double log_gamma_n = 0.0;
    double log_grid_spacing = 0.0;
    /// true when a quantity underflowed to zero; the log fields stay exact
    bool saturated = false;
};

/// `m` is the C^{1+rho} constant; values below 1 are rejected.
StageTolerances stage_tolerances(const GrowthParams& params, double m, int dim, int n);
StageTolerances stage_tolerances(const GrowthParams& params, const NormBounds& norms, int dim, int n);

struct GridTrajectory {
    std::vector<std::vector<long long>> cells;  // lattice coordinates
    std::vector<Vector> points;                 // cells * spacing
    double spacing = 0.0;
    double slack = 0.0;  // max_j |f(x_j) - x_{j+1}|

    std::size_t length() const { return points.size(); }
};

/// Lattice {k h} restricted to the domain ball.
class Lattice {
public:
    Lattice(double spacing, double radius, int dim);

    double spacing() const { return h_; }
    int dim() const { return dim_; }
    /// per-axis index range [-kmax, kmax]
    long long kmax() const { return kmax_; }
    /// 2 kmax + 1
    long long cells_per_axis() const { return 2 * kmax_ + 1; }

    /// Nearest lattice point inside the domain.
    std::vector<long long> snap(const Vector& x) const;
    Vector point(const std::vector<long long>& cell) const;
    bool inside(const std::vector<long long>& cell) const;

private:
    double h_;
    double radius_;
    int dim_;
    long long kmax_;
};

/// Rounds each orbit point to the lattice of the given spacing and records the
/// realized pseudotrajectory slack under f.
GridTrajectory snap_orbit(const PerturbedMap& f, const OrbitSegment& orbit, double spacing);

struct EnumerationResult {
    double count = 0.0;  // number of length-n grid sequences from the start cell
    bool exact = true;   // false when the budget ran out (count is then a lower bound)
    std::size_t expansions = 0;
    std::vector<std::vector<Vector>> samples;  // first paths in lexicographic order
};

struct EnumerationOptions {
    std::size_t budget = 10'000'000;  // node expansions
    std::size_t max_samples = 16;
};

/// Grid sequences x_0 = start, x_1, ..., x_{n-1} with |f(x_j) - x_{j+1}| <= slack.
EnumerationResult enumerate_pseudotrajectories(const PerturbedMap& f, double spacing, double slack,
                                               const Vector& start, int n, const EnumerationOptions& opts = {});

/// Smallest k in [1, n-1] with |x_k - x_0| < threshold.
std::optional<std::size_t> close_return(const PointTuple& traj, double threshold);
std::optional<std::size_t> close_return(const std::vector<Vector>& traj, double threshold);

enum class TrajectoryClass { Simple, Recurrent };

/// Simple iff the product of distances is at least `floor`.
TrajectoryClass classify_simple(const PointTuple& traj, double floor);

}  // namespace hyplab
