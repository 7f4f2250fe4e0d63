#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hyplab/dynamics.hpp"
#include "hyplab/hyperbolicity.hpp"
#include "hyplab/interval.hpp"

namespace hyplab {

struct CensusOptions {
    double tol = 1e-12;                 // target enclosure width of each periodic point
    double min_width = 1e-10;           // cells narrower than this are not split further
    std::size_t max_cells = 4'000'000;  // subdivision budget
    double overflow_log_guard = 600.0;  // reject n log M_1 beyond this
    GammaOptions gamma;
    // best-effort search for N >= 2
    int seeds_per_axis = 41;
    int newton_iterations = 60;
    double dedupe_radius = 1e-7;
};

struct PeriodicPointRecord {
    std::vector<Interval> enclosure;  // one interval per coordinate
    int period = 0;
    Vector point;
    HyperbolicityValue gamma;
    /// lower bound on gamma_n over the whole enclosure (1-D); 0 when it cannot
    /// exclude a non-hyperbolic point
    double gamma_lower = 0.0;
    bool is_least_period = true;
};

struct CensusResult {
    int n = 0;
    std::size_t count = 0;
    std::vector<PeriodicPointRecord> records;  // sorted by first coordinate
    /// min over records; +inf when there are no records
    double gamma_n = 0.0;
    bool certified = false;
    std::vector<Interval> unresolved;  // 1-D cells that could not be decided
    std::size_t cells_processed = 0;
};

/// All solutions of f^n(x) = x in the domain.
///
/// In 1-D the interval [-R, R] is subdivided; cells whose enclosure of
/// g = f^n - id excludes zero are dropped, cells where g is certifiably
/// monotone with a sign change hold exactly one root, which interval Newton
/// narrows to `tol`. Cells that stay undecided down to `min_width` (tangential
/// zeros, roots on cell edges) are reported and clear `certified`.
/// For N >= 2 the search is seeded Newton with deduplication, never certified.
CensusResult find_periodic(const PerturbedMap& f, int n, const CensusOptions& opts = {});

struct GammaN {
    double value = 0.0;
    bool certified = false;
};

/// gamma_n(f) = min over period-n points of gamma(df^n); +inf when there are none.
GammaN gamma_n_of_map(const PerturbedMap& f, int n, const CensusOptions& opts = {});

struct AlmostPeriodicCover {
    std::vector<Interval> cells;   // dyadic cells, left to right
    std::vector<Interval> merged;  // unions of adjacent cells
    bool complete = true;          // false when the budget ran out
};

/// Cover of {x : |f^n(x) - x| <= gamma} by intervals (1-D).
AlmostPeriodicCover find_almost_periodic(const PerturbedMap& f, int n, double gamma, const CensusOptions& opts = {});

struct GrowthParams {
    double C = 1.0;
    double delta = 1.0;
    double rho = 1.0;

    /// rho values above 1 are replaced by 1
    GrowthParams normalized() const;
    /// log gamma_k(C, delta) = -C k^{1+delta}
    double log_gamma(int k) const;
};

enum class CheckStatus { Pass, Fail, Indeterminate };

std::string to_string(CheckStatus s);

struct IHWitness {
    int k = 0;
    Interval box;
    double point = 0.0;
    double residual = 0.0;      // |f^k(x) - x| at the point
    double hyperbolicity = 0.0; // ||(f^k)'(x)| - 1| at the point
    double tolerance = 0.0;     // gamma_k(C, delta)
};

struct IHResult {
    CheckStatus status = CheckStatus::Pass;
    int passed_order = 0;  // largest k such that orders 1..k all passed
    std::optional<IHWitness> witness;
    std::string detail;
};

/// Inductive hypothesis of order n: for every k <= n, every
/// (k, gamma_k^{1/rho})-periodic point is (k, gamma_k)-hyperbolic (1-D).
IHResult ih_check(const PerturbedMap& f, int n, const GrowthParams& params, const CensusOptions& opts = {});

enum class Prop11Status { Applicable, Inapplicable, Uncertified };

std::string to_string(Prop11Status s);

struct Prop11Entry {
    int n = 0;
    std::size_t count = 0;
    double gamma_n = 0.0;
    double c_impl = 0.0;       // P_n M^{-nN(1+rho)/rho} gamma_n^{N/rho}
    double running_max = 0.0;
};

struct Prop11Report {
    Prop11Status status = Prop11Status::Applicable;
    double m1rho = 0.0;
    double rho = 1.0;
    std::vector<Prop11Entry> entries;
    std::string detail;
};

/// Implied constant of the periodic-point / hyperbolicity bound for n = 1..n_max.
Prop11Report prop11_check(const PerturbedMap& f, int n_max, double rho, const CensusOptions& opts = {});

/// C_impl for given counts; exposed for the closed-form checks.
double implied_constant(std::size_t count, double gamma_n, double m1rho, int n, int dim, double rho);

}  // namespace hyplab
