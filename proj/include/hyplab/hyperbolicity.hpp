#pragma once

#include "hyplab/dynamics.hpp"
#include "hyplab/polynomial.hpp"

namespace hyplab {

/// gamma(L) = inf over phi in [0,1) of the smallest singular value of
/// L - exp(2 pi i phi) I.
struct HyperbolicityValue {
    double gamma = 0.0;          // attained value, an upper bound on gamma(L)
    double argmin_phase = 0.0;   // phi in [0,1) where it is attained
    /// gamma(L) >= gamma - certified_tolerance (grid Lipschitz bracket)
    double certified_tolerance = 0.0;

    double lower_bound() const { return gamma > certified_tolerance ? gamma - certified_tolerance : 0.0; }
};

struct GammaOptions {
    int phase_grid = 256;
    double refine_tol = 1e-10;
};

/// sigma_min(L - exp(2 pi i phi) I)
double phase_singular_value(const Matrix& l, double phase);

/// Minimises the phase profile on a uniform grid, then refines each competitive
/// grid minimum by golden-section search until the attained value is within
/// refine_tol of the local minimum. N = 1 uses the closed form ||lambda| - 1|.
HyperbolicityValue gamma_linear(const Matrix& l, const GammaOptions& opts = {});

/// True iff the refined gamma(L) is at least `gamma`.
bool is_gamma_hyperbolic(const Matrix& l, double gamma, const GammaOptions& opts = {});

/// gamma(df^n(x_0)) for the orbit's cocycle.
HyperbolicityValue orbit_hyperbolicity(const OrbitSegment& orbit, const GammaOptions& opts = {});
HyperbolicityValue orbit_hyperbolicity(const PerturbedMap& f, const Vector& x0, std::size_t n,
                                       const GammaOptions& opts = {});

}  // namespace hyplab
