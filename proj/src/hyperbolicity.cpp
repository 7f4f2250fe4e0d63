#include "hyplab/hyperbolicity.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void validate(const Matrix& l) {
    if (l.rows() != l.cols() || l.rows() < 1) throw InvalidInput("gamma_linear: matrix must be square and non-empty");
    if (!l.allFinite()) throw InvalidInput("gamma_linear: matrix has non-finite entries");
}

double wrap_phase(double phi) {
    phi -= std::floor(phi);
    return phi >= 1.0 ? 0.0 : phi;
}

}  // namespace

double phase_singular_value(const Matrix& l, double phase) {
    const std::complex<double> z = std::polar(1.0, kTwoPi * phase);
    Eigen::MatrixXcd m = l.cast<std::complex<double>>();
    m.diagonal().array() -= z;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues().minCoeff();
}

HyperbolicityValue gamma_linear(const Matrix& l, const GammaOptions& opts) {
    validate(l);
    if (opts.phase_grid < 8) throw InvalidInput("gamma_linear: phase_grid must be >= 8");
    if (!(opts.refine_tol > 0)) throw InvalidInput("gamma_linear: refine_tol must be positive");

    HyperbolicityValue out;
    if (l.rows() == 1) {
        const double lambda = l(0, 0);
        out.gamma = std::abs(std::abs(lambda) - 1.0);
        out.argmin_phase = lambda >= 0 ? 0.0 : 0.5;
        return out;
    }

    const int grid = opts.phase_grid;
    const double h = 1.0 / grid;
    std::vector<double> profile(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) profile[static_cast<std::size_t>(i)] = phase_singular_value(l, i * h);

    int best = 0;
    for (int i = 1; i < grid; ++i) {
        if (profile[static_cast<std::size_t>(i)] < profile[static_cast<std::size_t>(best)]) best = i;
    }
    const double grid_min = profile[static_cast<std::size_t>(best)];
    out.gamma = grid_min;
    out.argmin_phase = best * h;
    // phi -> sigma_min is 2 pi-Lipschitz; every phase lies within h/2 of the grid
    out.certified_tolerance = std::numbers::pi * h;

    // golden-section search on [phi_i - h, phi_i + h] around each grid local
    // minimum that could still undercut the best value
    const double phase_tol = opts.refine_tol / kTwoPi;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < grid; ++i) {
        const double v = profile[static_cast<std::size_t>(i)];
        const double left = profile[static_cast<std::size_t>((i + grid - 1) % grid)];
        const double right = profile[static_cast<std::size_t>((i + 1) % grid)];
        if (v > left || v > right) continue;
        if (v > grid_min + kTwoPi * h) continue;
        double a = i * h - h;
        double b = i * h + h;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = phase_singular_value(l, c);
        double fd = phase_singular_value(l, d);
        while (b - a > phase_tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = phase_singular_value(l, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = phase_singular_value(l, d);
            }
        }
        const double phi = fc < fd ? c : d;
        const double val = std::min(fc, fd);
        if (val < out.gamma) {
            out.gamma = val;
            out.argmin_phase = wrap_phase(phi);
        }
    }
    return out;
}

bool is_gamma_hyperbolic(const Matrix& l, double gamma, const GammaOptions& opts) {
    if (!(gamma >= 0)) throw InvalidInput("is_gamma_hyperbolic: gamma must be nonnegative");
    return gamma_linear(l, opts).gamma >= gamma;
}

HyperbolicityValue orbit_hyperbolicity(const OrbitSegment& seg, const GammaOptions& opts) {
    return gamma_linear(cocycle(seg), opts);
}

HyperbolicityValue orbit_hyperbolicity(const PerturbedMap& f, const Vector& x0, std::size_t n,
                                       const GammaOptions& opts) {
    return orbit_hyperbolicity(orbit(f, x0, n), opts);
}

}  // namespace hyplab
