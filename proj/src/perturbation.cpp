#include "hyplab/perturbation.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hyplab/error.hpp"

namespace hyplab {

HomogeneousComponent HomogeneousComponent::zero(int degree, int dim) {
    HomogeneousComponent c;
    c.degree = degree;
    c.dim = dim;
    c.indices = multi_indices(degree, dim);
    c.coeffs.assign(c.indices.size(), Vector::Zero(dim));
    return c;
}

double weighted_inner(const HomogeneousComponent& a, const HomogeneousComponent& b) {
    if (a.degree != b.degree || a.dim != b.dim || a.indices.size() != b.indices.size()) {
        throw InvalidInput("weighted_inner: components differ in degree or dimension");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.indices.size(); ++i) {
        if (!(a.indices[i] == b.indices[i])) throw InvalidInput("weighted_inner: index layout mismatch");
        s += a.coeffs[i].dot(b.coeffs[i]) / multinomial(a.indices[i]);
    }
    return s;
}

double weighted_norm(const HomogeneousComponent& a) { return std::sqrt(weighted_inner(a, a)); }

std::uint64_t nu(int k, int dim) {
    if (k < 0 || dim < 1) throw InvalidInput("nu: need k >= 0 and dim >= 1");
    // binomial(k+N-1, N-1) by the multiplicative formula, exact in integers
    std::uint64_t r = 1;
    for (int i = 1; i <= dim - 1; ++i) r = r * static_cast<std::uint64_t>(k + i) / static_cast<std::uint64_t>(i);
    return r * static_cast<std::uint64_t>(dim);
}

// ---------------------------------------------------------------- bricks

BrickSpec BrickSpec::factorial(double tau, int k_max) {
    if (!(tau > 0) || k_max < 0) throw InvalidInput("factorial brick: need tau > 0 and K_max >= 0");
    BrickSpec b;
    b.family_ = Family::Factorial;
    b.tau_ = tau;
    for (int k = 0; k <= k_max; ++k) b.sizes_.push_back(b.closed_form_radius(k));
    return b;
}

BrickSpec BrickSpec::geometric(double tau, double q, int k_max) {
    if (!(tau > 0) || !(q > 0) || !(q < 1) || k_max < 0) {
        throw InvalidInput("geometric brick: need tau > 0, 0 < q < 1, K_max >= 0");
    }
    BrickSpec b;
    b.family_ = Family::Geometric;
    b.tau_ = tau;
    b.q_ = q;
    for (int k = 0; k <= k_max; ++k) b.sizes_.push_back(b.closed_form_radius(k));
    return b;
}

BrickSpec BrickSpec::custom(std::vector<double> radii) {
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0) || !std::isfinite(radii[k])) throw InvalidInput("custom brick: radii must be positive");
        if (k > 0 && radii[k] > radii[k - 1]) throw InvalidInput("custom brick: radii must be nonincreasing");
    }
    BrickSpec b;
    b.family_ = Family::Custom;
    b.sizes_ = std::move(radii);
    return b;
}

BrickSpec BrickSpec::empty() { return BrickSpec{}; }

double BrickSpec::radius(int k) const {
    if (k < 0 || k > k_max()) throw InvalidInput("BrickSpec::radius: degree out of range");
    return sizes_[static_cast<std::size_t>(k)];
}

double BrickSpec::closed_form_radius(int k) const {
    switch (family_) {
        case Family::Factorial: return tau_ * std::exp(-std::lgamma(k + 1.0));
        case Family::Geometric: return tau_ * std::pow(q_, k);
        case Family::Custom: return k <= k_max() ? sizes_[static_cast<std::size_t>(k)] : 0.0;
    }
    return 0.0;
}

std::string BrickSpec::family_name() const {
    switch (family_) {
        case Family::Factorial: return "factorial";
        case Family::Geometric: return "geometric";
        case Family::Custom: return "custom";
    }
    return "custom";
}

AdmissibilityReport check_admissible(const BrickSpec& brick, int dim) {
    AdmissibilityReport rep;
    const double sqrt_n = std::sqrt(static_cast<double>(dim));
    switch (brick.family()) {
        case BrickSpec::Family::Factorial:
            rep.status = Admissibility::Admissible;
            rep.analytic_sum_converges = true;
            rep.certificate =
                "log(1/r_k) = log k! - log tau = O(k log k), dominated by C k^(1+delta) for all C, delta > 0; "
                "sum_k tau N^(k/2) / k! = tau exp(sqrt(N)) converges";
            break;
        case BrickSpec::Family::Geometric:
            rep.status = Admissibility::Admissible;
            rep.analytic_sum_converges = brick.ratio() * sqrt_n < 1.0;
            rep.certificate =
                "log(1/r_k) = k log(1/q) - log tau = O(k), dominated by C k^(1+delta) for all C, delta > 0; ";
            rep.certificate += rep.analytic_sum_converges ? "q sqrt(N) < 1 so sum_k r_k N^(k/2) converges"
                                                          : "q sqrt(N) >= 1 so sum_k r_k N^(k/2) diverges";
            if (!rep.analytic_sum_converges) rep.status = Admissibility::NotAdmissible;
            break;
        case BrickSpec::Family::Custom:
            rep.status = Admissibility::FinitePrefixOnly;
            rep.analytic_sum_converges = true;
            rep.certificate = "finite list: the growth condition on r_k is a tail property and cannot be decided";
            break;
    }
    return rep;
}

namespace {

// k!/(k-j)! * radius^{k-j}
double derivative_weight(int k, int order, double radius) {
    double w = 1.0;
    for (int i = 0; i < order; ++i) w *= (k - i);
    return w * std::pow(radius, k - order);
}

}  // namespace

double tail_sum(const BrickSpec& brick, int dim, int k_max, int derivative_order, double radius) {
    if (dim < 1 || derivative_order < 0 || derivative_order > 2) throw InvalidInput("tail_sum: bad arguments");
    if (brick.family() == BrickSpec::Family::Custom) {
        double s = 0.0;
        for (int k = k_max + 1; k <= brick.k_max(); ++k) {
            s += brick.radius(k) * std::pow(dim, 0.5 * k) * std::sqrt(double(dim)) *
                 derivative_weight(k, derivative_order, radius);
        }
        return s;
    }
    const double growth = std::sqrt(static_cast<double>(dim)) * radius;
    if (brick.family() == BrickSpec::Family::Geometric && brick.ratio() * growth >= 1.0) {
        throw InvalidInput("tail_sum: geometric brick with q*sqrt(N)*R >= 1 has a divergent tail");
    }
    auto term = [&](int k) {
        if (brick.family() == BrickSpec::Family::Factorial) {
            // tau (sqrt(N) R)^k / k!, formed in log space
            const double logt = std::log(brick.tau()) + k * std::log(growth) - std::lgamma(k + 1.0);
            return std::exp(logt) * std::sqrt(double(dim)) * derivative_weight(k, derivative_order, 1.0) /
                   std::pow(radius, derivative_order);
        }
        return brick.closed_form_radius(k) * std::pow(growth, k) * std::sqrt(double(dim)) *
               derivative_weight(k, derivative_order, 1.0) / std::pow(radius, derivative_order);
    };
    double s = 0.0;
    int k = std::max(k_max + 1, derivative_order);
    double t = term(k);
    for (int iter = 0; iter < 100000; ++iter, ++k) {
        s += t;
        const double next = term(k + 1);
        const double ratio = t > 0 ? next / t : 0.0;
        // term ratios are eventually decreasing for both families, so once a ratio
        // is below one the rest is dominated by a geometric series
        const double ratio_after = term(k + 2) / std::max(next, std::numeric_limits<double>::min());
        if (ratio < 1.0 && ratio_after <= ratio && next <= 1e-17 * s) {
            return s + next / (1.0 - ratio);
        }
        if (next == 0.0) return s;
        t = next;
    }
    throw InvalidInput("tail_sum: series did not settle");
}

double tail_bound(const BrickSpec& brick, int dim, int k_max) { return tail_sum(brick, dim, k_max, 0, 1.0); }

// ---------------------------------------------------------------- vectors

PerturbationVector PerturbationVector::zero(const BrickSpec& brick, int dim) {
    PerturbationVector p;
    p.dim = dim;
    p.brick = brick;
    for (int k = 0; k <= brick.k_max(); ++k) p.components.push_back(HomogeneousComponent::zero(k, dim));
    return p;
}

bool PerturbationVector::in_brick() const {
    if (static_cast<int>(components.size()) > brick.k_max() + 1) return false;
    for (const auto& c : components) {
        if (weighted_norm(c) > brick.radius(c.degree)) return false;
    }
    return true;
}

PolynomialMap PerturbationVector::as_polynomial(double domain_radius) const {
    std::vector<std::vector<PolynomialMap::Term>> comps(static_cast<std::size_t>(dim));
    for (const auto& c : components) {
        for (std::size_t a = 0; a < c.indices.size(); ++a) {
            for (int i = 0; i < dim; ++i) {
                const double v = c.coeffs[a](i);
                if (v != 0.0) comps[static_cast<std::size_t>(i)].push_back({c.indices[a], v});
            }
        }
    }
    return PolynomialMap(dim, std::move(comps), domain_radius);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial) {
    // splitmix64 finalizer applied to a combination of both keys
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ (trial * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

PerturbationVector sample(const BrickSpec& brick, int dim, std::uint64_t seed, std::uint64_t trial) {
    if (dim < 1) throw InvalidInput("sample: dim must be >= 1");
    std::mt19937_64 rng(substream_seed(seed, trial));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    PerturbationVector p = PerturbationVector::zero(brick, dim);
    p.seed = seed;
    p.trial = trial;
    for (auto& comp : p.components) {
        const double r = brick.radius(comp.degree);
        const auto count = comp.size();
        // orthonormal coordinates of <.,.>_k are c_alpha = eps_alpha / sqrt(multinomial)
        std::vector<Vector> ortho(comp.indices.size(), Vector::Zero(dim));
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& v : ortho) {
                for (int i = 0; i < dim; ++i) {
                    v(i) = gauss(rng);
                    norm2 += v(i) * v(i);
                }
            }
        } while (norm2 == 0.0);
        double u = 0.0;
        do u = unif(rng); while (u == 0.0);
        const double scale = r * std::pow(u, 1.0 / static_cast<double>(count)) / std::sqrt(norm2);
        for (std::size_t a = 0; a < comp.indices.size(); ++a) {
            comp.coeffs[a] = ortho[a] * (scale * std::sqrt(multinomial(comp.indices[a])));
        }
        // rounding can push the norm a few ulps past the radius
        while (weighted_norm(comp) > r) {
            for (auto& v : comp.coeffs) v *= (1.0 - 4 * std::numeric_limits<double>::epsilon());
        }
    }
    return p;
}

Vector eval_perturbation(const PerturbationVector& eps, const Vector& x) {
    if (x.size() != eps.dim) throw InvalidInput("eval_perturbation: dimension mismatch");
    Vector out = Vector::Zero(eps.dim);
    if (eps.dim == 1) {
        for (auto it = eps.components.rbegin(); it != eps.components.rend(); ++it) {
            out(0) = out(0) * x(0) + it->coeffs[0](0);
        }
        return out;
    }
    for (const auto& c : eps.components) {
        for (std::size_t a = 0; a < c.indices.size(); ++a) out += c.coeffs[a] * monomial(c.indices[a], x);
    }
    return out;
}

Matrix eval_jacobian(const PerturbationVector& eps, const Vector& x) {
    if (x.size() != eps.dim) throw InvalidInput("eval_jacobian: dimension mismatch");
    Matrix jac = Matrix::Zero(eps.dim, eps.dim);
    if (eps.dim == 1) {
        double acc = 0.0;
        for (std::size_t k = eps.components.size(); k-- > 1;) acc = acc * x(0) + double(k) * eps.components[k].coeffs[0](0);
        jac(0, 0) = acc;
        return jac;
    }
    for (const auto& c : eps.components) {
        for (std::size_t a = 0; a < c.indices.size(); ++a) {
            for (int j = 0; j < eps.dim; ++j) {
                const int e = c.indices[a].exponents[static_cast<std::size_t>(j)];
                if (e == 0) continue;
                MultiIndex lowered = c.indices[a];
                lowered.exponents[static_cast<std::size_t>(j)] -= 1;
                jac.col(j) += c.coeffs[a] * (e * monomial(lowered, x));
            }
        }
    }
    return jac;
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const BrickSpec& brick) {
    nlohmann::json j;
    j["family"] = brick.family_name();
    switch (brick.family()) {
        case BrickSpec::Family::Factorial:
            j["tau"] = brick.tau();
            j["k_max"] = brick.k_max();
            break;
        case BrickSpec::Family::Geometric:
            j["tau"] = brick.tau();
            j["q"] = brick.ratio();
            j["k_max"] = brick.k_max();
            break;
        case BrickSpec::Family::Custom:
            j["radii"] = brick.sizes();
            break;
    }
    return j;
}

BrickSpec brick_from_json(const nlohmann::json& j) {
    try {
        const auto family = j.at("family").get<std::string>();
        if (family == "factorial") return BrickSpec::factorial(j.at("tau").get<double>(), j.at("k_max").get<int>());
        if (family == "geometric") {
            return BrickSpec::geometric(j.at("tau").get<double>(), j.at("q").get<double>(), j.at("k_max").get<int>());
        }
        if (family == "custom") return BrickSpec::custom(j.at("radii").get<std::vector<double>>());
        if (family == "empty") return BrickSpec::empty();
        throw ConfigError("unknown brick family '" + family + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("brick: ") + e.what());
    }
}

nlohmann::json to_json(const PerturbationVector& eps) {
    nlohmann::json j;
    j["dim"] = eps.dim;
    j["brick"] = to_json(eps.brick);
    if (eps.seed) j["seed"] = *eps.seed;
    if (eps.trial) j["trial"] = *eps.trial;
    auto degrees = nlohmann::json::array();
    for (const auto& c : eps.components) {
        auto coeffs = nlohmann::json::array();
        for (const auto& v : c.coeffs) coeffs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        degrees.push_back({{"k", c.degree}, {"coeffs", coeffs}});
    }
    j["degrees"] = degrees;
    return j;
}

PerturbationVector perturbation_from_json(const nlohmann::json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        PerturbationVector p = PerturbationVector::zero(brick_from_json(j.at("brick")), dim);
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("trial")) p.trial = j.at("trial").get<std::uint64_t>();
        const auto& degrees = j.at("degrees");
        if (degrees.size() != p.components.size()) throw ConfigError("perturbation: degree count does not match brick");
        for (std::size_t k = 0; k < degrees.size(); ++k) {
            const auto& coeffs = degrees[k].at("coeffs");
            auto& comp = p.components[k];
            if (coeffs.size() != comp.indices.size()) throw ConfigError("perturbation: wrong coefficient count");
            for (std::size_t a = 0; a < coeffs.size(); ++a) {
                const auto v = coeffs[a].get<std::vector<double>>();
                if (static_cast<int>(v.size()) != dim) throw ConfigError("perturbation: wrong vector length");
                comp.coeffs[a] = Eigen::Map<const Vector>(v.data(), dim);
            }
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("perturbation: ") + e.what());
    }
}

}  // namespace hyplab
