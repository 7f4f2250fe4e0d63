#pragma once

// Closed real intervals with outward rounding.
//
// Rounding is detected with error-free transformations (TwoSum, fma-based
// TwoProd), so an operation whose floating-point result is exact yields a
// point interval. This keeps enclosures such as g(-1) = [0, 0] exact, which
// the census relies on to certify zeros that sit on cell boundaries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace hyplab {

namespace detail {

inline double next_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double next_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

// Below this magnitude fma-based error terms may themselves be rounded.
inline constexpr double kTinyProduct = 1e-290;

inline void round_sum(double a, double b, double& lo, double& hi) {
    const double s = a + b;
    if (!std::isfinite(s)) {
        lo = std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
        hi = std::isnan(s) ? std::numeric_limits<double>::infinity() : s;
        if (s == std::numeric_limits<double>::infinity()) lo = std::numeric_limits<double>::max();
        if (s == -std::numeric_limits<double>::infinity()) hi = -std::numeric_limits<double>::max();
        return;
    }
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    lo = err < 0 ? next_down(s) : s;
    hi = err > 0 ? next_up(s) : s;
}

inline double sum_down(double a, double b) { double lo, hi; round_sum(a, b, lo, hi); return lo; }
inline double sum_up(double a, double b) { double lo, hi; round_sum(a, b, lo, hi); return hi; }

inline void round_product(double a, double b, double& lo, double& hi) {
    if (a == 0.0 || b == 0.0) { lo = hi = 0.0; return; }
    const double p = a * b;
    if (!std::isfinite(p)) {
        lo = p > 0 ? std::numeric_limits<double>::max() : p;
        hi = p < 0 ? -std::numeric_limits<double>::max() : p;
        return;
    }
    if (std::abs(p) < kTinyProduct) { lo = next_down(p); hi = next_up(p); return; }
    const double err = std::fma(a, b, -p);
    lo = err < 0 ? next_down(p) : p;
    hi = err > 0 ? next_up(p) : p;
}

inline double prod_down(double a, double b) { double lo, hi; round_product(a, b, lo, hi); return lo; }
inline double prod_up(double a, double b) { double lo, hi; round_product(a, b, lo, hi); return hi; }

}  // namespace detail

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double point) : lo(point), hi(point) {}  // NOLINT: implicit from scalar
    constexpr Interval(double l, double h) : lo(l), hi(h) {}

    double width() const { return hi - lo; }
    double mid() const { return lo + 0.5 * (hi - lo); }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    /// smallest |x| over the interval
    double mig() const { return contains(0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi)); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool is_point() const { return lo == hi; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline Interval operator+(Interval a, Interval b) {
    return {detail::sum_down(a.lo, b.lo), detail::sum_up(a.hi, b.hi)};
}

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator-(Interval a, Interval b) { return a + (-b); }

inline Interval operator*(Interval a, Interval b) {
    double l[4], h[4];
    detail::round_product(a.lo, b.lo, l[0], h[0]);
    detail::round_product(a.lo, b.hi, l[1], h[1]);
    detail::round_product(a.hi, b.lo, l[2], h[2]);
    detail::round_product(a.hi, b.hi, l[3], h[3]);
    return {*std::min_element(l, l + 4), *std::max_element(h, h + 4)};
}

inline Interval& operator+=(Interval& a, Interval b) { return a = a + b; }
inline Interval& operator*=(Interval& a, Interval b) { return a = a * b; }

inline Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

/// Intersection; returns false when empty.
inline bool intersect(Interval a, Interval b, Interval& out) {
    out = {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    return out.lo <= out.hi;
}

/// Enclosure of a/b for 0 not in b.
inline Interval divide(Interval a, Interval b) {
    auto q_bounds = [](double x, double y, double& lo, double& hi) {
        const double q = x / y;
        if (!std::isfinite(q) || std::abs(q) < detail::kTinyProduct) {
            lo = detail::next_down(q);
            hi = detail::next_up(q);
            return;
        }
        const double r = std::fma(-q, y, x);
        const double s = (r == 0.0) ? 0.0 : ((r > 0) == (y > 0) ? 1.0 : -1.0);
        lo = s < 0 ? detail::next_down(q) : q;
        hi = s > 0 ? detail::next_up(q) : q;
    };
    double l[4], h[4];
    q_bounds(a.lo, b.lo, l[0], h[0]);
    q_bounds(a.lo, b.hi, l[1], h[1]);
    q_bounds(a.hi, b.lo, l[2], h[2]);
    q_bounds(a.hi, b.hi, l[3], h[3]);
    return {*std::min_element(l, l + 4), *std::max_element(h, h + 4)};
}

inline Interval abs(Interval a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return {0.0, std::max(-a.lo, a.hi)};
}

inline Interval pow(Interval a, int k) {
    Interval r{1.0};
    for (int i = 0; i < k; ++i) r *= a;
    // even powers are nonnegative even when a straddles zero
    if (k % 2 == 0 && r.lo < 0) r.lo = 0.0;
    return r;
}

/// Horner evaluation of sum_k c_k x^k with interval coefficients.
inline Interval horner(std::span<const Interval> coeffs, Interval x) {
    if (coeffs.empty()) return Interval{0.0};
    Interval acc = coeffs.back();
    for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace hyplab
