#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "volteface/numerics.hpp"

namespace volteface {

// Scalar optimization kernels shared by the norm computations: extrema of a
// rational-quadratic, the maximum of a shifted-cosine ratio, and the numeric
// monotonicity check backing the mode-comparison argument.

struct RationalQuadraticExtrema {
    double a = 0.0;
    double b = 0.0;
    double r_plus = 0.0;   ///< argmax of (R - a) / (R^2 + b)
    double r_minus = 0.0;  ///< argmin
    double f_plus = 0.0;   ///< maximal value, 1 / (2 r_plus)
    double f_minus = 0.0;  ///< minimal value, 1 / (2 r_minus)
};

/// Extrema of f(R) = (R - a) / (R^2 + b) over the reals, b > 0.
inline RationalQuadraticExtrema optf_extrema(double a, double b) {
    if (!(b > 0.0)) throw std::domain_error("scalar_opt: optf requires b > 0");
    const double root = std::sqrt(a * a + b);
    RationalQuadraticExtrema e;
    e.a = a;
    e.b = b;
    e.r_plus = a + root;
    e.r_minus = a - root;
    e.f_plus = 0.5 / e.r_plus;
    e.f_minus = 0.5 / e.r_minus;
    return e;
}

/// max over theta of (alpha + cos(theta - s)) / (alpha + cos theta), alpha > 1.
/// Equals 1 when s is a multiple of 2 pi, is bounded by (alpha+1)/(alpha-1) and
/// attains that bound exactly at s = pi (mod 2 pi).
inline double optg_max(double alpha, double s) {
    if (!(alpha > 1.0)) throw std::domain_error("scalar_opt: optg requires alpha > 1");
    const double sh = std::sin(0.5 * s);
    const double one_minus_cos = 2.0 * sh * sh;
    if (one_minus_cos <= 0.0) return 1.0;
    const double x = 2.0 * (alpha * alpha - 1.0) / one_minus_cos;
    return 1.0 + 2.0 / sqrt1pm1(x);
}

/// h(p) = p/(1-p^2) * (1+e^{-ps})/(1-e^{-ps}); blows up like 1/(1-p) near 1.
inline double decroi_h(double s, double p) {
    const double one_minus_exp = -std::expm1(-p * s);
    return p / ((1.0 - p) * (1.0 + p)) * (2.0 - one_minus_exp) / one_minus_exp;
}

/// phi(p) = e^{ps} (1 + 2 / (p h + sqrt(h^2 + 1/(1-p^2)) - 1)). The trailing
/// "- 1" is folded into sqrt1pm1(h^2 + p^2/(1-p^2)) so the denominator is a sum
/// of nonnegative terms; stable up to p = 1 - 1e-8 and beyond.
inline double decroi_phi(double s, double p) {
    const double h = decroi_h(s, p);
    const double p2_frac = p * p / ((1.0 - p) * (1.0 + p));
    const double denom = p * h + sqrt1pm1(h * h + p2_frac);
    return std::exp(p * s) * (1.0 + 2.0 / denom);
}

struct MonotonicityReport {
    bool monotone = true;
    double max_violation = 0.0;  ///< largest observed decrease phi(p_i) - phi(p_{i+1})
    double worst_p = 0.0;
    double limit_at_zero = 0.0;  ///< phi(0+) = 1 + 2/(sqrt(4/s^2 + 1) - 1)
    double limit_at_one = 0.0;   ///< phi(1-) = e^s
    long points_checked = 0;
};

/// Checks that p -> phi(p) is non-decreasing along the given grid in (0,1).
/// Near-flat stretches are refined with extra interior samples before a verdict.
inline MonotonicityReport decroi_monotonicity_check(double s, const std::vector<double>& p_grid) {
    if (!(s > 0.0)) throw std::domain_error("scalar_opt: decroi check requires s > 0");
    for (double p : p_grid)
        if (!(p > 0.0 && p < 1.0)) throw std::domain_error("scalar_opt: grid must lie strictly inside (0,1)");

    MonotonicityReport rep;
    rep.limit_at_zero = 1.0 + 2.0 / sqrt1pm1(4.0 / (s * s));
    rep.limit_at_one = std::exp(s);

    double prev_p = 0.0;
    double prev_phi = rep.limit_at_zero;
    auto step = [&](double p, double phi) {
        const double drop = prev_phi - phi;
        if (drop > rep.max_violation) {
            rep.max_violation = drop;
            rep.worst_p = p;
            rep.monotone = false;
        }
        prev_p = p;
        prev_phi = phi;
        ++rep.points_checked;
    };

    bool first = true;
    for (double p : p_grid) {
        const double phi = decroi_phi(s, p);
        if (!first) {
            // refine nearly flat segments before accepting them
            const double scale = std::abs(prev_phi) + std::abs(phi);
            if (std::abs(phi - prev_phi) < 1e-12 * scale) {
                const double lo = prev_p;
                for (int j = 1; j <= 8; ++j) {
                    const double pm = lo + (p - lo) * j / 9.0;
                    step(pm, decroi_phi(s, pm));
                }
            }
        }
        step(p, phi);
        first = false;
    }
    step(1.0 - 1e-12, rep.limit_at_one);
    return rep;
}

/// Convenience overload: uniform interior grid with `count` points.
inline MonotonicityReport decroi_monotonicity_check(double s, int count = 1000) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) grid.push_back(static_cast<double>(i) / (count + 1));
    return decroi_monotonicity_check(s, grid);
}

}  // namespace volteface
