#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "volteface/numerics.hpp"

namespace volteface {

// ---------------------------------------------------------------------------
// Per-mode velocity blocks of the circle telegraph process.
//
// The generator leaves each plane V_n = span{e^{inx} g(y)} invariant and acts
// there through the 2x2 block
//
//     K_n g(y) = i n y g(y) + a (g(-y) - g(y)),   y in {+1, -1},
//
// written below in the basis (indicator of y=+1, indicator of y=-1). Under the
// uniform measure on {+1,-1} that basis is orthogonal with equal norms, so the
// block's matrix in an orthonormal basis is the same matrix and operator norms
// can be read off its singular values directly.
// ---------------------------------------------------------------------------

enum class SpectralRegime { hyperbolic, critical, oscillatory };

/// Width of the band around a == n inside which the Jordan-block (critical)
/// formulas are used; the hyperbolic/oscillatory forms lose all precision as
/// their discriminant vanishes.
inline double regime_boundary_tol(double a, double n) { return 1e-9 * std::max(a, n); }

inline SpectralRegime classify_regime(double a, double n) {
    const double tol = regime_boundary_tol(a, n);
    if (a - n > tol) return SpectralRegime::hyperbolic;
    if (n - a > tol) return SpectralRegime::oscillatory;
    return SpectralRegime::critical;
}

inline const char* regime_name(SpectralRegime r) {
    switch (r) {
        case SpectralRegime::hyperbolic: return "hyperbolic";
        case SpectralRegime::critical: return "critical";
        case SpectralRegime::oscillatory: return "oscillatory";
    }
    return "unknown";
}

struct ModeOperator {
    double a = 0.0;  ///< velocity flip rate, 1/time
    double n = 0.0;  ///< mode index (integers for the flat torus, half-integers arise as scaling limits)
    Mat2c matrix;    ///< [[in-a, a], [a, -in-a]]
};

inline ModeOperator build_mode_operator(double a, double n) {
    if (!(a > 0.0)) throw std::domain_error("mode_core: flip rate a must be positive");
    if (!(n > 0.0)) throw std::domain_error("mode_core: mode index n must be positive");
    const complexd in{0.0, n};
    return {a, n, Mat2c{in - a, complexd{a, 0.0}, complexd{a, 0.0}, -in - a}};
}

/// exp(t K_n) in closed form. Writing K_n = -a I + B with B = [[in, a],[a, -in]],
/// one has B^2 = (a^2 - n^2) I, so the exponential is a two-term combination of
/// I and B in every regime. The hyperbolic branch is arranged around
/// gamma = e^{-2wt} so no intermediate overflows for large t.
inline Mat2c mode_exp(const ModeOperator& op, double t) {
    if (t < 0.0) throw std::domain_error("mode_core: time t must be nonnegative");
    const double a = op.a, n = op.n;
    const Mat2c b{complexd{0.0, n}, complexd{a, 0.0}, complexd{a, 0.0}, complexd{0.0, -n}};

    switch (classify_regime(a, n)) {
        case SpectralRegime::hyperbolic: {
            const double w = std::sqrt((a - n) * (a + n));
            const double gamma = std::exp(-2.0 * w * t);
            const double lead = std::exp(-(n * n / (a + w)) * t);  // e^{(w-a)t}, a-w = n^2/(a+w)
            return (Mat2c::identity() * (0.5 * (1.0 + gamma)) + b * ((1.0 - gamma) / (2.0 * w))) * lead;
        }
        case SpectralRegime::critical: {
            const double lead = std::exp(-a * t);
            return (Mat2c::identity() + b * t) * lead;
        }
        case SpectralRegime::oscillatory: {
            const double w = std::sqrt((n - a) * (n + a));
            const double lead = std::exp(-a * t);
            const double s = (w > 0.0) ? std::sin(w * t) / w : t;
            return (Mat2c::identity() * std::cos(w * t) + b * s) * lead;
        }
    }
    return Mat2c::identity();
}

struct ModeNormResult {
    double r_value = 1.0;          ///< squared restricted norm R(t,a,n)
    SpectralRegime regime = SpectralRegime::critical;
    std::optional<double> gamma;   ///< decay ratio e^{-2 sqrt(a^2-n^2) t}, hyperbolic only
    double auxiliary = 0.0;        ///< omega = sqrt((a/n)^2-1) or nu_n = 2 sqrt(n^2-a^2); 0 at criticality
};

/// Closed-form squared restricted norm R(t,a,n) = ||e^{tK_n}||^2 (distance to
/// equilibrium on V_n; for n = 0 the constants are removed first, leaving the
/// single eigenvalue -2a). Negative n is folded to |n|: K_{-n} is the entrywise
/// conjugate of K_n and has the same singular values.
///
/// The three branches are rewritten so every subtraction is benign:
///  - hyperbolic: denominator grouped as w^2 q + (a/n)(sqrt(1+(wq)^2)-1) + (a/n - 1),
///    all nonnegative, with 1 - gamma via expm1;
///  - critical: 1 + 2/(sqrt(1+1/u^2)-1) expanded to 1 + 2u^2 + 2u sqrt(1+u^2);
///  - oscillatory: sqrt(1+X)-1 via sqrt1pm1 and 1-cos via 2 sin^2.
inline ModeNormResult mode_norm_squared_closed(double a, double n, double t) {
    if (!(a > 0.0)) throw std::domain_error("mode_core: flip rate a must be positive");
    if (!(t >= 0.0)) throw std::domain_error("mode_core: time t must be nonnegative");
    if (!std::isfinite(n)) throw std::domain_error("mode_core: mode index must be finite");
    n = std::abs(n);

    if (n == 0.0) {
        ModeNormResult res;
        res.r_value = (t == 0.0) ? 1.0 : std::exp(-4.0 * a * t);
        res.regime = SpectralRegime::hyperbolic;
        res.auxiliary = 0.0;
        return res;
    }

    ModeNormResult res;
    res.regime = classify_regime(a, n);
    switch (res.regime) {
        case SpectralRegime::hyperbolic: {
            const double w = std::sqrt((a - n) * (a + n));
            res.auxiliary = w / n;  // omega
            if (t == 0.0) {
                res.r_value = 1.0;
                res.gamma = 1.0;
                return res;
            }
            const double omega = w / n;
            const double ratio = a / n;
            const double gamma = std::exp(-2.0 * w * t);
            const double one_minus_gamma = -std::expm1(-2.0 * w * t);
            const double q = (1.0 + gamma) / one_minus_gamma;
            const double wq = omega * q;
            const double denom = omega * omega * q + ratio * sqrt1pm1(wq * wq) + (ratio - 1.0);
            const double lead = std::exp(-2.0 * (n * n / (a + w)) * t);  // e^{-2(a-w)t}
            res.r_value = lead * (1.0 + 2.0 / denom);
            res.gamma = gamma;
            return res;
        }
        case SpectralRegime::critical: {
            res.auxiliary = 0.0;
            if (t == 0.0) {
                res.r_value = 1.0;
                return res;
            }
            const double u = n * t;
            res.r_value = std::exp(-2.0 * a * t) * (1.0 + 2.0 * u * u + 2.0 * u * std::sqrt(1.0 + u * u));
            return res;
        }
        case SpectralRegime::oscillatory: {
            const double w = std::sqrt((n - a) * (n + a));
            const double nu = 2.0 * w;
            res.auxiliary = nu;
            if (t == 0.0) {
                res.r_value = 1.0;
                return res;
            }
            const double sh = std::sin(0.5 * nu * t);
            const double one_minus_cos = 2.0 * sh * sh;
            double g = 1.0;
            if (one_minus_cos > 0.0) {
                const double x = (nu / a) * (nu / a) / (2.0 * one_minus_cos);
                g = 1.0 + 2.0 / sqrt1pm1(x);
            }
            res.r_value = std::exp(-2.0 * a * t) * g;
            return res;
        }
    }
    return res;
}

/// The bounded oscillating factor g_n(t) of the oscillatory regime, i.e.
/// R(t,a,n) = e^{-2at} g_n(t) for n > a. Ranges over [1, (n+a)/(n-a)].
inline double oscillatory_mode_factor(double a, double n, double t) {
    if (!(n > a)) throw std::domain_error("mode_core: g_n requires an oscillatory mode (n > a)");
    const double nu = 2.0 * std::sqrt((n - a) * (n + a));
    const double sh = std::sin(0.5 * nu * t);
    const double one_minus_cos = 2.0 * sh * sh;
    if (one_minus_cos <= 0.0) return 1.0;
    const double x = (nu / a) * (nu / a) / (2.0 * one_minus_cos);
    return 1.0 + 2.0 / sqrt1pm1(x);
}

/// Brute-force validator for the closed forms: exponentiate t K_n with the
/// Taylor kernel and take the largest singular value squared. The coordinates
/// (sqrt(2) 1_{y=+1}, sqrt(2) 1_{y=-1}) are orthonormal in L^2 of the uniform
/// measure on {+1,-1} and leave the matrix unchanged, so the SVD below is taken
/// in genuinely orthonormal coordinates.
inline double mode_norm_squared_oracle(double a, double n, double t) {
    if (!(a > 0.0) || !(t >= 0.0)) throw std::domain_error("mode_core: oracle requires a > 0, t >= 0");
    n = std::abs(n);
    if (n == 0.0) {
        // restricted to ker(mu) the n = 0 block is the scalar e^{-2at}
        return std::exp(-4.0 * a * t);
    }
    const ModeOperator op = build_mode_operator(a, n);
    return operator_norm_sq(expm_taylor(op.matrix * t));
}

/// High-flip-rate limit of the rescaled mode norm: ||P^a_t||_{V_n} with time
/// sped up by a tends to e^{-n^2 t / 2}, the heat semigroup norm on mode n.
struct BrownianModeLimit {
    double n = 0.0;
    double t = 0.0;
    double limit = 1.0;  ///< e^{-n^2 t / 2}

    /// Finite-a rescaled value sqrt(R(a t, a, n)).
    double rescaled_norm(double a) const {
        return std::sqrt(mode_norm_squared_closed(a, n, a * t).r_value);
    }
};

inline BrownianModeLimit mode_norm_brownian_limit(double n, double t) {
    if (!(n > 0.0)) throw std::domain_error("mode_core: mode index n must be positive");
    if (!(t >= 0.0)) throw std::domain_error("mode_core: time t must be nonnegative");
    return {n, t, std::exp(-0.5 * n * n * t)};
}

}  // namespace volteface
