#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace volteface {

using complexd = std::complex<double>;

inline constexpr double two_pi = 6.28318530717958647692528676655900577;
inline constexpr double pi = 3.14159265358979323846264338327950288;

/// sqrt(1 + x) - 1 evaluated without cancellation for small x (x >= -1).
inline double sqrt1pm1(double x) {
    if (x > -0.5 && x < 0.5) return std::expm1(0.5 * std::log1p(x));
    return std::sqrt(1.0 + x) - 1.0;
}

/// Dense 2x2 complex matrix, row-major. Small enough that everything is by value.
struct Mat2c {
    complexd a00{}, a01{}, a10{}, a11{};

    static Mat2c identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2c operator+(const Mat2c& o) const {
        return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11};
    }
    Mat2c operator-(const Mat2c& o) const {
        return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11};
    }
    Mat2c operator*(const Mat2c& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    Mat2c operator*(complexd s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
    Mat2c operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }

    /// Apply to a column vector (v0, v1).
    std::pair<complexd, complexd> apply(complexd v0, complexd v1) const {
        return {a00 * v0 + a01 * v1, a10 * v0 + a11 * v1};
    }
};

inline complexd det(const Mat2c& m) { return m.a00 * m.a11 - m.a01 * m.a10; }

inline double frobenius_sq(const Mat2c& m) {
    return std::norm(m.a00) + std::norm(m.a01) + std::norm(m.a10) + std::norm(m.a11);
}

inline Mat2c mat_pow(Mat2c base, long long n) {
    Mat2c acc = Mat2c::identity();
    while (n > 0) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

/// Squared singular values {largest, smallest}. For a 2x2 matrix these are the
/// eigenvalues of A*A, available in closed form from ||A||_F^2 and |det A|^2;
/// the discriminant equals (s1^2 - s2^2)^2 so it is clamped at zero.
inline std::pair<double, double> singular_values_sq(const Mat2c& m) {
    const double f2 = frobenius_sq(m);
    const double d2 = std::norm(det(m));
    double disc = f2 * f2 - 4.0 * d2;
    if (disc < 0.0) disc = 0.0;
    const double root = std::sqrt(disc);
    const double hi = 0.5 * (f2 + root);
    const double lo = (hi > 0.0) ? d2 / hi : 0.0;
    return {hi, lo};
}

/// Squared operator (spectral) norm.
inline double operator_norm_sq(const Mat2c& m) { return singular_values_sq(m).first; }

/// Matrix exponential by scaling-and-squaring over a fixed 18-term Taylor kernel.
/// For 2x2 inputs scaled below 1/2 the truncation error is far below double
/// rounding, so this serves as a formula-free reference exponential.
inline Mat2c expm_taylor(const Mat2c& m) {
    double scale = std::sqrt(frobenius_sq(m));
    int squarings = 0;
    while (scale > 0.5 && squarings < 64) {
        scale *= 0.5;
        ++squarings;
    }
    const double shrink = std::ldexp(1.0, -squarings);
    const Mat2c a = m * shrink;

    Mat2c sum = Mat2c::identity();
    Mat2c term = Mat2c::identity();
    for (int k = 1; k <= 18; ++k) {
        term = term * a * (1.0 / static_cast<double>(k));
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

}  // namespace volteface
