#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "volteface/mode_core.hpp"
#include "volteface/rng.hpp"

using namespace volteface;
using Catch::Detail::Approx;

namespace {

// eigenvalues of a 2x2 complex matrix, by the quadratic formula
std::pair<complexd, complexd> eigenvalues(const Mat2c& m) {
    const complexd tr = m.a00 + m.a11;
    const complexd root = std::sqrt(tr * tr - 4.0 * det(m));
    return {0.5 * (tr + root), 0.5 * (tr - root)};
}

bool close(complexd a, complexd b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("mode operator matrix and spectrum") {
    const ModeOperator op = build_mode_operator(2.0, 1.0);
    CHECK(op.matrix.a00 == complexd(-2.0, 1.0));
    CHECK(op.matrix.a01 == complexd(2.0, 0.0));
    CHECK(op.matrix.a10 == complexd(2.0, 0.0));
    CHECK(op.matrix.a11 == complexd(-2.0, -1.0));

    // trace -2a, determinant n^2
    CHECK((op.matrix.a00 + op.matrix.a11).real() == Approx(-4.0));
    CHECK(det(op.matrix).real() == Approx(1.0));
    CHECK(det(op.matrix).imag() == Approx(0.0).margin(1e-15));

    SECTION("hyperbolic pair at a=2, n=1") {
        auto [l1, l2] = eigenvalues(op.matrix);
        const double s3 = std::sqrt(3.0);
        CHECK((close(l1, complexd(-2.0 + s3, 0.0)) || close(l1, complexd(-2.0 - s3, 0.0))));
        CHECK((close(l2, complexd(-2.0 + s3, 0.0)) || close(l2, complexd(-2.0 - s3, 0.0))));
        CHECK_FALSE(close(l1, l2));
    }
    SECTION("double eigenvalue at a=n=1") {
        auto [l1, l2] = eigenvalues(build_mode_operator(1.0, 1.0).matrix);
        CHECK(close(l1, complexd(-1.0, 0.0), 1e-7));
        CHECK(close(l2, complexd(-1.0, 0.0), 1e-7));
    }
    SECTION("conjugate pair at a=1, n=2") {
        auto [l1, l2] = eigenvalues(build_mode_operator(1.0, 2.0).matrix);
        const double s3 = std::sqrt(3.0);
        CHECK((close(l1, complexd(-1.0, s3)) || close(l1, complexd(-1.0, -s3))));
        CHECK(close(l1, std::conj(l2)));
    }

    CHECK_THROWS_AS(build_mode_operator(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(build_mode_operator(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(build_mode_operator(-2.0, 1.0), std::domain_error);
}

TEST_CASE("mode_exp closed form") {
    SECTION("identity at t = 0") {
        for (auto [a, n] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {1.0, 1.0}, {0.5, 3.0}}) {
            const Mat2c m = mode_exp(build_mode_operator(a, n), 0.0);
            CHECK(m.a00 == complexd(1.0, 0.0));
            CHECK(m.a11 == complexd(1.0, 0.0));
            CHECK(m.a01 == complexd(0.0, 0.0));
            CHECK(m.a10 == complexd(0.0, 0.0));
        }
    }

    SECTION("agrees with the Taylor scaling-and-squaring exponential") {
        const ModeOperator op = build_mode_operator(2.0, 1.0);
        const Mat2c closed = mode_exp(op, 0.7);
        const Mat2c ref = expm_taylor(op.matrix * 0.7);
        CHECK(std::abs(closed.a00 - ref.a00) <= 1e-12);
        CHECK(std::abs(closed.a01 - ref.a01) <= 1e-12);
        CHECK(std::abs(closed.a10 - ref.a10) <= 1e-12);
        CHECK(std::abs(closed.a11 - ref.a11) <= 1e-12);
    }

    SECTION("Jordan action at criticality: g1 scales, g2 picks up t g1") {
        // g1(y) = 1 + iy -> coordinates (1+i, 1-i); g2 = 1/n -> (1, 1) at n = 1
        const double t = 0.8;
        const Mat2c m = mode_exp(build_mode_operator(1.0, 1.0), t);
        const complexd g1p(1.0, 1.0), g1m(1.0, -1.0);
        auto [e1p, e1m] = m.apply(g1p, g1m);
        CHECK(close(e1p, std::exp(-t) * g1p));
        CHECK(close(e1m, std::exp(-t) * g1m));
        auto [e2p, e2m] = m.apply(1.0, 1.0);
        CHECK(close(e2p, std::exp(-t) * (1.0 + t * g1p)));
        CHECK(close(e2m, std::exp(-t) * (1.0 + t * g1m)));
    }

    SECTION("semigroup property") {
        const ModeOperator op = build_mode_operator(0.7, 2.5);
        const Mat2c lhs = mode_exp(op, 1.9);
        const Mat2c rhs = mode_exp(op, 1.2) * mode_exp(op, 0.7);
        CHECK(std::abs(lhs.a00 - rhs.a00) <= 1e-13);
        CHECK(std::abs(lhs.a01 - rhs.a01) <= 1e-13);
        CHECK(std::abs(lhs.a10 - rhs.a10) <= 1e-13);
        CHECK(std::abs(lhs.a11 - rhs.a11) <= 1e-13);
    }

    SECTION("semigroup property over random parameters") {
        PathRng gen(314, 0);
        for (int trial = 0; trial < 200; ++trial) {
            const double a = 0.1 + 5.0 * gen.next_unit();
            const double n = 0.25 + 8.0 * gen.next_unit();
            const double s = 3.0 * gen.next_unit();
            const double t = 3.0 * gen.next_unit();
            const ModeOperator op = build_mode_operator(a, n);
            const Mat2c lhs = mode_exp(op, s + t);
            const Mat2c rhs = mode_exp(op, s) * mode_exp(op, t);
            const double scale = std::sqrt(frobenius_sq(lhs)) + 1e-300;
            REQUIRE(std::sqrt(frobenius_sq(lhs - rhs)) / scale <= 1e-12);
        }
    }

    CHECK_THROWS_AS(mode_exp(build_mode_operator(1.0, 1.0), -0.1), std::domain_error);
}

TEST_CASE("closed-form mode norms") {
    SECTION("n = 0 reduces to the scalar e^{-4at}") {
        CHECK(mode_norm_squared_closed(1.0, 0.0, 1.0).r_value == Approx(std::exp(-4.0)).epsilon(1e-12));
    }
    SECTION("t = 0 is exactly 1") {
        CHECK(mode_norm_squared_closed(2.0, 1.0, 0.0).r_value == 1.0);
        CHECK(mode_norm_squared_closed(0.3, 4.0, 0.0).r_value == 1.0);
        CHECK(mode_norm_squared_closed(1.0, 1.0, 0.0).r_value == 1.0);
    }
    SECTION("matches the SVD oracle on spot checks") {
        CHECK(mode_norm_squared_closed(2.0, 1.0, 1.0).r_value ==
              Approx(mode_norm_squared_oracle(2.0, 1.0, 1.0)).epsilon(1e-10));
        CHECK(mode_norm_squared_closed(0.5, 3.0, 2.1).r_value ==
              Approx(mode_norm_squared_oracle(0.5, 3.0, 2.1)).epsilon(1e-10));
        CHECK(mode_norm_squared_closed(1.0, 1.0, 5.0).r_value ==
              Approx(mode_norm_squared_oracle(1.0, 1.0, 5.0)).epsilon(1e-10));
    }
    SECTION("regime dispatch") {
        CHECK(mode_norm_squared_closed(2.0, 1.0, 1.0).regime == SpectralRegime::hyperbolic);
        CHECK(mode_norm_squared_closed(1.0, 1.0, 1.0).regime == SpectralRegime::critical);
        CHECK(mode_norm_squared_closed(1.0, 2.0, 1.0).regime == SpectralRegime::oscillatory);
        CHECK(mode_norm_squared_closed(2.0, 1.0, 1.0).gamma.has_value());
        CHECK(mode_norm_squared_closed(2.0, 1.0, 1.0).gamma.value() ==
              Approx(std::exp(-2.0 * std::sqrt(3.0))).epsilon(1e-12));
    }
    SECTION("regime continuity across the critical line") {
        // R depends on a through (a^2 - n^2) t^2, so crossing the line at
        // a = n +- da moves the value by about da (a+n) t^2 / 3; the 1e-4
        // agreement window therefore holds for moderate n t^2
        const double da = 1e-6;
        for (double n : {1.0, 3.0}) {
            for (double t : {0.3, 2.0, 11.0}) {
                const double crit = mode_norm_squared_closed(n, n, t).r_value;
                const double modulus = da * (2.0 * n) * t * t / 3.0;
                for (double sign : {1.0, -1.0}) {
                    const double near = mode_norm_squared_closed(n + sign * da, n, t).r_value;
                    REQUIRE(std::abs(near / crit - 1.0) <= 1.5 * modulus + 1e-7);
                }
                if (n * t * t <= 150.0) {
                    CHECK(mode_norm_squared_closed(n + da, n, t).r_value == Approx(crit).epsilon(1e-4));
                    CHECK(mode_norm_squared_closed(n - da, n, t).r_value == Approx(crit).epsilon(1e-4));
                }
            }
        }
    }
    SECTION("conjugation symmetry: mode -n equals mode n") {
        for (double n : {0.5, 1.0, 3.0}) {
            CHECK(mode_norm_squared_closed(1.3, -n, 0.9).r_value ==
                  mode_norm_squared_closed(1.3, n, 0.9).r_value);
        }
        // K_{-n} is the entrywise conjugate, so singular values coincide
        const ModeOperator op = build_mode_operator(1.3, 2.0);
        const Mat2c conj_block{std::conj(op.matrix.a00), std::conj(op.matrix.a01),
                               std::conj(op.matrix.a10), std::conj(op.matrix.a11)};
        CHECK(operator_norm_sq(expm_taylor(conj_block * 0.9)) ==
              Approx(operator_norm_sq(expm_taylor(op.matrix * 0.9))).epsilon(1e-13));
    }
}

TEST_CASE("oracle equivalence on a dense parameter grid") {
    // > 10^3 points covering all three regimes
    long checked = 0;
    for (double a : {0.2, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 5.0}) {
        for (double n : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.5, 8.0}) {
            for (int i = 0; i < 18; ++i) {
                const double t = 0.01 * std::pow(20.0 / 0.01, i / 17.0);
                const double closed = mode_norm_squared_closed(a, n, t).r_value;
                const double oracle = mode_norm_squared_oracle(a, n, t);
                REQUIRE(closed == Approx(oracle).epsilon(1e-9));
                ++checked;
            }
        }
    }
    CHECK(checked >= 1000);
}

TEST_CASE("monotone decay and small-time law per mode") {
    SECTION("non-increasing in t for a >= n") {
        for (auto [a, n] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {1.0, 1.0}, {3.0, 2.5}}) {
            double prev = 1.0;
            for (int i = 1; i <= 300; ++i) {
                const double t = 0.05 * i;
                const double r = mode_norm_squared_closed(a, n, t).r_value;
                REQUIRE(r <= prev * (1.0 + 1e-13));
                prev = r;
            }
        }
    }
    SECTION("oscillatory case bounded by the mode ceiling") {
        const double a = 0.5;
        for (double n : {1.0, 2.0, 5.0}) {
            const double cap = (n + a) / (n - a);
            for (int i = 1; i <= 200; ++i) {
                const double t = 0.07 * i;
                const double r = mode_norm_squared_closed(a, n, t).r_value;
                REQUIRE(r <= std::exp(-2.0 * a * t) * cap * (1.0 + 1e-12));
            }
        }
    }
    SECTION("cubic onset of 1 - R with coefficient a n^2 / 3 in every regime") {
        // the hyperbolic/critical/oscillatory branches share the same onset
        // law; cross-checked against the exponential oracle at small t
        auto fitted = [](double a, double n) {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < 12; ++i) {
                const double t = 1e-3 * std::pow(10.0, i / 11.0);
                const double deficit = 1.0 - mode_norm_squared_closed(a, n, t).r_value;
                num += deficit * t * t * t;
                den += std::pow(t, 6.0);
            }
            return num / den;
        };
        CHECK(fitted(2.0, 1.0) == Approx(2.0 / 3.0).epsilon(0.02));
        CHECK(fitted(1.0, 1.0) == Approx(1.0 / 3.0).epsilon(0.02));
        CHECK(fitted(3.0, 2.0) == Approx(4.0).epsilon(0.02));
        CHECK(fitted(0.5, 1.0) == Approx(0.5 / 3.0).epsilon(0.02));
        CHECK(fitted(0.5, 3.0) == Approx(1.5).epsilon(0.02));
        const double oracle_onset = (1.0 - mode_norm_squared_oracle(3.0, 1.0, 1e-3)) / 1e-9;
        CHECK(oracle_onset == Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("brownian mode limit") {
    const BrownianModeLimit lim = mode_norm_brownian_limit(1.0, 1.0);
    CHECK(lim.limit == Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(mode_norm_brownian_limit(2.0, 0.0).limit == 1.0);

    SECTION("finite-a value approaches the limit") {
        CHECK(std::abs(lim.rescaled_norm(100.0) - lim.limit) <= 2e-2);
        // monotone approach on sampled a
        double prev = std::abs(lim.rescaled_norm(10.0) - lim.limit);
        for (double a : {30.0, 100.0, 300.0, 1000.0}) {
            const double gap = std::abs(lim.rescaled_norm(a) - lim.limit);
            CHECK(gap <= prev);
            prev = gap;
        }
    }
}
