#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "volteface/global_norm.hpp"
#include "volteface/mode_core.hpp"
#include "volteface/numerics.hpp"

namespace volteface {

// ---------------------------------------------------------------------------
// Order-2 persistent walk on Z_N x {+1,-1}: keep direction with probability
// (1+alpha)/2, flip otherwise; the position moves by the pre-flip velocity.
// Fourier planes W_k are invariant, so norms again reduce to 2x2 blocks. The
// roles of (a, n) are played by the derived constants
//     C_0 = 2 sqrt(alpha)/(1+alpha),  S_0 = (1-alpha)/(1+alpha),
//     C_k + i S_k = e^{2 i k pi / N},  alpha_k = (1-|S_k|)/(1+|S_k|),
// with the regime decided by the sign of alpha - alpha_k.
// ---------------------------------------------------------------------------

struct ChainSpec {
    int n_sites = 3;     ///< N, odd and >= 3 (irreducible aperiodic)
    double alpha = 0.0;  ///< persistence, in [0, 1)

    ChainSpec(int n, double alpha_) : n_sites(n), alpha(alpha_) {
        if (n_sites < 3 || n_sites % 2 == 0)
            throw std::domain_error("discrete_chain: N must be an odd integer >= 3");
        if (!(alpha >= 0.0 && alpha < 1.0))
            throw std::domain_error("discrete_chain: alpha must lie in [0, 1)");
    }

    double flip_probability() const { return 0.5 * (1.0 - alpha); }
    double c_k(int k) const { return std::cos(two_pi * k / n_sites); }
    double s_k(int k) const { return std::sin(two_pi * k / n_sites); }
    double c0() const { return 2.0 * std::sqrt(alpha) / (1.0 + alpha); }
    double s0() const { return (1.0 - alpha) / (1.0 + alpha); }
    double alpha_k(int k) const {
        const double s = std::abs(s_k(k));
        return (1.0 - s) / (1.0 + s);
    }
    int top_mode() const { return n_sites / 2; }
};

/// Action of one step on W_k: g(y) -> e^{2 i pi k y / N} ((1+alpha)/2 g(y) + (1-alpha)/2 g(-y)),
/// in the basis (indicator of y=+1, indicator of y=-1).
inline Mat2c mode_block(const ChainSpec& spec, int k) {
    if (k < 0 || k > spec.n_sites - 1)
        throw std::domain_error("discrete_chain: mode index out of range");
    const double theta = two_pi * k / spec.n_sites;
    const complexd up = std::polar(1.0, theta);
    const complexd dn = std::polar(1.0, -theta);
    const double keep = 0.5 * (1.0 + spec.alpha);
    const double flip = 0.5 * (1.0 - spec.alpha);
    return {up * keep, up * flip, dn * flip, dn * keep};
}

struct DiscreteModeNorm {
    long long n_steps = 0;
    int k = 0;
    double r_value = 1.0;  ///< squared restricted norm R_N(n, alpha, k)
    SpectralRegime regime = SpectralRegime::critical;
};

/// Closed-form R_N(n, alpha, k) = ||M_alpha^n||^2 on W_k, k = 1..N-1 (k and N-k
/// are conjugate blocks and coincide). Sign conventions enter only through
/// |S_k| and |C_k|; the dense oracle in the test suite arbitrates that choice.
/// Branches mirror the continuous ones and use the same cancellation-free
/// groupings. alpha = 0 makes the block rank one (B^2 = C_k B), handled exactly.
inline DiscreteModeNorm discrete_mode_norm_closed(const ChainSpec& spec, int k, long long n_steps) {
    if (k < 1 || k > spec.n_sites - 1)
        throw std::domain_error("discrete_chain: closed form needs 1 <= k <= N-1");
    if (n_steps < 0) throw std::domain_error("discrete_chain: step count must be nonnegative");
    k = std::min(k, spec.n_sites - k);

    DiscreteModeNorm res;
    res.n_steps = n_steps;
    res.k = k;
    if (n_steps == 0) {
        res.r_value = 1.0;
        res.regime = classify_regime(spec.alpha, spec.alpha_k(k));
        return res;
    }

    const double alpha = spec.alpha;
    const double n = static_cast<double>(n_steps);

    if (alpha == 0.0) {
        // isotropic walk: block is rank one, ||B^n|| = |C_k|^{n-1}
        const double ck = std::abs(spec.c_k(k));
        res.r_value = std::pow(ck, 2.0 * (n - 1.0));
        res.regime = SpectralRegime::hyperbolic;
        return res;
    }

    const double sk = std::abs(spec.s_k(k));
    const double ck = std::abs(spec.c_k(k));
    const double c0 = spec.c0();
    const double s0 = spec.s0();
    const double ak = spec.alpha_k(k);
    const double tol = 1e-9 * std::max(alpha, ak);

    if (std::abs(alpha - ak) <= tol) {
        // critical: 1 + 2/(sqrt(1 + (C_0/(S_0 n))^2) - 1) = 1 + 2u^2 + 2u sqrt(1+u^2)
        const double u = s0 * n / c0;
        res.r_value = std::exp(n * std::log(alpha)) * (1.0 + 2.0 * u * u + 2.0 * u * std::sqrt(1.0 + u * u));
        res.regime = SpectralRegime::critical;
        return res;
    }

    if (alpha < ak) {
        // real eigenvalues sqrt(alpha) (c +- sqrt(c^2-1)), c = |C_k|/C_0 > 1
        const double c = ck / c0;
        const double split = std::sqrt((ck - c0) * (ck + c0)) / c0;  // sqrt(c^2 - 1)
        const double log_ratio = -2.0 * std::log(c + split);         // log(lambda_-/lambda_+)
        const double gamma = std::exp(n * log_ratio);
        const double one_minus_gamma = -std::expm1(n * log_ratio);
        const double q = (1.0 + gamma) / one_minus_gamma;
        const double r0 = s0 / sk;  // > 1 in this regime
        const double omega_sq = (s0 - sk) * (s0 + sk) / (sk * sk);
        const double wq = std::sqrt(omega_sq) * q;
        const double denom = omega_sq * q + r0 * sqrt1pm1(wq * wq) + (r0 - 1.0);
        const double lead = std::exp(n * (std::log(alpha) + 2.0 * std::log(c + split)));  // lambda_+^{2n}
        res.r_value = lead * (1.0 + 2.0 / denom);
        res.regime = SpectralRegime::hyperbolic;
        return res;
    }

    // complex eigenvalues sqrt(alpha) e^{+-i psi}, tan(psi) = sqrt((C_0/C_k)^2 - 1)
    const double psi = std::atan2(std::sqrt((c0 - ck) * (c0 + ck)), ck);
    const double sh = std::sin(n * psi);
    const double one_minus_cos = 2.0 * sh * sh;  // 1 - cos(2 n psi)
    double g = 1.0;
    if (one_minus_cos > 0.0) {
        const double x = 2.0 * (sk - s0) * (sk + s0) / (s0 * s0 * one_minus_cos);
        g = 1.0 + 2.0 / sqrt1pm1(x);
    }
    res.r_value = std::exp(n * std::log(alpha)) * g;
    res.regime = SpectralRegime::oscillatory;
    return res;
}

/// ||M_alpha^n - mu_N|| on L^2 of the uniform measure: max over Fourier planes.
/// k = 0 contributes alpha^{2n} (squared) through the odd velocity functions.
/// With exclude_top_modes the planes W_{+-floor(N/2)} are dropped, which is the
/// restriction under which the discrete norms converge to the continuous ones.
inline double discrete_global_norm(const ChainSpec& spec, long long n_steps, bool exclude_top_modes = false) {
    if (n_steps < 0) throw std::domain_error("discrete_chain: step count must be nonnegative");
    if (n_steps == 0) return 1.0;
    const int k_max = exclude_top_modes ? spec.top_mode() - 1 : spec.top_mode();
    double best_sq = (spec.alpha > 0.0)
                         ? std::exp(2.0 * static_cast<double>(n_steps) * std::log(spec.alpha))
                         : 0.0;  // k = 0
    for (int k = 1; k <= k_max; ++k)
        best_sq = std::max(best_sq, discrete_mode_norm_closed(spec, k, n_steps).r_value);
    return std::sqrt(best_sq);
}

struct PersistenceSummary {
    double alpha_opt = 0.0;  ///< (1 - sin(pi/N)) / (1 + sin(pi/N))
    double lambda_opt = 0.0; ///< sqrt(alpha_opt), best asymptotic modulus
    double lambda_iso = 0.0; ///< cos(pi/N), isotropic walk
};

inline PersistenceSummary optimal_persistence(int n_sites) {
    if (n_sites < 3 || n_sites % 2 == 0)
        throw std::domain_error("discrete_chain: N must be an odd integer >= 3");
    const double s = std::sin(pi / n_sites);
    PersistenceSummary out;
    out.alpha_opt = (1.0 - s) / (1.0 + s);
    out.lambda_opt = std::sqrt(out.alpha_opt);
    out.lambda_iso = std::cos(pi / n_sites);
    return out;
}

/// Largest eigenvalue modulus of M_alpha over ker(mu_N): max over the blocks
/// W_1..W_floor(N/2) plus the alpha eigenvalue at k = 0. The discriminant
/// tau^2 - 4 alpha is evaluated in the factored form (1-alpha)^2 - (1+alpha)^2 S_k^2
/// and a band of width 1e-10 around zero is treated as a double root of modulus
/// sqrt(alpha): rounding of alpha alone already perturbs the true split by
/// ~sqrt(eps), so a literal fp split inside that band is noise.
inline double subdominant_spectral_radius(const ChainSpec& spec) {
    double best = spec.alpha;  // k = 0, odd velocity functions
    for (int k = 1; k <= spec.top_mode(); ++k) {
        const double sk = std::abs(spec.s_k(k));
        const double one_m = 1.0 - spec.alpha;
        const double one_p = 1.0 + spec.alpha;
        const double disc = (one_m - one_p * sk) * (one_m + one_p * sk);
        const double abs_tau = one_p * std::abs(spec.c_k(k));
        double radius;
        if (std::abs(disc) <= 1e-10 * std::max(abs_tau * abs_tau, 4.0 * spec.alpha) || disc < 0.0) {
            radius = std::sqrt(spec.alpha);
        } else {
            radius = 0.5 * (abs_tau + std::sqrt(disc));
        }
        best = std::max(best, radius);
    }
    return best;
}

enum class LimitTarget {
    low_mode,  ///< fixed k, continuum target R(t, a, k)
    top_mode,  ///< floor(N/2) - k, continuum target R(t, a, k + 1/2)
};

struct LimitRow {
    long long n_sites = 0;
    double alpha = 0.0;
    long long n_steps = 0;
    int mode_index = 0;
    double target_mode = 0.0;
    double discrete_r = 0.0;
    double continuum_r = 0.0;
    double abs_error = 0.0;
};

/// Persistence schedule alpha^(N) = 1 - 4 pi a / N, which sends the per-step
/// flip probability (1-alpha)/2 to rate a under the time scale n = N t / (2 pi).
inline double continuum_alpha(double a, long long n_sites) {
    const double alpha = 1.0 - 4.0 * pi * a / static_cast<double>(n_sites);
    return std::clamp(alpha, 0.0, 1.0 - 1e-15);
}

/// Convergence table of the discrete per-mode norms to their continuum targets.
/// Low modes W_k converge to R(t,a,k); top modes W_{floor(N/2)-k} converge to
/// R(t,a,k+1/2), the half-integer shift coming from sin((2 pi/N)(floor(N/2)-k))
/// = sin((2 pi/N)(k+1/2)).
inline std::vector<LimitRow> continuum_limit_check(double a, int k, double t,
                                                   const std::vector<long long>& n_list,
                                                   LimitTarget target = LimitTarget::low_mode) {
    if (!(a > 0.0)) throw std::domain_error("discrete_chain: flip rate a must be positive");
    if (k < 0) throw std::domain_error("discrete_chain: mode k must be nonnegative");
    if (target == LimitTarget::low_mode && k < 1)
        throw std::domain_error("discrete_chain: low-mode check needs k >= 1");
    if (!(t >= 0.0)) throw std::domain_error("discrete_chain: time t must be nonnegative");

    std::vector<LimitRow> rows;
    rows.reserve(n_list.size());
    for (long long n_sites : n_list) {
        if (n_sites < 3 || n_sites % 2 == 0)
            throw std::domain_error("discrete_chain: N list must contain odd integers >= 3");
        LimitRow row;
        row.n_sites = n_sites;
        row.alpha = continuum_alpha(a, n_sites);
        row.n_steps = static_cast<long long>(std::floor(static_cast<double>(n_sites) * t / two_pi));
        const ChainSpec spec(static_cast<int>(n_sites), row.alpha);
        row.mode_index = (target == LimitTarget::low_mode) ? k : spec.top_mode() - k;
        row.target_mode = (target == LimitTarget::low_mode) ? static_cast<double>(k)
                                                            : static_cast<double>(k) + 0.5;
        row.discrete_r = (row.n_steps == 0)
                             ? 1.0
                             : discrete_mode_norm_closed(spec, row.mode_index, row.n_steps).r_value;
        row.continuum_r = mode_norm_squared_closed(a, row.target_mode, t).r_value;
        row.abs_error = std::abs(row.discrete_r - row.continuum_r);
        rows.push_back(row);
    }
    return rows;
}

/// Continuum limit of the discrete global norm. With the top planes kept the
/// half-integer modes join the spectrum and n = 1/2 dominates once a >= 1/2;
/// with the top planes removed the limit is the flat-torus global norm.
inline double continuum_target_norm(double a, double t, bool include_top_planes) {
    if (!(a > 0.0)) throw std::domain_error("discrete_chain: flip rate a must be positive");
    if (!(t >= 0.0)) throw std::domain_error("discrete_chain: time t must be nonnegative");
    if (t == 0.0) return 1.0;
    if (!include_top_planes) return global_operator_norm(a, t);
    if (a >= 0.5) return std::sqrt(mode_norm_squared_closed(a, 0.5, t).r_value);
    return std::exp(-a * t) * std::sqrt(envelope_g(a, t, ModeLattice::with_half_integers).g_value);
}

}  // namespace volteface
