#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "volteface/global_norm.hpp"
#include "volteface/numerics.hpp"

namespace volteface {

// ---------------------------------------------------------------------------
// Periodic potentials on the circle. A potential V tilts the invariant law to
// e^{-V(x)} dx / (2 pi Z) and the process moves at speed e^{V}; the monotone
// time change Phi(x) = integral_0^x e^{-V} conjugates it back to the flat
// process, so every norm question reduces to the flat one with the effective
// parameters (a Z, t / Z).
//
// V is tabulated on a uniform 2^m-point grid; e^{-V} is interpolated linearly,
// which makes Phi an exactly integrable piecewise quadratic and keeps the
// inverse self-consistent with the forward map.
// ---------------------------------------------------------------------------

class Potential;
struct NormalizedPotential;
inline Potential shifted_copy(const Potential&, double);
inline NormalizedPotential normalize_potential(const Potential&);

class Potential {
  public:
    // 2^16 nodes: the piecewise-linear weight gives interior Phi values an
    // O(h^2) error, and the eigenfunction phases need it below 1e-8
    static constexpr std::size_t default_grid = 65536;

    static Potential zero(std::size_t grid = default_grid) {
        return from_function([](double) { return 0.0; }, grid);
    }

    /// V(x) = amplitude * cos(x).
    static Potential cosine(double amplitude = 1.0, std::size_t grid = default_grid) {
        return from_function([amplitude](double x) { return amplitude * std::cos(x); }, grid);
    }

    /// V(x) = sum_j cos_coeffs[j] cos((j+1) x) + sin_coeffs[j] sin((j+1) x).
    static Potential trig_poly(const std::vector<double>& cos_coeffs, const std::vector<double>& sin_coeffs,
                               std::size_t grid = default_grid) {
        return from_function(
            [&](double x) {
                double v = 0.0;
                for (std::size_t j = 0; j < cos_coeffs.size(); ++j) v += cos_coeffs[j] * std::cos((j + 1) * x);
                for (std::size_t j = 0; j < sin_coeffs.size(); ++j) v += sin_coeffs[j] * std::sin((j + 1) * x);
                return v;
            },
            grid);
    }

    static Potential from_function(const std::function<double(double)>& v, std::size_t grid = default_grid) {
        std::vector<double> values(grid);
        for (std::size_t j = 0; j < grid; ++j) values[j] = v(two_pi * static_cast<double>(j) / grid);
        return Potential(std::move(values));
    }

    /// Two-column samples (x, V(x)) covering [0, 2 pi], x ascending. The samples
    /// are interpolated onto the uniform grid; V(0) and V(2 pi) must agree to
    /// quadrature tolerance (the curve must close up).
    static Potential from_samples(const std::vector<std::pair<double, double>>& samples,
                                  std::size_t grid = default_grid) {
        if (samples.size() < 2) throw std::invalid_argument("potential: need at least two samples");
        for (const auto& [x, v] : samples)
            if (!std::isfinite(x) || !std::isfinite(v))
                throw std::invalid_argument("potential: samples must be finite");
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i].first > samples[i - 1].first))
                throw std::invalid_argument("potential: sample abscissae must be strictly increasing");
        if (samples.front().first > 1e-9 || samples.back().first < two_pi - 1e-9)
            throw std::invalid_argument("potential: samples must cover [0, 2 pi]");
        if (std::abs(samples.front().second - samples.back().second) > 1e-6)
            throw std::invalid_argument("potential: V(0) and V(2 pi) must match (periodicity)");

        std::vector<double> values(grid);
        std::size_t seg = 0;
        for (std::size_t j = 0; j < grid; ++j) {
            const double x = two_pi * static_cast<double>(j) / grid;
            while (seg + 2 < samples.size() && samples[seg + 1].first < x) ++seg;
            const auto& [x0, v0] = samples[seg];
            const auto& [x1, v1] = samples[seg + 1];
            const double w = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
            values[j] = v0 + w * (v1 - v0);
        }
        return Potential(std::move(values));
    }

    std::size_t grid_size() const { return values_.size(); }
    double z() const { return z_; }
    double phi_total() const { return phi_.back(); }  ///< Phi(2 pi) = 2 pi Z

    /// V(x), linear interpolation, periodic in x.
    double value(double x) const {
        const auto [j, frac] = locate(x);
        const double v0 = values_[j];
        const double v1 = values_[(j + 1) % values_.size()];
        return v0 + frac * (v1 - v0);
    }

    /// e^{-V(x)} as the piecewise-linear interpolant actually integrated by phi().
    double weight(double x) const {
        const auto [j, frac] = locate(x);
        const double w0 = weights_[j];
        const double w1 = weights_[(j + 1) % weights_.size()];
        return w0 + frac * (w1 - w0);
    }

    /// Phi(x) = integral_0^x e^{-V}; strictly increasing, Phi(x + 2 pi) = Phi(x) + 2 pi Z.
    double phi(double x) const {
        const double wraps = std::floor(x / two_pi);
        const double xr = x - wraps * two_pi;
        const double h = two_pi / static_cast<double>(values_.size());
        const std::size_t j = std::min(static_cast<std::size_t>(xr / h), values_.size() - 1);
        const double xi = xr - static_cast<double>(j) * h;
        const double w0 = weights_[j];
        const double w1 = weights_[(j + 1) % weights_.size()];
        const double local = xi * w0 + 0.5 * xi * xi * (w1 - w0) / h;
        return wraps * phi_.back() + phi_[j] + local;
    }

    /// Inverse of phi on one period by monotone bisection (|x| error <= 1e-13).
    double phi_inverse(double w) const {
        const double total = phi_.back();
        const double wraps = std::floor(w / total);
        const double wr = w - wraps * total;
        // bracket by the precomputed node values, then bisect inside one cell
        const auto it = std::upper_bound(phi_.begin(), phi_.end(), wr);
        std::size_t j = (it == phi_.begin()) ? 0 : static_cast<std::size_t>(it - phi_.begin()) - 1;
        j = std::min(j, values_.size() - 1);
        const double h = two_pi / static_cast<double>(values_.size());
        double lo = static_cast<double>(j) * h;
        double hi = lo + h;
        for (int iter = 0; iter < 60 && hi - lo > 1e-13; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (phi(mid) < wr)
                lo = mid;
            else
                hi = mid;
        }
        return wraps * two_pi + 0.5 * (lo + hi);
    }

    /// Trapezoid quadrature of f over [0, 2 pi) against dx (periodic, equal weights).
    template <typename F>
    auto integrate(F&& f) const {
        const double h = two_pi / static_cast<double>(values_.size());
        using R = decltype(f(0.0));
        R acc{};
        for (std::size_t j = 0; j < values_.size(); ++j) acc += f(two_pi * static_cast<double>(j) / values_.size());
        return acc * h;
    }

    const std::vector<double>& samples() const { return values_; }

  private:
    explicit Potential(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 8) throw std::invalid_argument("potential: grid too coarse");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("potential: non-finite sample");
        weights_.resize(values_.size());
        for (std::size_t j = 0; j < values_.size(); ++j) weights_[j] = std::exp(-values_[j]);
        const double h = two_pi / static_cast<double>(values_.size());
        phi_.resize(values_.size() + 1);
        phi_[0] = 0.0;
        double sum = 0.0, comp = 0.0;  // Kahan: prefix sums stay accurate on fine grids
        for (std::size_t j = 0; j < values_.size(); ++j) {
            const double w1 = weights_[(j + 1) % weights_.size()];
            const double term = 0.5 * h * (weights_[j] + w1) - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
            phi_[j + 1] = sum;
        }
        z_ = phi_.back() / two_pi;
        if (!(z_ > 0.0) || !std::isfinite(z_)) throw std::invalid_argument("potential: normalization constant must be positive");
    }

    std::pair<std::size_t, double> locate(double x) const {
        const double xr = x - std::floor(x / two_pi) * two_pi;
        const double h = two_pi / static_cast<double>(values_.size());
        std::size_t j = std::min(static_cast<std::size_t>(xr / h), values_.size() - 1);
        return {j, (xr - static_cast<double>(j) * h) / h};
    }

    friend Potential shifted_copy(const Potential&, double);
    friend NormalizedPotential normalize_potential(const Potential&);

    std::vector<double> values_;
    std::vector<double> weights_;  ///< e^{-V} at nodes
    std::vector<double> phi_;      ///< cumulative integral of the interpolated weight
    double z_ = 1.0;
};

inline Potential shifted_copy(const Potential& pot, double shift) {
    std::vector<double> values = pot.values_;
    for (double& v : values) v += shift;
    return Potential(std::move(values));
}

struct NormalizedPotential {
    Potential potential;   ///< shifted so Z = 1
    double original_z = 1.0;
};

/// Shift V by log Z so the tilted measure has unit mass. The recomputed Z of
/// the shifted potential must land within 1e-10 of 1; it is then pinned to
/// exactly 1.0, so downstream effective parameters (a Z, t / Z) reduce to the
/// flat ones bit for bit.
inline NormalizedPotential normalize_potential(const Potential& raw) {
    const double z = raw.z();
    Potential shifted = shifted_copy(raw, std::log(z));
    if (std::abs(shifted.z() - 1.0) > 1e-10)
        throw std::runtime_error("potential: normalization failed to reach Z = 1");
    shifted.z_ = 1.0;
    return NormalizedPotential{std::move(shifted), z};
}

/// <g_n, g_k> in L^2 of the tilted probability measure, reported unnormalized
/// by 2 pi: (1/Z) integral over [0, 2 pi] of e^{i (n - k) Phi(x)/Z} e^{-V(x)} dx
/// = 2 pi delta_{nk}. The phase scales Phi by 2 pi / Phi(2 pi), so the identity
/// also holds for potentials known only up to an additive constant.
inline complexd eigenfunction_overlap(const Potential& pot, int n, int k) {
    const double freq = static_cast<double>(n - k) * two_pi / pot.phi_total();
    return pot.integrate([&](double x) {
               return std::polar(pot.weight(x), freq * pot.phi(x));
           }) /
           pot.z();
}

/// ||P^V_t - mu||: the time change conjugates the tilted process to the flat
/// one with block Z^{-1} K_n^{(a Z)}, i.e. the flat norm at (a Z, t / Z).
inline double norm_with_potential(const Potential& pot, double a, double t) {
    return global_operator_norm(a * pot.z(), t / pot.z());
}

/// Flip rate maximizing the asymptotic decay rate: 1/Z (= 1 when normalized).
inline double optimal_rate_parameter(const Potential& pot) { return 1.0 / pot.z(); }

struct ProductNormResult {
    double product = 1.0;          ///< product of per-coordinate distances (tensor-sector norm)
    double max_coordinate = 0.0;   ///< true d-dimensional ||P_t - mu||: max over coordinates
};

/// Separable potentials in dimension d: the semigroup factorizes over
/// coordinates. On the all-coordinates mean-zero sector the norm is the product
/// of the per-coordinate distances; the full distance to equilibrium is their
/// maximum (each factor is <= 1, so singletons dominate the sector supremum).
inline ProductNormResult product_norm(const std::vector<Potential>& potentials, double a, double t) {
    if (potentials.empty()) throw std::domain_error("potential: product norm needs at least one coordinate");
    ProductNormResult out;
    for (const Potential& pot : potentials) {
        const double norm = norm_with_potential(pot, a, t);
        out.product *= norm;
        out.max_coordinate = std::max(out.max_coordinate, norm);
    }
    return out;
}

}  // namespace volteface
