#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "volteface/discrete_chain.hpp"
#include "volteface/mode_core.hpp"
#include "volteface/potential.hpp"
#include "volteface/rng.hpp"

namespace volteface {

// ---------------------------------------------------------------------------
// Event-driven simulation of the telegraph process (flat and tilted by a
// potential) and of the persistent walk, plus Monte Carlo estimates of the
// semigroup expectations the closed forms predict. Paths are data-parallel;
// each path draws from its own (master_seed, path_index)-keyed stream, so a
// batch is a pure function of its parameters regardless of worker count.
// ---------------------------------------------------------------------------

struct BatchParams {
    std::uint64_t master_seed = 0;
    int n_paths = 1;
    int n_threads = 1;
    bool record_events = false;  ///< keep per-path jump times

    void validate() const {
        if (n_paths < 1) throw std::domain_error("pdmp_sim: need at least one path");
        if (n_threads < 1) throw std::domain_error("pdmp_sim: need at least one worker");
    }
};

struct TrajectoryBatch {
    std::uint64_t master_seed = 0;
    double horizon = 0.0;             ///< time T (continuous) or step count (chain)
    std::vector<double> x;            ///< terminal positions; sites for the chain
    std::vector<signed char> y;       ///< terminal velocities, +1/-1
    std::vector<std::vector<double>> events;  ///< per-path jump/flip times if recorded

    int n_paths() const { return static_cast<int>(x.size()); }
};

namespace detail {

template <typename PerPath>
inline void run_paths(int n_paths, int n_threads, PerPath&& body) {
    if (n_threads <= 1) {
        for (int i = 0; i < n_paths; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < n_paths; i += n_threads) body(i);
        });
    }
    for (auto& th : workers) th.join();
}

inline double wrap_angle(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

}  // namespace detail

/// Telegraph process on the circle: velocity +-1 flipping at Poisson rate a,
/// position the wrapped integral of the velocity.
inline TrajectoryBatch simulate_flat(double a, double x0, int y0, double horizon, const BatchParams& params) {
    if (!(a > 0.0)) throw std::domain_error("pdmp_sim: flip rate a must be positive");
    if (!(horizon >= 0.0)) throw std::domain_error("pdmp_sim: horizon must be nonnegative");
    if (y0 != 1 && y0 != -1) throw std::domain_error("pdmp_sim: velocity must be +1 or -1");
    params.validate();

    TrajectoryBatch batch;
    batch.master_seed = params.master_seed;
    batch.horizon = horizon;
    batch.x.resize(static_cast<std::size_t>(params.n_paths));
    batch.y.resize(static_cast<std::size_t>(params.n_paths));
    if (params.record_events) batch.events.resize(static_cast<std::size_t>(params.n_paths));

    detail::run_paths(params.n_paths, params.n_threads, [&](int i) {
        PathRng rng(params.master_seed, static_cast<std::uint64_t>(i));
        double t = 0.0;
        double x = x0;
        int y = y0;
        std::vector<double>* log = params.record_events ? &batch.events[static_cast<std::size_t>(i)] : nullptr;
        for (;;) {
            const double wait = rng.next_exponential(a);
            if (t + wait >= horizon) {
                x += y * (horizon - t);
                break;
            }
            t += wait;
            x += y * wait;
            y = -y;
            if (log) log->push_back(t);
        }
        batch.x[static_cast<std::size_t>(i)] = detail::wrap_angle(x);
        batch.y[static_cast<std::size_t>(i)] = static_cast<signed char>(y);
    });
    return batch;
}

/// Tilted process dX = Y e^{V(X)} dt, simulated exactly through the time
/// change: the image W = Phi(X) is the flat process on a circle of
/// circumference Phi(2 pi), so the only numerical error is the Phi-inverse
/// root-finding tolerance. Under a shared seed the image paths coincide with
/// simulate_flat's paths (up to that circumference).
inline TrajectoryBatch simulate_with_potential(const Potential& pot, double a, double x0, int y0,
                                               double horizon, const BatchParams& params) {
    if (!(a > 0.0)) throw std::domain_error("pdmp_sim: flip rate a must be positive");
    if (!(horizon >= 0.0)) throw std::domain_error("pdmp_sim: horizon must be nonnegative");
    if (y0 != 1 && y0 != -1) throw std::domain_error("pdmp_sim: velocity must be +1 or -1");
    params.validate();

    TrajectoryBatch batch;
    batch.master_seed = params.master_seed;
    batch.horizon = horizon;
    batch.x.resize(static_cast<std::size_t>(params.n_paths));
    batch.y.resize(static_cast<std::size_t>(params.n_paths));
    if (params.record_events) batch.events.resize(static_cast<std::size_t>(params.n_paths));

    const double w0 = pot.phi(x0);
    const double total = pot.phi_total();

    detail::run_paths(params.n_paths, params.n_threads, [&](int i) {
        PathRng rng(params.master_seed, static_cast<std::uint64_t>(i));
        double t = 0.0;
        double w = w0;
        int y = y0;
        std::vector<double>* log = params.record_events ? &batch.events[static_cast<std::size_t>(i)] : nullptr;
        for (;;) {
            const double wait = rng.next_exponential(a);
            if (t + wait >= horizon) {
                w += y * (horizon - t);
                break;
            }
            t += wait;
            w += y * wait;
            y = -y;
            if (log) log->push_back(t);
        }
        double wr = std::fmod(w, total);
        if (wr < 0.0) wr += total;
        batch.x[static_cast<std::size_t>(i)] = pot.phi_inverse(wr);
        batch.y[static_cast<std::size_t>(i)] = static_cast<signed char>(y);
    });
    return batch;
}

/// Persistent walk on Z_N x {+1,-1}: position moves by the pre-flip velocity,
/// then the velocity flips with probability (1-alpha)/2. Event log records the
/// (1-based) step indices at which flips occurred.
inline TrajectoryBatch simulate_chain(const ChainSpec& spec, int x0, int y0, long long n_steps,
                                      const BatchParams& params) {
    if (n_steps < 0) throw std::domain_error("pdmp_sim: step count must be nonnegative");
    if (y0 != 1 && y0 != -1) throw std::domain_error("pdmp_sim: velocity must be +1 or -1");
    params.validate();

    TrajectoryBatch batch;
    batch.master_seed = params.master_seed;
    batch.horizon = static_cast<double>(n_steps);
    batch.x.resize(static_cast<std::size_t>(params.n_paths));
    batch.y.resize(static_cast<std::size_t>(params.n_paths));
    if (params.record_events) batch.events.resize(static_cast<std::size_t>(params.n_paths));

    const double flip_p = spec.flip_probability();
    const int n_sites = spec.n_sites;
    const int start = ((x0 % n_sites) + n_sites) % n_sites;

    detail::run_paths(params.n_paths, params.n_threads, [&](int i) {
        PathRng rng(params.master_seed, static_cast<std::uint64_t>(i));
        int x = start;
        int y = y0;
        std::vector<double>* log = params.record_events ? &batch.events[static_cast<std::size_t>(i)] : nullptr;
        for (long long s = 0; s < n_steps; ++s) {
            x += y;
            if (x < 0) x += n_sites;
            if (x >= n_sites) x -= n_sites;
            if (rng.next_bernoulli(flip_p)) {
                y = -y;
                if (log) log->push_back(static_cast<double>(s + 1));
            }
        }
        batch.x[static_cast<std::size_t>(i)] = static_cast<double>(x);
        batch.y[static_cast<std::size_t>(i)] = static_cast<signed char>(y);
    });
    return batch;
}

struct McEstimate {
    complexd value{};
    double std_error = 0.0;  ///< sample standard deviation of the observable / sqrt(n)
    int n_paths = 0;
};

/// Mean of e^{i freq x} g(y) over a batch; g is given by its two values.
/// For the chain pass freq = 2 pi k / N (positions are site indices).
inline McEstimate estimate_mode_statistic(const TrajectoryBatch& batch, double freq, complexd g_plus,
                                          complexd g_minus) {
    const std::size_t n = batch.x.size();
    if (n == 0) throw std::domain_error("pdmp_sim: empty batch");
    complexd sum{};
    for (std::size_t i = 0; i < n; ++i) {
        const complexd g = (batch.y[i] > 0) ? g_plus : g_minus;
        sum += std::polar(1.0, freq * batch.x[i]) * g;
    }
    const complexd mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const complexd g = (batch.y[i] > 0) ? g_plus : g_minus;
        var += std::norm(std::polar(1.0, freq * batch.x[i]) * g - mean);
    }
    var /= static_cast<double>(n > 1 ? n - 1 : 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), static_cast<int>(n)};
}

struct BrownianCheck {
    McEstimate estimate;       ///< empirical E[e^{i n X_{a t}}]
    complexd closed_form{};    ///< finite-a prediction from the mode block exponential
    double limit = 1.0;        ///< e^{-n^2 t / 2}
    double gap_to_limit = 0.0;
    double gap_to_closed = 0.0;
};

/// Diffusive-limit check: at flip rate a, horizon a t, the mode-n characteristic
/// function of the position approaches the heat kernel value e^{-n^2 t / 2}.
inline BrownianCheck brownian_scaling_check(double a, int n, double t, const BatchParams& params,
                                            double x0 = 0.0, int y0 = 1) {
    if (n < 1) throw std::domain_error("pdmp_sim: mode n must be a positive integer");
    BrownianCheck out;
    const TrajectoryBatch batch = simulate_flat(a, x0, y0, a * t, params);
    out.estimate = estimate_mode_statistic(batch, static_cast<double>(n), 1.0, 1.0);
    if (a * t == 0.0) {
        out.closed_form = std::polar(1.0, n * x0);
    } else {
        const Mat2c exp_block = mode_exp(build_mode_operator(a, static_cast<double>(n)), a * t);
        const auto [top, bottom] = exp_block.apply(1.0, 1.0);  // e^{T K_n} applied to g = 1
        out.closed_form = std::polar(1.0, n * x0) * (y0 > 0 ? top : bottom);
    }
    out.limit = std::exp(-0.5 * static_cast<double>(n) * n * t);
    out.gap_to_limit = std::abs(out.estimate.value - complexd{out.limit, 0.0});
    out.gap_to_closed = std::abs(out.estimate.value - out.closed_form);
    return out;
}

}  // namespace volteface
