#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace volteface {

// Simultaneous approximation of a common time by integer multiples of given
// periods. Existence is guaranteed by a Minkowski lattice-point argument; the
// search below is the certifiable one-dimensional version of it: walk the
// integer multiples of the largest period and test the nearest multiples of
// the others. Every reported residual is checked literally, and exhaustion of
// the candidate budget is reported rather than masked.

struct SimultaneousHit {
    double t = 0.0;
    std::vector<long long> multipliers;  ///< k_i with |k_i T_i - t| < delta
    std::vector<double> residuals;
};

struct SearchOutcome {
    std::optional<SimultaneousHit> hit;
    std::uint64_t candidates_tried = 0;
    std::uint64_t budget = 0;

    bool found() const { return hit.has_value(); }
};

inline SearchOutcome find_simultaneous_time(const std::vector<double>& periods, double delta,
                                            double t_min = 1.0, std::uint64_t budget = 20'000'000) {
    if (periods.empty()) throw std::domain_error("diophantine: at least one period required");
    for (double p : periods)
        if (!(p > 0.0) || !std::isfinite(p)) throw std::domain_error("diophantine: periods must be positive");
    if (!(delta > 0.0)) throw std::domain_error("diophantine: delta must be positive");
    if (!(t_min >= 1.0)) throw std::domain_error("diophantine: t_min must be at least 1");

    SearchOutcome out;
    out.budget = budget;

    const std::size_t anchor =
        static_cast<std::size_t>(std::max_element(periods.begin(), periods.end()) - periods.begin());
    const double t_anchor = periods[anchor];

    long long k = static_cast<long long>(std::ceil(t_min / t_anchor));
    if (k < 1) k = 1;

    std::vector<long long> mult(periods.size(), 0);
    std::vector<double> res(periods.size(), 0.0);

    for (; out.candidates_tried < budget; ++k) {
        ++out.candidates_tried;
        const double t = static_cast<double>(k) * t_anchor;
        bool ok = true;
        for (std::size_t i = 0; i < periods.size() && ok; ++i) {
            if (i == anchor) {
                mult[i] = k;
                res[i] = 0.0;
                continue;
            }
            long long ki = std::llround(t / periods[i]);
            if (ki < 1) ki = 1;
            const double r = std::abs(static_cast<double>(ki) * periods[i] - t);
            if (r < delta) {
                mult[i] = ki;
                res[i] = r;
            } else {
                ok = false;
            }
        }
        if (ok) {
            out.hit = SimultaneousHit{t, mult, res};
            return out;
        }
    }
    return out;  // budget exhausted, no hit
}

}  // namespace volteface
