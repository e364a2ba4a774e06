#pragma once

// Brute-force reference for the persistent walk: the full 2N x 2N transition
// matrix, its projected powers, and their largest singular values. Kept
// independent of the closed forms it validates.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "volteface/discrete_chain.hpp"

namespace vf_test {

// state index: site x in 0..N-1, velocity slot 0 (+1) / 1 (-1)
inline int state_index(int x, int vel_slot) { return x * 2 + vel_slot; }

/// Operator matrix of one step on functions: (P f)(x, y) = E[f(X_1, Y_1) | x, y].
inline Eigen::MatrixXd dense_transition(const volteface::ChainSpec& spec) {
    const int n = spec.n_sites;
    const double keep = 1.0 - spec.flip_probability();
    const double flip = spec.flip_probability();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int x = 0; x < n; ++x) {
        for (int slot = 0; slot < 2; ++slot) {
            const int y = (slot == 0) ? 1 : -1;
            const int xn = ((x + y) % n + n) % n;
            p(state_index(x, slot), state_index(xn, slot)) += keep;
            p(state_index(x, slot), state_index(xn, 1 - slot)) += flip;
        }
    }
    return p;
}

/// Projector onto mean-zero functions (orthogonal in L^2 of the uniform law).
inline Eigen::MatrixXd mean_zero_projector(int n_states) {
    return Eigen::MatrixXd::Identity(n_states, n_states) -
           Eigen::MatrixXd::Constant(n_states, n_states, 1.0 / n_states);
}

/// ||M^n - mu|| for n = 1..max_steps, via singular values of (Q P Q)^n.
/// The projected matrix is powered directly so small norms keep full relative
/// accuracy (P^n alone would lose them to cancellation against the mean).
inline std::vector<double> dense_global_norms(const volteface::ChainSpec& spec, int max_steps) {
    const Eigen::MatrixXd p = dense_transition(spec);
    const Eigen::MatrixXd q = mean_zero_projector(2 * spec.n_sites);
    const Eigen::MatrixXd step = q * p * q;
    Eigen::MatrixXd acc = step;
    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(max_steps));
    for (int n = 1; n <= max_steps; ++n) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(acc);
        norms.push_back(svd.singularValues()(0));
        if (n < max_steps) acc = acc * step;
    }
    return norms;
}

/// Matrix of M restricted to the plane W_k, extracted from the dense operator
/// by applying it to the plane's basis functions and reading off coefficients.
inline volteface::Mat2c dense_mode_block(const volteface::ChainSpec& spec, int k) {
    using cd = std::complex<double>;
    const int n = spec.n_sites;
    const Eigen::MatrixXd p = dense_transition(spec);
    Eigen::VectorXcd basis_plus(2 * n), basis_minus(2 * n);
    basis_plus.setZero();
    basis_minus.setZero();
    for (int x = 0; x < n; ++x) {
        const cd phase = std::polar(1.0, volteface::two_pi * k * x / n);
        basis_plus(state_index(x, 0)) = phase;
        basis_minus(state_index(x, 1)) = phase;
    }
    const Eigen::VectorXcd img_plus = p.cast<cd>() * basis_plus;
    const Eigen::VectorXcd img_minus = p.cast<cd>() * basis_minus;
    // coefficients: <img, basis> / <basis, basis> under the uniform inner product
    auto coeff = [&](const Eigen::VectorXcd& img, const Eigen::VectorXcd& basis) {
        return basis.dot(img) / basis.squaredNorm();  // Eigen dot conjugates the left argument
    };
    return {coeff(img_plus, basis_plus), coeff(img_minus, basis_plus),
            coeff(img_plus, basis_minus), coeff(img_minus, basis_minus)};
}

}  // namespace vf_test
