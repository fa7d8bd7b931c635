#pragma once

// Shared test helpers: seeded random inputs and a plain reference matrix
// product (ascending-k triple loop, no blocking) used where tests assert
// exact floating-point identities.

#include <Eigen/Dense>

#include "lqm/linalg.hpp"
#include "lqm/rng.hpp"

namespace lqm::test {

inline Eigen::MatrixXcd gaussian_matrix(Rng& rng, Index rows, Index cols) {
    Eigen::MatrixXcd g(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const auto [re, im] = rng.gaussian_pair();
            g(i, j) = cxd(re, im);
        }
    return g;
}

inline Operator random_hermitian(Rng& rng, std::vector<Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    Eigen::MatrixXcd g = gaussian_matrix(rng, n, n);
    return Operator(0.5 * (g + g.adjoint().eval()), std::move(dims));
}

inline State random_state(Rng& rng, std::vector<Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) {
        const auto [re, im] = rng.gaussian_pair();
        v[i] = cxd(re, im);
    }
    v /= v.norm();
    return State(std::move(v), std::move(dims));
}

// Entries are dyadic rationals k/16 with |k| <= 16, so double products of up
// to three entries are exact.
inline Operator random_dyadic(Rng& rng, std::vector<Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    Eigen::MatrixXcd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double re = static_cast<double>(static_cast<int>(rng.next() % 33) - 16) / 16.0;
            const double im = static_cast<double>(static_cast<int>(rng.next() % 33) - 16) / 16.0;
            g(i, j) = cxd(re, im);
        }
    return Operator(std::move(g), std::move(dims));
}

// k orthonormal columns from seeded Gaussians (modified Gram-Schmidt).
inline Eigen::MatrixXcd random_orthonormal(Rng& rng, Index n, Index k) {
    Eigen::MatrixXcd g = gaussian_matrix(rng, n, k);
    for (Index c = 0; c < k; ++c) {
        for (int pass = 0; pass < 2; ++pass)
            for (Index prev = 0; prev < c; ++prev)
                g.col(c) -= g.col(prev).dot(g.col(c)) * g.col(prev);
        g.col(c) /= g.col(c).norm();
    }
    return g;
}

// Reference product with a fixed summation order; exact-equality oracles use
// this on both sides.
inline Eigen::MatrixXcd matmul_ref(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            cxd s = 0.0;
            for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

} // namespace lqm::test
