#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lqm/errors.hpp"

namespace lqm {

using cxd = std::complex<double>;
using Index = Eigen::Index;

/// Capacity limit on composite dimensions produced by tensor constructions
/// (kron, embed, pointer states). Exceeding it raises CapacityError.
Index max_composite_dim();
void set_max_composite_dim(Index limit);

/// Dense square operator on a composite Hilbert space. factor_dims records
/// the tensor-factor structure; their product must equal dim.
struct Operator {
    Eigen::MatrixXcd mat;
    std::vector<Index> factor_dims;

    Operator() = default;
    Operator(Eigen::MatrixXcd m, std::vector<Index> dims);

    Index dim() const { return mat.rows(); }
    Operator adjoint() const { return Operator(mat.adjoint(), factor_dims); }
    bool is_hermitian(double tol = 1e-10) const;
};

/// State vector on a composite space. Norm must be 1 within 1e-12 unless the
/// vector is explicitly constructed as an unnormalized intermediate.
struct State {
    Eigen::VectorXcd amp;
    std::vector<Index> factor_dims;
    bool normalized = true;

    State() = default;
    State(Eigen::VectorXcd v, std::vector<Index> dims);

    /// Unnormalized intermediate; skips the norm check and flags the value.
    static State raw(Eigen::VectorXcd v, std::vector<Index> dims);

    Index dim() const { return amp.size(); }
    double norm() const { return amp.norm(); }
};

/// Entry-wise max-abs norm.
double max_abs(const Eigen::MatrixXcd& m);
double max_abs(const Eigen::VectorXcd& v);

Operator identity_op(Index dim);
Operator identity_op(std::vector<Index> dims);
Operator zero_op(std::vector<Index> dims);

/// Canonical basis state |k> on the given factor structure.
State basis_state(Index k, std::vector<Index> dims);

Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

/// Kronecker product; factor lists concatenate.
Operator kron(const Operator& a, const Operator& b);
State kron(const State& a, const State& b);

/// |a><b| with a's factor structure.
Operator outer(const State& a, const State& b);

/// Trace out every factor not listed in `keep` (ascending factor indices).
/// The result keeps the listed factors in their original order.
Operator partial_trace(const Operator& rho, const std::vector<int>& keep);

struct HermitianEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // unitary, k-th column pairs with values[k]
};

/// Eigendecomposition of a Hermitian operator. Rejects inputs with
/// ||h - h^dag||_max > 1e-10.
HermitianEig eig_hermitian(const Operator& h);

/// exp(i t h) for Hermitian h, via eigendecomposition (exactly unitary up to
/// the decomposition residual).
Operator expm_i_hermitian(const Operator& h, double t);

/// Complete a prescribed map of k orthonormal inputs to k orthonormal outputs
/// into a full unitary. Completion is deterministic: Gram-Schmidt over the
/// canonical basis in index order, applied to inputs and outputs alike.
Operator complete_unitary(const Eigen::MatrixXcd& inputs, const Eigen::MatrixXcd& outputs);

/// Hermitian generator g with exp(i g) == u, eigenphases in (-pi, pi].
/// The branch at phase -pi is folded to +pi deterministically.
Operator log_unitary_generator(const Operator& u);

} // namespace lqm
