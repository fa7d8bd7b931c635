#include "lqm/linalg.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "indexing.hpp"

namespace lqm {

namespace {

std::atomic<Index> g_max_dim{Index(1) << 20};

Index checked_product(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) {
        if (d <= 0) throw ArgumentError("factor_dims must be positive");
        if (p > max_composite_dim() / d)
            throw CapacityError("composite dimension exceeds capacity limit " +
                                std::to_string(max_composite_dim()));
        p *= d;
    }
    return p;
}

} // namespace

Index max_composite_dim() { return g_max_dim.load(std::memory_order_relaxed); }

void set_max_composite_dim(Index limit) {
    if (limit < 1) throw ArgumentError("capacity limit must be positive");
    g_max_dim.store(limit, std::memory_order_relaxed);
}

Operator::Operator(Eigen::MatrixXcd m, std::vector<Index> dims)
    : mat(std::move(m)), factor_dims(std::move(dims)) {
    if (mat.rows() != mat.cols())
        throw ArgumentError("Operator must be square, got " + std::to_string(mat.rows()) + "x" +
                            std::to_string(mat.cols()));
    Index p = 1;
    for (Index d : factor_dims) {
        if (d <= 0) throw ArgumentError("factor_dims must be positive");
        p *= d;
    }
    if (p != mat.rows())
        throw ArgumentError("factor_dims product " + std::to_string(p) +
                            " does not match dimension " + std::to_string(mat.rows()));
}

bool Operator::is_hermitian(double tol) const {
    return max_abs(Eigen::MatrixXcd(mat - mat.adjoint())) <= tol;
}

State::State(Eigen::VectorXcd v, std::vector<Index> dims)
    : amp(std::move(v)), factor_dims(std::move(dims)) {
    Index p = 1;
    for (Index d : factor_dims) {
        if (d <= 0) throw ArgumentError("factor_dims must be positive");
        p *= d;
    }
    if (p != amp.size())
        throw ArgumentError("factor_dims product " + std::to_string(p) +
                            " does not match dimension " + std::to_string(amp.size()));
    if (std::abs(amp.norm() - 1.0) > 1e-12)
        throw ArgumentError("state vector is not normalized (norm " + std::to_string(amp.norm()) +
                            "); use State::raw for unnormalized intermediates");
}

State State::raw(Eigen::VectorXcd v, std::vector<Index> dims) {
    State s;
    s.amp = std::move(v);
    s.factor_dims = std::move(dims);
    s.normalized = false;
    Index p = 1;
    for (Index d : s.factor_dims) p *= d;
    if (p != s.amp.size()) throw ArgumentError("factor_dims product does not match dimension");
    return s;
}

double max_abs(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double max_abs(const Eigen::VectorXcd& v) {
    if (v.size() == 0) return 0.0;
    return v.cwiseAbs().maxCoeff();
}

Operator identity_op(Index dim) {
    return Operator(Eigen::MatrixXcd::Identity(dim, dim), {dim});
}

Operator identity_op(std::vector<Index> dims) {
    Index d = checked_product(dims);
    return Operator(Eigen::MatrixXcd::Identity(d, d), std::move(dims));
}

Operator zero_op(std::vector<Index> dims) {
    Index d = checked_product(dims);
    return Operator(Eigen::MatrixXcd::Zero(d, d), std::move(dims));
}

State basis_state(Index k, std::vector<Index> dims) {
    Index d = checked_product(dims);
    if (k < 0 || k >= d) throw ArgumentError("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v[k] = 1.0;
    return State(std::move(v), std::move(dims));
}

Operator pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m, {2});
}

Operator pauli_y() {
    Eigen::MatrixXcd m(2, 2);
    m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
    return Operator(m, {2});
}

Operator pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m, {2});
}

Operator kron(const Operator& a, const Operator& b) {
    const Index da = a.dim(), db = b.dim();
    if (da > max_composite_dim() / db)
        throw CapacityError("kron result dimension " + std::to_string(da) + "*" +
                            std::to_string(db) + " exceeds capacity limit " +
                            std::to_string(max_composite_dim()));
    Eigen::MatrixXcd out(da * db, da * db);
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
    std::vector<Index> dims = a.factor_dims;
    dims.insert(dims.end(), b.factor_dims.begin(), b.factor_dims.end());
    return Operator(std::move(out), std::move(dims));
}

State kron(const State& a, const State& b) {
    const Index da = a.dim(), db = b.dim();
    if (da > max_composite_dim() / db)
        throw CapacityError("kron result dimension " + std::to_string(da) + "*" +
                            std::to_string(db) + " exceeds capacity limit " +
                            std::to_string(max_composite_dim()));
    Eigen::VectorXcd out(da * db);
    for (Index i = 0; i < da; ++i) out.segment(i * db, db) = a.amp[i] * b.amp;
    std::vector<Index> dims = a.factor_dims;
    dims.insert(dims.end(), b.factor_dims.begin(), b.factor_dims.end());
    if (a.normalized && b.normalized) return State(std::move(out), std::move(dims));
    return State::raw(std::move(out), std::move(dims));
}

Operator outer(const State& a, const State& b) {
    if (a.dim() != b.dim()) throw ArgumentError("outer: dimension mismatch");
    return Operator(a.amp * b.amp.adjoint(), a.factor_dims);
}

Operator partial_trace(const Operator& rho, const std::vector<int>& keep) {
    const auto& dims = rho.factor_dims;
    const int m = static_cast<int>(dims.size());
    if (keep.empty()) throw ArgumentError("partial_trace: keep set must be nonempty");
    std::vector<char> kept(m, 0);
    for (int f : keep) {
        if (f < 0 || f >= m) throw ArgumentError("partial_trace: factor index out of range");
        if (kept[f]) throw ArgumentError("partial_trace: duplicate factor index");
        kept[f] = 1;
    }
    std::vector<int> keep_sorted, traced;
    for (int f = 0; f < m; ++f) (kept[f] ? keep_sorted : traced).push_back(f);

    const auto strides = detail::row_strides(dims);
    const auto keep_off = detail::factor_offsets(dims, strides, keep_sorted);
    const auto tr_off = detail::factor_offsets(dims, strides, traced);
    const Index kd = static_cast<Index>(keep_off.size());

    Eigen::MatrixXcd out(kd, kd);
    for (Index a = 0; a < kd; ++a)
        for (Index b = 0; b < kd; ++b) {
            cxd s = 0.0;
            for (Index t = 0; t < static_cast<Index>(tr_off.size()); ++t)
                s += rho.mat(keep_off[a] + tr_off[t], keep_off[b] + tr_off[t]);
            out(a, b) = s;
        }
    std::vector<Index> kdims;
    for (int f : keep_sorted) kdims.push_back(dims[f]);
    return Operator(std::move(out), std::move(kdims));
}

HermitianEig eig_hermitian(const Operator& h) {
    if (max_abs(Eigen::MatrixXcd(h.mat - h.mat.adjoint())) > 1e-10)
        throw ArgumentError("eig_hermitian: matrix is not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.mat);
    if (es.info() != Eigen::Success)
        throw ConstructionError("eig_hermitian: eigensolver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Operator expm_i_hermitian(const Operator& h, double t) {
    HermitianEig eg = eig_hermitian(h);
    Eigen::VectorXcd phases(eg.values.size());
    for (Index k = 0; k < eg.values.size(); ++k)
        phases[k] = std::exp(cxd(0.0, eg.values[k] * t));
    Eigen::MatrixXcd u = eg.vectors * phases.asDiagonal() * eg.vectors.adjoint();
    return Operator(std::move(u), h.factor_dims);
}

namespace {

// Extend k orthonormal columns to a full orthonormal basis by projecting the
// canonical basis vectors in index order (two Gram-Schmidt passes).
Eigen::MatrixXcd extend_to_basis(const Eigen::MatrixXcd& cols) {
    const Index n = cols.rows();
    const Index k = cols.cols();
    Eigen::MatrixXcd basis(n, n);
    basis.leftCols(k) = cols;
    Index have = k;
    for (Index e = 0; e < n && have < n; ++e) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            v -= basis.leftCols(have) * (basis.leftCols(have).adjoint() * v);
        const double nv = v.norm();
        if (nv > 1e-6) basis.col(have++) = v / nv;
    }
    if (have != n) throw ConstructionError("complete_unitary: basis extension fell short");
    return basis;
}

} // namespace

Operator complete_unitary(const Eigen::MatrixXcd& inputs, const Eigen::MatrixXcd& outputs) {
    if (inputs.rows() != outputs.rows() || inputs.cols() != outputs.cols())
        throw ArgumentError("complete_unitary: inputs/outputs shape mismatch");
    const Index n = inputs.rows();
    const Index k = inputs.cols();
    if (k < 1 || k > n) throw ArgumentError("complete_unitary: need 1..dim prescribed columns");
    const Eigen::MatrixXcd ik = Eigen::MatrixXcd::Identity(k, k);
    if (max_abs(Eigen::MatrixXcd(inputs.adjoint() * inputs - ik)) > 1e-10)
        throw ArgumentError("complete_unitary: prescribed inputs are not orthonormal");
    if (max_abs(Eigen::MatrixXcd(outputs.adjoint() * outputs - ik)) > 1e-10)
        throw ArgumentError("complete_unitary: prescribed outputs are not orthonormal");
    Eigen::MatrixXcd bi = extend_to_basis(inputs);
    Eigen::MatrixXcd bo = extend_to_basis(outputs);
    return Operator(bo * bi.adjoint(), {n});
}

Operator log_unitary_generator(const Operator& u) {
    const Index n = u.dim();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    if (max_abs(Eigen::MatrixXcd(u.mat.adjoint() * u.mat - id)) > 1e-8)
        throw ArgumentError("log_unitary_generator: input is not unitary");
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.mat);
    if (schur.info() != Eigen::Success)
        throw ConstructionError("log_unitary_generator: Schur decomposition failed");
    Eigen::VectorXd theta(n);
    for (Index i = 0; i < n; ++i) {
        double a = std::arg(schur.matrixT()(i, i));
        if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi; // fold branch point to +pi
        theta[i] = a;
    }
    Eigen::MatrixXcd g = schur.matrixU() * theta.cast<cxd>().asDiagonal() * schur.matrixU().adjoint();
    g = 0.5 * (g + g.adjoint().eval());
    return Operator(std::move(g), u.factor_dims);
}

} // namespace lqm
