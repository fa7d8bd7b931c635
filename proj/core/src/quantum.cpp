#include "lqm/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "indexing.hpp"

namespace lqm {

Operator SpectralObservable::reconstruct() const {
    if (projections.empty()) throw ArgumentError("empty spectral observable");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int j = 0; j < outcomes(); ++j) acc += eigenvalues[j] * projections[j].mat;
    return Operator(std::move(acc), projections.front().factor_dims);
}

SpectralObservable spectral_decompose(const Operator& a, double tol) {
    HermitianEig eg = eig_hermitian(a); // rejects non-Hermitian input
    const Index n = eg.values.size();
    double scale = std::max(std::abs(eg.values[0]), std::abs(eg.values[n - 1]));
    const double gap = tol >= 0.0 ? tol : 1e-9 * scale;

    SpectralObservable obs;
    std::vector<double> cluster_values;
    Index start = 0;
    auto flush = [&](Index end) {
        const Index width = end - start;
        Eigen::MatrixXcd block = eg.vectors.middleCols(start, width);
        obs.projections.emplace_back(Eigen::MatrixXcd(block * block.adjoint()), a.factor_dims);
        double mean = 0.0;
        for (Index i = start; i < end; ++i) mean += eg.values[i];
        cluster_values.push_back(mean / static_cast<double>(width));
        start = end;
    };
    for (Index i = 1; i < n; ++i)
        if (eg.values[i] - eg.values[i - 1] > gap) flush(i);
    flush(n);

    obs.eigenvalues = Eigen::Map<Eigen::VectorXd>(cluster_values.data(),
                                                  static_cast<Index>(cluster_values.size()));
    return obs;
}

Operator embed(const Operator& op, const std::vector<int>& targets,
               const std::vector<Index>& composite_dims) {
    const int m = static_cast<int>(composite_dims.size());
    if (targets.empty()) throw ArgumentError("embed: target set must be nonempty");
    std::vector<char> used(m, 0);
    Index tdim = 1;
    for (int f : targets) {
        if (f < 0 || f >= m) throw ArgumentError("embed: target factor index out of range");
        if (used[f]) throw ArgumentError("embed: duplicate target factor");
        used[f] = 1;
        tdim *= composite_dims[f];
    }
    if (tdim != op.dim())
        throw ArgumentError("embed: operator dimension " + std::to_string(op.dim()) +
                            " does not match target factors product " + std::to_string(tdim));
    Index total = 1;
    for (Index d : composite_dims) {
        if (d <= 0) throw ArgumentError("embed: composite dims must be positive");
        if (total > max_composite_dim() / d)
            throw CapacityError("embed: composite dimension exceeds capacity limit " +
                                std::to_string(max_composite_dim()));
        total *= d;
    }

    std::vector<int> rest;
    for (int f = 0; f < m; ++f)
        if (!used[f]) rest.push_back(f);

    const auto strides = detail::row_strides(composite_dims);
    const auto t_off = detail::factor_offsets(composite_dims, strides, targets);
    const auto r_off = detail::factor_offsets(composite_dims, strides, rest);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(total, total);
    for (Index r = 0; r < static_cast<Index>(r_off.size()); ++r)
        for (Index i = 0; i < tdim; ++i)
            for (Index j = 0; j < tdim; ++j)
                out(t_off[i] + r_off[r], t_off[j] + r_off[r]) = op.mat(i, j);
    return Operator(std::move(out), composite_dims);
}

State embed_state(const State& local, const std::vector<int>& targets,
                  const std::vector<Index>& composite_dims) {
    const int m = static_cast<int>(composite_dims.size());
    if (targets.empty()) throw ArgumentError("embed_state: target set must be nonempty");
    std::vector<char> used(m, 0);
    Index tdim = 1;
    for (int f : targets) {
        if (f < 0 || f >= m) throw ArgumentError("embed_state: target factor index out of range");
        if (used[f]) throw ArgumentError("embed_state: duplicate target factor");
        used[f] = 1;
        tdim *= composite_dims[f];
    }
    if (tdim != local.dim())
        throw ArgumentError("embed_state: state dimension does not match target factors");
    Index total = 1;
    for (Index d : composite_dims) {
        if (total > max_composite_dim() / d)
            throw CapacityError("embed_state: composite dimension exceeds capacity limit");
        total *= d;
    }
    const auto strides = detail::row_strides(composite_dims);
    const auto t_off = detail::factor_offsets(composite_dims, strides, targets);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total);
    for (Index i = 0; i < tdim; ++i) out[t_off[i]] = local.amp[i];
    if (local.normalized) return State(std::move(out), composite_dims);
    return State::raw(std::move(out), composite_dims);
}

double validate_isometry(const Isometry& w) {
    const Index n = w.matrix.dim();
    Eigen::MatrixXcd g = w.matrix.mat.adjoint() * w.matrix.mat;
    if (w.domain) return max_abs(Eigen::MatrixXcd(g * w.domain->mat - w.domain->mat));
    return max_abs(Eigen::MatrixXcd(g - Eigen::MatrixXcd::Identity(n, n)));
}

double validate_isometry_family(std::span<const Isometry> family) {
    double worst = 0.0;
    for (size_t j = 0; j < family.size(); ++j)
        for (size_t k = 0; k < family.size(); ++k) {
            const Index n = family[k].matrix.dim();
            Eigen::MatrixXcd g = family[j].matrix.mat.adjoint() * family[k].matrix.mat;
            const double delta = (j == k) ? 1.0 : 0.0;
            Eigen::MatrixXcd resid;
            if (family[k].domain)
                resid = g * family[k].domain->mat - delta * family[k].domain->mat;
            else
                resid = g - delta * Eigen::MatrixXcd::Identity(n, n);
            worst = std::max(worst, max_abs(resid));
        }
    return worst;
}

std::vector<Operator> hermitian_basis(Index d) {
    if (d < 2) throw ArgumentError("hermitian_basis: dimension must be >= 2");
    std::vector<Operator> out;
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
            x(i, j) = 1.0;
            x(j, i) = 1.0;
            out.emplace_back(std::move(x), std::vector<Index>{d});
            Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(d, d);
            y(i, j) = cxd(0, -1);
            y(j, i) = cxd(0, 1);
            out.emplace_back(std::move(y), std::vector<Index>{d});
        }
    for (Index k = 1; k < d; ++k) {
        Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(d, d);
        for (Index i = 0; i < k; ++i) z(i, i) = 1.0;
        z(k, k) = -static_cast<double>(k);
        out.emplace_back(std::move(z), std::vector<Index>{d});
    }
    return out;
}

double von_neumann_entropy(const Operator& rho) {
    HermitianEig eg = eig_hermitian(rho);
    double s = 0.0;
    for (Index i = 0; i < eg.values.size(); ++i) {
        const double p = eg.values[i];
        if (p > 1e-15) s -= p * std::log(p);
    }
    return s;
}

Eigen::VectorXd schmidt_coefficients(const State& psi, const std::vector<int>& left_factors) {
    const auto& dims = psi.factor_dims;
    const int m = static_cast<int>(dims.size());
    std::vector<char> used(m, 0);
    for (int f : left_factors) {
        if (f < 0 || f >= m) throw ArgumentError("schmidt_coefficients: factor out of range");
        used[f] = 1;
    }
    std::vector<int> right;
    for (int f = 0; f < m; ++f)
        if (!used[f]) right.push_back(f);
    if (left_factors.empty() || right.empty())
        throw ArgumentError("schmidt_coefficients: cut must split the factors");

    const auto strides = detail::row_strides(dims);
    const auto l_off = detail::factor_offsets(dims, strides, left_factors);
    const auto r_off = detail::factor_offsets(dims, strides, right);
    Eigen::MatrixXcd coeff(l_off.size(), r_off.size());
    for (Index i = 0; i < static_cast<Index>(l_off.size()); ++i)
        for (Index j = 0; j < static_cast<Index>(r_off.size()); ++j)
            coeff(i, j) = psi.amp[l_off[i] + r_off[j]];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(coeff);
    return svd.singularValues();
}

} // namespace lqm
