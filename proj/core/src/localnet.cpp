#include "lqm/localnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lqm {

namespace {

std::vector<int> region_site_indices(const LatticeNet& net, const Region& r,
                                     const char* where) {
    std::vector<int> out;
    out.reserve(r.sites.size());
    for (std::int64_t s : r.sites) {
        if (s < 0 || s >= net.n_sites)
            throw ArgumentError(std::string(where) + ": site " + std::to_string(s) +
                                " outside chain of " + std::to_string(net.n_sites) + " sites");
        out.push_back(static_cast<int>(s));
    }
    return out;
}

} // namespace

Index LatticeNet::dim() const {
    Index d = 1;
    for (int i = 0; i < n_sites; ++i) {
        if (d > max_composite_dim() / site_dim)
            throw CapacityError("chain dimension exceeds capacity limit " +
                                std::to_string(max_composite_dim()));
        d *= site_dim;
    }
    return d;
}

std::vector<Index> LatticeNet::chain_dims() const {
    return std::vector<Index>(static_cast<size_t>(n_sites), site_dim);
}

std::vector<Operator> LatticeNet::generators(const Region& r) const {
    const auto sites = region_site_indices(*this, r, "generators");
    const auto basis = hermitian_basis(site_dim);
    const auto dims = chain_dims();
    std::vector<Operator> out;
    out.reserve(sites.size() * basis.size());
    for (int s : sites)
        for (const auto& g : basis) out.push_back(embed(g, {s}, dims));
    return out;
}

LatticeNet make_net(int n_sites, Index site_dim) {
    if (n_sites < 1) throw ArgumentError("net needs at least one site");
    if (site_dim < 2) throw ArgumentError("site dimension must be >= 2");
    LatticeNet net{n_sites, site_dim};
    net.dim(); // capacity check
    return net;
}

double locality_check(const LatticeNet& net, const Region& r1, const Region& r2) {
    if (!region_spacelike(r1, r2))
        throw PreconditionError("locality_check: regions are not spacelike separated");
    const auto gen1 = net.generators(r1);
    const auto gen2 = net.generators(r2);
    double worst = 0.0;
    for (const auto& a : gen1)
        for (const auto& b : gen2)
            worst = std::max(worst, max_abs(Eigen::MatrixXcd(a.mat * b.mat - b.mat * a.mat)));
    return worst;
}

double support_residual(const LatticeNet& net, const Operator& op,
                        const std::vector<std::int64_t>& sites) {
    if (op.dim() != net.dim()) throw ArgumentError("support_residual: operator not on the chain");
    const auto basis = hermitian_basis(net.site_dim);
    const auto dims = net.chain_dims();
    double worst = 0.0;
    for (int s = 0; s < net.n_sites; ++s) {
        if (std::find(sites.begin(), sites.end(), s) != sites.end()) continue;
        for (const auto& g : basis) {
            const Operator ge = embed(g, {s}, dims);
            worst = std::max(worst,
                             max_abs(Eigen::MatrixXcd(op.mat * ge.mat - ge.mat * op.mat)));
        }
    }
    return worst;
}

LocalizedMeasurement localize_measurement(const LatticeNet& net, const Region& region,
                                          const std::vector<int>& system_sites,
                                          const std::vector<int>& apparatus_sites,
                                          const SpectralObservable& obs_local, const State& ready,
                                          const std::vector<State>& pointers) {
    if (apparatus_sites.empty())
        throw ConstructionError("localize_measurement: no apparatus sites in the region");
    if (system_sites.empty())
        throw ConstructionError("localize_measurement: no system sites in the region");
    for (int s : system_sites)
        for (int a : apparatus_sites)
            if (s == a) throw ArgumentError("localize_measurement: overlapping site assignment");
    auto in_region = [&](int s) {
        return std::find(region.sites.begin(), region.sites.end(), s) != region.sites.end();
    };
    for (int s : system_sites)
        if (!in_region(s)) throw ArgumentError("localize_measurement: system site outside region");
    for (int a : apparatus_sites)
        if (!in_region(a))
            throw ArgumentError("localize_measurement: apparatus site outside region");
    region_site_indices(net, region, "localize_measurement");

    MeasurementModel model = build_coupling(obs_local, ready, pointers);
    if (region.t_max - region.t_min < static_cast<std::int64_t>(model.duration))
        throw PreconditionError("localize_measurement: region time window shorter than the "
                                "coupling duration");

    Index sys_dim = 1;
    for (size_t i = 0; i < system_sites.size(); ++i) sys_dim *= net.site_dim;
    Index app_dim = 1;
    for (size_t i = 0; i < apparatus_sites.size(); ++i) app_dim *= net.site_dim;
    if (sys_dim != obs_local.dim())
        throw ConstructionError("localize_measurement: observable dimension " +
                                std::to_string(obs_local.dim()) + " does not fit system sites");
    if (app_dim != ready.dim())
        throw ConstructionError("localize_measurement: apparatus dimension " +
                                std::to_string(ready.dim()) + " does not fit apparatus sites");

    std::vector<int> targets = system_sites;
    targets.insert(targets.end(), apparatus_sites.begin(), apparatus_sites.end());
    const auto dims = net.chain_dims();

    LocalizedMeasurement lm;
    lm.region = region;
    lm.system_sites = system_sites;
    lm.apparatus_sites = apparatus_sites;

    lm.observable.eigenvalues = model.system_obs.eigenvalues;
    for (const auto& e : model.system_obs.projections)
        lm.observable.projections.push_back(embed(e, system_sites, dims));

    const Isometry w_local = ready_isometry(model);
    lm.w_ready.matrix = embed(w_local.matrix, targets, dims);
    lm.w_ready.domain = embed(*w_local.domain, targets, dims);
    lm.w_ready.declared_support = targets;
    for (const Isometry& wj : outcome_isometries(model)) {
        Isometry e;
        e.matrix = embed(wj.matrix, targets, dims);
        e.domain = lm.w_ready.domain;
        e.declared_support = targets;
        lm.w_outcomes.push_back(std::move(e));
    }

    lm.coupling = embed(model.coupling_unitary, targets, dims);
    lm.w_evolved.matrix = Operator(lm.coupling.mat * lm.w_ready.matrix.mat, dims);
    lm.w_evolved.domain = lm.w_ready.domain;
    lm.w_evolved.declared_support = targets;
    lm.model = std::move(model);

    std::vector<std::int64_t> support(targets.begin(), targets.end());
    if (support_residual(net, lm.coupling, support) > 0.0 ||
        support_residual(net, lm.w_ready.matrix, support) > 0.0)
        throw ConstructionError("localize_measurement: support leakage outside region sites");
    return lm;
}

NoSignalDelta no_signaling_check(const LatticeNet& net, const LocalizedMeasurement& m,
                                 const Operator& b_local, const Region& b_region,
                                 const State& phi) {
    if (!region_spacelike(m.region, b_region))
        throw PreconditionError("no_signaling_check: probe region is not spacelike to the "
                                "measurement region");
    const auto b_sites = region_site_indices(net, b_region, "no_signaling_check");
    Index b_dim = 1;
    for (size_t i = 0; i < b_sites.size(); ++i) b_dim *= net.site_dim;
    if (b_local.dim() != b_dim)
        throw ArgumentError("no_signaling_check: probe dimension does not fit its region");
    if (phi.dim() != net.dim()) throw ArgumentError("no_signaling_check: state not on the chain");
    if (max_abs(Eigen::VectorXcd(m.w_ready.domain->mat * phi.amp - phi.amp)) > 1e-10)
        throw ArgumentError("no_signaling_check: state must hold the apparatus sites in the "
                            "slot (ready-to-insert) basis state");

    const Operator b = embed(b_local, b_sites, net.chain_dims());
    const auto expectation = [&](const Eigen::VectorXcd& v) -> cxd {
        return (v.adjoint() * b.mat * v)(0, 0);
    };
    const cxd base = expectation(phi.amp);
    const Eigen::VectorXcd before = m.w_ready.matrix.mat * phi.amp;
    const Eigen::VectorXcd after = m.w_evolved.matrix.mat * phi.amp;
    return {std::abs(expectation(before) - base), std::abs(expectation(after) - base)};
}

namespace {

// Projection of the lowest-index canonical basis vector into the range of a
// (numerically verified) projection operator, scaled to squared norm 1/2.
Eigen::VectorXcd half_norm_range_vector(const Eigen::MatrixXcd& p, const char* label) {
    for (Index e = 0; e < p.cols(); ++e) {
        Eigen::VectorXcd v = p.col(e); // P e_e
        const double n = v.norm();
        if (n > 1e-6) return v * (1.0 / (n * std::sqrt(2.0)));
    }
    throw ConstructionError(std::string("borchers_entangle: degenerate range of ") + label);
}

void check_projection(const Operator& p, const char* label) {
    if (!p.is_hermitian())
        throw ArgumentError(std::string(label) + " is not Hermitian");
    if (max_abs(Eigen::MatrixXcd(p.mat * p.mat - p.mat)) > 1e-10)
        throw ArgumentError(std::string(label) + " is not idempotent");
    const double scale = max_abs(p.mat);
    if (scale < 1e-12)
        throw PreconditionError(std::string(label) + " is the zero projection");
    if (max_abs(Eigen::MatrixXcd(p.mat - Eigen::MatrixXcd::Identity(p.dim(), p.dim()))) < 1e-12)
        throw PreconditionError(std::string(label) + " is the identity projection");
}

} // namespace

State borchers_entangle(const LatticeNet& net, const Region& r1, const Operator& e_local,
                        const Region& r2, const Operator& f_local) {
    if (!region_spacelike(r1, r2))
        throw PreconditionError("borchers_entangle: regions are not spacelike separated");
    check_projection(e_local, "E");
    check_projection(f_local, "F");
    const auto s1 = region_site_indices(net, r1, "borchers_entangle");
    const auto s2 = region_site_indices(net, r2, "borchers_entangle");
    const auto dims = net.chain_dims();
    const Operator e = embed(e_local, s1, dims);
    const Operator f = embed(f_local, s2, dims);

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(e.dim(), e.dim());
    const Eigen::MatrixXcd ef = e.mat * f.mat;
    const Eigen::MatrixXcd cc = (id - e.mat) * (id - f.mat);

    Eigen::VectorXcd psi = half_norm_range_vector(ef, "EF");
    Eigen::VectorXcd phi = half_norm_range_vector(cc, "(I-E)(I-F)");
    Eigen::VectorXcd out = psi + phi;
    out /= out.norm();
    return State(std::move(out), dims);
}

State split_entangle(const LatticeNet& net, const Region& r1, const State& psi1,
                     const State& psi2, const Region& r2, const State& phi1, const State& phi2) {
    const std::int64_t gap = min_spacelike_gap(r1, r2);
    if (gap < 2)
        throw PreconditionError("split_entangle: regions must be spacelike with margin >= 2, "
                                "gap is " + std::to_string(gap));
    auto check_pair = [](const State& a, const State& b, const char* label) {
        if (a.dim() != b.dim()) throw ArgumentError("split_entangle: pair dimension mismatch");
        if (std::abs(a.amp.dot(b.amp)) > 1e-10)
            throw ArgumentError(std::string("split_entangle: ") + label +
                                " pair is not orthonormal");
    };
    check_pair(psi1, psi2, "first-region");
    check_pair(phi1, phi2, "second-region");

    const auto s1 = region_site_indices(net, r1, "split_entangle");
    const auto s2 = region_site_indices(net, r2, "split_entangle");
    Index d1 = 1, d2 = 1;
    for (size_t i = 0; i < s1.size(); ++i) d1 *= net.site_dim;
    for (size_t i = 0; i < s2.size(); ++i) d2 *= net.site_dim;
    if (psi1.dim() != d1) throw ArgumentError("split_entangle: first pair does not fit region");
    if (phi1.dim() != d2) throw ArgumentError("split_entangle: second pair does not fit region");

    Eigen::VectorXcd local =
        (kron(psi1, phi1).amp + kron(psi2, phi2).amp) / std::sqrt(2.0);
    std::vector<Index> local_dims = psi1.factor_dims;
    local_dims.insert(local_dims.end(), phi1.factor_dims.begin(), phi1.factor_dims.end());

    std::vector<int> targets = s1;
    targets.insert(targets.end(), s2.begin(), s2.end());
    return embed_state(State(std::move(local), std::move(local_dims)), targets,
                       net.chain_dims());
}

} // namespace lqm
