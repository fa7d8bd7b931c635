#include "lqm/amplifier.hpp"

#include <cmath>
#include <string>

#include "lqm/quantum.hpp"

namespace lqm {

Amplifier make_amplifier(int n_particles, std::vector<State> branch_states, Index site_dim) {
    if (n_particles < 1) throw ArgumentError("amplifier needs at least one particle");
    if (branch_states.size() < 2) throw ArgumentError("amplifier needs at least two branches");
    for (const auto& s : branch_states) {
        if (s.dim() != site_dim) throw ArgumentError("branch state dimension != site_dim");
        if (!s.normalized) throw ArgumentError("branch states must be normalized");
    }
    Amplifier amp;
    amp.n_particles = n_particles;
    amp.site_dim = site_dim;
    amp.readout_overlap = branch_states[0].amp.dot(branch_states[1].amp);
    amp.branch_states = std::move(branch_states);
    if (std::abs(amp.readout_overlap) >= 1.0 - 1e-12)
        throw ArgumentError("branches are not distinguishable: |<a_0,a_1>| = " +
                            std::to_string(std::abs(amp.readout_overlap)));
    return amp;
}

State pointer_state(const Amplifier& amp, int outcome) {
    if (outcome < 0 || outcome >= static_cast<int>(amp.branch_states.size()))
        throw ArgumentError("pointer_state: outcome index out of range");
    State out = amp.branch_states[outcome];
    for (int i = 1; i < amp.n_particles; ++i) out = kron(out, amp.branch_states[outcome]);
    return out;
}

double interference_magnitude(const Amplifier& amp, cxd wa, cxd wb) {
    const double w2 = std::norm(wa) + std::norm(wb);
    if (std::abs(w2 - 1.0) > 1e-12)
        throw ArgumentError("interference_magnitude: weights must satisfy |a|^2+|b|^2 = 1");
    return 2.0 * std::abs(wa) * std::abs(wb) *
           std::pow(std::abs(amp.readout_overlap), amp.n_particles);
}

Operator reference_amplifier_coupling(const Amplifier& amp, const std::vector<State>& pointers,
                                      double theta_star) {
    if (pointers.empty()) throw ArgumentError("reference_amplifier_coupling: no pointers");
    if (amp.site_dim < 2) throw ArgumentError("reference_amplifier_coupling: site_dim < 2");
    const Index da = pointers.front().dim();
    const int n = amp.n_particles;

    std::vector<Index> dims(static_cast<size_t>(n) + 1, amp.site_dim);
    dims[0] = da;

    // Per-site rotation generator in the (|0>,|1>) plane.
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(amp.site_dim, amp.site_dim);
    y(0, 1) = cxd(0, 1);
    y(1, 0) = cxd(0, -1);

    Index total = 1;
    for (Index d : dims) {
        if (total > max_composite_dim() / d)
            throw CapacityError("reference_amplifier_coupling: dimension exceeds capacity limit " +
                                std::to_string(max_composite_dim()));
        total *= d;
    }
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(total, total);
    for (size_t j = 0; j < pointers.size(); ++j) {
        if (pointers[j].dim() != da)
            throw ArgumentError("reference_amplifier_coupling: pointer dimension mismatch");
        const double angle = theta_star * static_cast<double>(j);
        if (angle == 0.0) continue;
        const Operator proj = outer(pointers[j], pointers[j]);
        Eigen::MatrixXcd site_sum = Eigen::MatrixXcd::Zero(total / da, total / da);
        const std::vector<Index> ma_dims(dims.begin() + 1, dims.end());
        for (int s = 0; s < n; ++s)
            site_sum += embed(Operator(angle * y, {amp.site_dim}), {s}, ma_dims).mat;
        v += kron(proj, Operator(std::move(site_sum), ma_dims)).mat;
    }
    return Operator(std::move(v), dims);
}

Operator assemble_total_hamiltonian(const HamiltonianSpec& spec, const Amplifier& amp) {
    const Index ds = spec.h_sys.dim();
    const Index da = spec.h_micro.dim();
    if (ds < 1 || da < 1)
        throw ArgumentError("assemble_total_hamiltonian: h_sys and h_micro are required");
    if (!spec.h_sys.is_hermitian()) throw ArgumentError("h_sys is not Hermitian");
    if (!spec.h_micro.is_hermitian()) throw ArgumentError("h_micro is not Hermitian");

    const int n = amp.n_particles;
    std::vector<Index> dims;
    dims.push_back(ds);
    dims.push_back(da);
    for (int i = 0; i < n; ++i) dims.push_back(amp.site_dim);

    std::vector<int> ma_factors;
    for (int i = 0; i < n; ++i) ma_factors.push_back(2 + i);
    std::vector<int> micro_ma_factors = {1};
    micro_ma_factors.insert(micro_ma_factors.end(), ma_factors.begin(), ma_factors.end());

    Operator h = embed(spec.h_sys, {0}, dims);
    h.mat += embed(spec.h_micro, {1}, dims).mat;
    if (spec.v) {
        if (!spec.v->is_hermitian()) throw ArgumentError("v is not Hermitian");
        if (spec.v->dim() != ds * da)
            throw ArgumentError("v must act on system (x) apparatus");
        h.mat += embed(*spec.v, {0, 1}, dims).mat;
    }
    if (spec.v_prime) {
        if (!spec.v_prime->is_hermitian()) throw ArgumentError("v_prime is not Hermitian");
        h.mat += embed(*spec.v_prime, micro_ma_factors, dims).mat;
    }
    if (spec.h_macro) {
        if (!spec.h_macro->is_hermitian()) throw ArgumentError("h_macro is not Hermitian");
        h.mat += embed(*spec.h_macro, ma_factors, dims).mat;
    }
    return h;
}

State evolve_amplification(const HamiltonianSpec& spec, const Amplifier& amp, const State& psi,
                           double t) {
    const Operator h = assemble_total_hamiltonian(spec, amp);
    if (psi.dim() != h.dim())
        throw ArgumentError("evolve_amplification: state dimension " + std::to_string(psi.dim()) +
                            " does not match Hamiltonian dimension " + std::to_string(h.dim()));
    const Operator u = expm_i_hermitian(h, t);
    return State(u.mat * psi.amp, h.factor_dims);
}

MixtureLawResult mixture_law_check(const State& xi, const State& eta, cxd a, cxd b,
                                   const RestrictedAlgebraSpec& alg, const Amplifier& amp) {
    const int n = amp.n_particles;
    const int k = alg.k_support;
    if (k < 0 || k > n)
        throw ArgumentError("mixture_law_check: k_support must lie in [0, N], got " +
                            std::to_string(k));
    if (xi.dim() != eta.dim()) throw ArgumentError("mixture_law_check: dimension mismatch");
    const int m = static_cast<int>(xi.factor_dims.size());
    if (m < n + 1)
        throw ArgumentError("mixture_law_check: states lack the N amplifier factors");

    const double w2 = std::norm(a) + std::norm(b);
    if (std::abs(w2 - 1.0) > 1e-12)
        throw ArgumentError("mixture_law_check: weights must satisfy |a|^2+|b|^2 = 1");

    // Restricted support: every non-amplifier factor plus the first k sites.
    std::vector<int> keep;
    for (int f = 0; f < m - n + k; ++f) keep.push_back(f);

    const cxd overlap = xi.amp.dot(eta.amp);
    const double cross_norm = 2.0 * (std::conj(a) * b * overlap).real();
    const double norm2 = w2 + cross_norm;
    if (norm2 < 1e-12) throw ArgumentError("mixture_law_check: superposition has zero norm");

    // rho(A) - mix(A) = tr(A_0 G)/||zeta||^2 over the restricted block, with
    //   G = 2 Herm(conj(a) b Tr_rest(eta xi^dag))
    //     - (2 Re(conj(a) b <xi,eta>)/w2) Tr_rest(|a|^2 xi xi^dag + |b|^2 eta eta^dag),
    // the mixture weighted by w2 = |a|^2+|b|^2 so orthogonal branches cancel
    // exactly. The supremum over Hermitian ||A_0|| <= 1 is the trace norm.
    const Operator cross = partial_trace(outer(eta, xi), keep);
    Eigen::MatrixXcd g = std::conj(a) * b * cross.mat;
    g = (g + g.adjoint().eval());
    if (cross_norm != 0.0) {
        Eigen::MatrixXcd mix = std::norm(a) * outer(xi, xi).mat + std::norm(b) * outer(eta, eta).mat;
        g -= (cross_norm / w2) * partial_trace(Operator(std::move(mix), xi.factor_dims), keep).mat;
    }

    const HermitianEig eg = eig_hermitian(Operator(std::move(g), cross.factor_dims));
    const double deviation = eg.values.cwiseAbs().sum() / norm2;

    const double r = std::abs(amp.readout_overlap);
    const double bound = 2.0 * std::abs(a) * std::abs(b) * std::pow(r, n - k);
    return {deviation, bound};
}

} // namespace lqm
