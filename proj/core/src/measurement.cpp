#include "lqm/measurement.hpp"

#include <cmath>
#include <string>

namespace lqm {

namespace {

void check_pointers(const State& ready, const std::vector<State>& pointers, int n_outcomes) {
    if (static_cast<int>(pointers.size()) != n_outcomes)
        throw ArgumentError("pointer count " + std::to_string(pointers.size()) +
                            " does not match spectrum size " + std::to_string(n_outcomes));
    const Index da = ready.dim();
    for (const auto& p : pointers)
        if (p.dim() != da) throw ArgumentError("pointer dimension mismatch");
    for (size_t j = 0; j < pointers.size(); ++j)
        for (size_t k = 0; k < pointers.size(); ++k) {
            const cxd g = pointers[j].amp.dot(pointers[k].amp);
            const double want = (j == k) ? 1.0 : 0.0;
            if (std::abs(g - want) > 1e-10)
                throw ArgumentError("pointers are not orthonormal (Gram residual at pair " +
                                    std::to_string(j) + "," + std::to_string(k) + ")");
        }
}

// Projector onto the slot basis vector of the apparatus factor.
Operator slot_domain(Index ds, Index da) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(ds * da, ds * da);
    for (Index s = 0; s < ds; ++s) d(s * da, s * da) = 1.0;
    return Operator(std::move(d), {ds, da});
}

Isometry injection_isometry(Index ds, const State& target) {
    const Index da = target.dim();
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(ds * da, ds * da);
    for (Index s = 0; s < ds; ++s) w.block(s * da, s * da, da, 1) = target.amp;
    Isometry iso;
    iso.matrix = Operator(std::move(w), {ds, da});
    iso.domain = slot_domain(ds, da);
    return iso;
}

} // namespace

MeasurementModel build_coupling(const SpectralObservable& obs, const State& ready,
                                const std::vector<State>& pointers) {
    const int n = obs.outcomes();
    if (n < 1) throw ArgumentError("build_coupling: empty spectral observable");
    check_pointers(ready, pointers, n);

    const Index ds = obs.dim();
    const Index da = ready.dim();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(ds * da, ds * da);
    for (int j = 0; j < n; ++j) {
        const Operator uj = complete_unitary(ready.amp, pointers[j].amp);
        u += kron(obs.projections[j], uj).mat;
    }
    Operator coupling(std::move(u), {ds, da});

    MeasurementModel model;
    model.system_obs = obs;
    model.ready = ready;
    model.pointers = pointers;
    model.coupling_generator = log_unitary_generator(coupling);
    model.duration = 1.0;
    model.coupling_unitary = std::move(coupling);

    // exp(iVT) must reproduce the assembled unitary.
    const Operator re = expm_i_hermitian(model.coupling_generator, model.duration);
    if (max_abs(Eigen::MatrixXcd(re.mat - model.coupling_unitary.mat)) > 1e-9)
        throw ConstructionError("build_coupling: generator log/exp round trip exceeded 1e-9");

    // Pointer action on every basis vector of every spectral sector.
    double action_residual = 0.0;
    for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXcd lhs =
            model.coupling_unitary.mat * kron(obs.projections[j], outer(ready, ready)).mat;
        Eigen::MatrixXcd rhs = kron(obs.projections[j],
                                    Operator(pointers[j].amp * ready.amp.adjoint(), {da})).mat;
        action_residual = std::max(action_residual, max_abs(Eigen::MatrixXcd(lhs - rhs)));
    }
    if (action_residual > 1e-9)
        throw ConstructionError("build_coupling: pointer action residual exceeded 1e-9");
    return model;
}

State apply_measurement(const MeasurementModel& model, const State& phi) {
    if (phi.dim() != model.system_dim())
        throw ArgumentError("apply_measurement: state dimension " + std::to_string(phi.dim()) +
                            " does not match system dimension " +
                            std::to_string(model.system_dim()));
    const State joint = kron(phi, model.ready);
    Eigen::VectorXcd out = model.coupling_unitary.mat * joint.amp;
    return State(std::move(out), joint.factor_dims);
}

double reduced_expectation(const State& psi_prime, const Operator& b) {
    if (!b.is_hermitian())
        throw ArgumentError("reduced_expectation: observable is not Hermitian");
    const Index ds = b.dim();
    if (ds <= 0 || psi_prime.dim() % ds != 0)
        throw ArgumentError("reduced_expectation: dimension mismatch");
    const Index da = psi_prime.dim() / ds;
    // <psi|(B (x) I)|psi> without forming the embedded matrix.
    const Eigen::Map<const Eigen::MatrixXcd> m(psi_prime.amp.data(), da, ds);
    return ((m.adjoint() * m) * b.mat.transpose()).trace().real();
}

Isometry ready_isometry(const MeasurementModel& model) {
    return injection_isometry(model.system_dim(), model.ready);
}

std::vector<Isometry> outcome_isometries(const MeasurementModel& model) {
    std::vector<Isometry> out;
    out.reserve(model.pointers.size());
    for (const auto& p : model.pointers)
        out.push_back(injection_isometry(model.system_dim(), p));
    return out;
}

double heisenberg_intertwiner(const HamiltonianSpec& spec, const MeasurementModel& model,
                              const Isometry& w, const std::vector<Isometry>& w_family,
                              bool neglect_free) {
    if (static_cast<int>(w_family.size()) != model.system_obs.outcomes())
        throw ArgumentError("heisenberg_intertwiner: family size mismatch");
    const auto dims = model.composite_dims();
    const double t = model.duration;

    Operator h = spec.v ? *spec.v : model.coupling_generator;
    if (h.dim() != dims[0] * dims[1])
        throw ArgumentError("heisenberg_intertwiner: coupling dimension mismatch");
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(h.dim(), h.dim());
    if (!neglect_free) {
        if (spec.h_sys.dim() != dims[0] || spec.h_micro.dim() != dims[1])
            throw ArgumentError("heisenberg_intertwiner: free part dimension mismatch");
        const Operator hs = embed(spec.h_sys, {0}, dims);
        h = Operator(h.mat + hs.mat + embed(spec.h_micro, {1}, dims).mat, dims);
        right = expm_i_hermitian(hs, -t).mat;
    }

    const Eigen::MatrixXcd alpha = expm_i_hermitian(h, t).mat * w.matrix.mat * right;
    Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(h.dim(), h.dim());
    for (int j = 0; j < model.system_obs.outcomes(); ++j)
        target += w_family[j].matrix.mat * embed(model.system_obs.projections[j], {0}, dims).mat;
    return max_abs(Eigen::MatrixXcd(alpha - target));
}

std::vector<std::pair<double, double>> finite_T_fidelity(const HamiltonianSpec& spec,
                                                         const MeasurementModel& model,
                                                         const State& phi,
                                                         const std::vector<double>& t_grid) {
    if (phi.dim() != model.system_dim())
        throw ArgumentError("finite_T_fidelity: state dimension mismatch");
    for (double t : t_grid)
        if (t < 0.0 || t > model.duration)
            throw ArgumentError("finite_T_fidelity: grid point outside [0, T]");

    const auto dims = model.composite_dims();
    Operator h = spec.v ? *spec.v : model.coupling_generator;
    if (spec.h_sys.dim() == dims[0] && max_abs(spec.h_sys.mat) > 0.0)
        h = Operator(h.mat + embed(spec.h_sys, {0}, dims).mat, dims);
    if (spec.h_micro.dim() == dims[1] && max_abs(spec.h_micro.mat) > 0.0)
        h = Operator(h.mat + embed(spec.h_micro, {1}, dims).mat, dims);

    // Normalized target branches; fidelity is the squared projection onto
    // their span.
    std::vector<Eigen::VectorXcd> branches;
    for (int j = 0; j < model.system_obs.outcomes(); ++j) {
        Eigen::VectorXcd ej = model.system_obs.projections[j].mat * phi.amp;
        const double w = ej.norm();
        if (w < 1e-14) continue;
        branches.push_back(kron(State::raw(ej / w, phi.factor_dims), model.pointers[j]).amp);
    }

    const HermitianEig eg = eig_hermitian(h);
    const Eigen::VectorXcd psi0 = kron(phi, model.ready).amp;
    const Eigen::VectorXcd modes = eg.vectors.adjoint() * psi0;

    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        Eigen::VectorXcd phased(modes.size());
        for (Index k = 0; k < modes.size(); ++k)
            phased[k] = std::exp(cxd(0.0, eg.values[k] * t)) * modes[k];
        const Eigen::VectorXcd psi_t = eg.vectors * phased;
        double f = 0.0;
        for (const auto& b : branches) f += std::norm(b.dot(psi_t));
        out.emplace_back(t, f);
    }
    return out;
}

} // namespace lqm
