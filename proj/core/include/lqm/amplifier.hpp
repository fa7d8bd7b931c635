#pragma once

#include <vector>

#include "lqm/linalg.hpp"
#include "lqm/measurement.hpp"

namespace lqm {

/// Macroscopic amplifier of N identical sites. Each outcome j amplifies to
/// the product pointer branch_states[j]^(x N); readout_overlap is
/// r = <a_0, a_1>, the per-site overlap of the first two branches.
struct Amplifier {
    int n_particles = 1;
    Index site_dim = 2;
    std::vector<State> branch_states;
    cxd readout_overlap = 0.0;
};

/// Validates: N >= 1, at least two branches, all branch states normalized
/// single-site vectors, |r| < 1 strictly.
Amplifier make_amplifier(int n_particles, std::vector<State> branch_states, Index site_dim = 2);

/// branch_states[outcome]^(x N) as a dense state (capacity permitting).
State pointer_state(const Amplifier& amp, int outcome);

/// 2 |wa||wb| |r|^N: worst-case cross-branch term over rank-one test
/// operators, evaluated symbolically (no 2^N state needed).
double interference_magnitude(const Amplifier& amp, cxd wa, cxd wb);

/// Reference micro->macro coupling: a pointer-controlled rotation of every
/// amplifier site in the (|0>,|1>) plane, by angle (j * theta_star) for
/// outcome j. exp(i V') rotates each site in one step; theta_star = pi/2
/// turns |0> into |1> (orthogonal branches).
Operator reference_amplifier_coupling(const Amplifier& amp, const std::vector<State>& pointers,
                                      double theta_star);

/// H = H_S (x) I (x) I + I (x) H_uA (x) I + V (x) I + I (x) V' + I (x) I (x) H_MA
/// on system (x) apparatus (x) N amplifier sites.
Operator assemble_total_hamiltonian(const HamiltonianSpec& spec, const Amplifier& amp);

/// exp(iHt) psi with H assembled from the spec.
State evolve_amplification(const HamiltonianSpec& spec, const Amplifier& amp, const State& psi,
                           double t);

/// Observables supported on the system/apparatus factors plus at most
/// k_support amplifier sites.
struct RestrictedAlgebraSpec {
    int k_support = 0;
};

struct MixtureLawResult {
    double max_deviation; // sup over Hermitian ||A|| <= 1 in the restricted algebra
    double bound;         // 2 |a||b| |r|^(N-k)
};

/// Deviation of the superposition state zeta = a xi + b eta from the
/// statistical mixture |a|^2 phi + |b|^2 psi on the restricted algebra,
/// together with the analytic overlap bound. xi and eta must carry product
/// amplifier parts branch_0^(x N) and branch_1^(x N) on the trailing N factors.
MixtureLawResult mixture_law_check(const State& xi, const State& eta, cxd a, cxd b,
                                   const RestrictedAlgebraSpec& alg, const Amplifier& amp);

} // namespace lqm
