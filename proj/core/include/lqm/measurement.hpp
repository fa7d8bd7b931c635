#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lqm/linalg.hpp"
#include "lqm/quantum.hpp"

namespace lqm {

/// Premeasurement coupling between a system observable and an apparatus
/// pointer family: exp(i V T) maps E_j Phi (x) ready to E_j Phi (x) pointer_j.
struct MeasurementModel {
    SpectralObservable system_obs;
    State ready;
    std::vector<State> pointers;
    Operator coupling_generator; // V, Hermitian on system (x) apparatus
    double duration = 1.0;       // T
    Operator coupling_unitary;   // exp(i V T), assembled blockwise (exact source)

    Index system_dim() const { return system_obs.dim(); }
    Index apparatus_dim() const { return ready.dim(); }
    std::vector<Index> composite_dims() const { return {system_dim(), apparatus_dim()}; }
};

/// Three-part Hamiltonian description. h_sys and h_micro are required (use
/// zero matrices to switch the free evolutions off); the amplifier parts are
/// optional.
struct HamiltonianSpec {
    Operator h_sys;
    Operator h_micro;
    std::optional<Operator> h_macro;
    std::optional<Operator> v;       // system <-> microscopic apparatus
    std::optional<Operator> v_prime; // microscopic <-> macroscopic apparatus
};

/// Build the coupling for the given observable, ready state and orthonormal
/// pointer family. The target unitary sum_j E_j (x) U_j (with U_j the
/// deterministic completion of ready -> pointer_j) is constructed first; the
/// Hermitian generator V is its principal-branch logarithm with T = 1.
MeasurementModel build_coupling(const SpectralObservable& obs, const State& ready,
                                const std::vector<State>& pointers);

/// Apply the coupling to a system state: exp(iVT)(phi (x) ready)
/// = sum_j E_j phi (x) pointer_j.
State apply_measurement(const MeasurementModel& model, const State& phi);

/// (psi', (B (x) I) psi') for a system observable B; equals
/// sum_j (E_j phi, B E_j phi) whenever psi' came from apply_measurement.
double reduced_expectation(const State& psi_prime, const Operator& b);

/// W: phi -> phi (x) ready as a square matrix with a slot domain.
Isometry ready_isometry(const MeasurementModel& model);

/// W_j: phi -> phi (x) pointer_j, same slot convention.
std::vector<Isometry> outcome_isometries(const MeasurementModel& model);

/// || exp(iHT) W exp(-i H_S T) - sum_j W_j E_j ||_max with H assembled from
/// the given parts (free parts zeroed when neglect_free is set). Diagnostic.
double heisenberg_intertwiner(const HamiltonianSpec& spec, const MeasurementModel& model,
                              const Isometry& w, const std::vector<Isometry>& w_family,
                              bool neglect_free);

/// Squared overlap of exp(iHt)(phi (x) ready) with the span of the normalized
/// target branches E_j phi (x) pointer_j, on a grid of intermediate times.
std::vector<std::pair<double, double>> finite_T_fidelity(const HamiltonianSpec& spec,
                                                         const MeasurementModel& model,
                                                         const State& phi,
                                                         const std::vector<double>& t_grid);

} // namespace lqm
