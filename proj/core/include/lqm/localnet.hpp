#pragma once

#include <vector>

#include "lqm/linalg.hpp"
#include "lqm/measurement.hpp"
#include "lqm/quantum.hpp"
#include "lqm/spacetime.hpp"

namespace lqm {

/// Net of local operator algebras on a spin chain: a region is assigned the
/// algebra generated by the Hermitian single-site basis on its sites,
/// embedded into the chain. Isotony and locality hold by tensor construction.
struct LatticeNet {
    int n_sites = 1;
    Index site_dim = 2;

    Index dim() const;
    std::vector<Index> chain_dims() const;
    /// Generating set of the region's algebra (embedded on the chain).
    std::vector<Operator> generators(const Region& r) const;
};

LatticeNet make_net(int n_sites, Index site_dim = 2);

/// Max commutator norm over generator pairs of two spacelike regions;
/// exactly 0 by tensor-factor disjointness. Precondition error if the
/// regions are not spacelike.
double locality_check(const LatticeNet& net, const Region& r1, const Region& r2);

/// Max commutator norm of an operator with the single-site generators at
/// every chain site outside `sites` (support leakage diagnostic).
double support_residual(const LatticeNet& net, const Operator& op,
                        const std::vector<std::int64_t>& sites);

/// A measurement coupling embedded on a region of the chain: observable,
/// ready/outcome injection isometries and the coupling unitary all commute
/// with everything outside the region's sites.
struct LocalizedMeasurement {
    Region region;
    std::vector<int> system_sites;
    std::vector<int> apparatus_sites;
    MeasurementModel model;            // on the local factors
    SpectralObservable observable;     // embedded on the chain
    Isometry w_ready;                  // embedded, slot domain
    std::vector<Isometry> w_outcomes;  // embedded
    Operator coupling;                 // embedded exp(iVT)
    Isometry w_evolved;                // coupling * w_ready (the evolved injection)
};

/// Build a measurement localized on region.sites. The observable lives on
/// system_sites, the pointer factor on apparatus_sites (both ordered subsets
/// of region.sites); the region's time window must cover the duration T.
LocalizedMeasurement localize_measurement(const LatticeNet& net, const Region& region,
                                          const std::vector<int>& system_sites,
                                          const std::vector<int>& apparatus_sites,
                                          const SpectralObservable& obs_local, const State& ready,
                                          const std::vector<State>& pointers);

struct NoSignalDelta {
    double before_coupling; // |(W phi, B W phi) - (phi, B phi)|
    double after_coupling;  // same with the evolved injection
    double max() const { return before_coupling > after_coupling ? before_coupling : after_coupling; }
};

/// Expectation shift of a remote observable when the apparatus is added,
/// before and after the coupling acts. b_local lives on b_region.sites,
/// which must be spacelike to the measurement region; phi must hold the
/// apparatus sites in the slot state.
NoSignalDelta no_signaling_check(const LatticeNet& net, const LocalizedMeasurement& m,
                                 const Operator& b_local, const Region& b_region,
                                 const State& phi);

/// Unit vector psi + phi with psi in range(EF), phi in range((I-E)(I-F)),
/// each of squared norm 1/2, picked deterministically (projection of the
/// lowest-index canonical basis vector). E and F are local projections on
/// two spacelike regions.
State borchers_entangle(const LatticeNet& net, const Region& r1, const Operator& e_local,
                        const Region& r2, const Operator& f_local);

/// (psi_1 (x) phi_1 + psi_2 (x) phi_2)/sqrt(2) across two regions that are
/// spacelike with a margin of at least two sites, reference state elsewhere.
State split_entangle(const LatticeNet& net, const Region& r1, const State& psi1,
                     const State& psi2, const Region& r2, const State& phi1, const State& phi2);

} // namespace lqm
