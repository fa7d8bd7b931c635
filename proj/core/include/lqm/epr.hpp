#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "lqm/linalg.hpp"
#include "lqm/spacetime.hpp"

namespace lqm {

enum class Party { alice, bob };

/// What the other laboratory does while a party's marginal is computed.
struct RemoteAction {
    bool measures = false;
    double angle = 0.0;

    static RemoteAction none() { return {}; }
    static RemoteAction measure(double angle) { return {true, angle}; }
};

/// Two detection events in the future shadow of a common source, spacelike
/// to each other, sharing a two-qubit pair state.
struct EprSetup {
    Event source_event;
    Event alice_event;
    Event bob_event;
    State pair_state;
    double alice_setting = 0.0;
    double bob_setting = 0.0;
};

EprSetup make_epr_setup(Event source, Event alice, Event bob, State pair_state,
                        double alice_setting, double bob_setting);

/// (|01> - |10>)/sqrt(2).
State singlet();

/// Analyzer at angle theta in the z-x plane: cos(theta) sigma_z + sin(theta) sigma_x.
Operator analyzer(double theta);

/// (p_plus, p_minus) for the party's analyzer, from the reduced density
/// matrix. Identical for every remote action (marginal invariance).
std::array<double, 2> local_marginal(const EprSetup& setup, Party party, RemoteAction remote);

/// E(a, b) = <(sigma.a) (x) (sigma.b)> in the pair state.
double joint_correlation(const EprSetup& setup, double a, double b);
double joint_correlation(const EprSetup& setup); // at the configured settings

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
double chsh_value(const EprSetup& setup, double a, double a_prime, double b, double b_prime);

/// Whether both detection records lie in the observer's past (the observer
/// sits in the future shadow of both events); if not, the earliest time on
/// the observer's static worldline at which they will.
struct Availability {
    bool available = false;
    double correlation = 0.0;                 // payload when available
    std::optional<std::int64_t> earliest_time; // when not yet available
};

Availability correlation_available(const EprSetup& setup, Event observer);

/// Outcome record of one party over a sampled run.
struct MeasurementRecord {
    Event event;
    double setting = 0.0;
    std::array<double, 2> outcome_distribution{0.5, 0.5};
    std::vector<std::int8_t> sample_outcomes; // +1 / -1
};

struct SampleRun {
    MeasurementRecord alice;
    MeasurementRecord bob;
    double empirical_correlation = 0.0;
};

/// Seeded sampling of the joint outcome distribution. Trials are generated
/// in fixed-size blocks with per-block derived seeds, so the output is
/// byte-identical for equal (n_trials, seed) regardless of thread count.
SampleRun sample_run(const EprSetup& setup, std::int64_t n_trials, std::uint64_t seed,
                     int threads = 1);

} // namespace lqm
