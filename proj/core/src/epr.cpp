#include "lqm/epr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "lqm/quantum.hpp"
#include "lqm/rng.hpp"

namespace lqm {

namespace {

constexpr std::int64_t kSampleBlock = 8192;

Operator qubit_projector(double theta, int sign) {
    // (I + sign * analyzer(theta)) / 2
    Eigen::MatrixXcd m = 0.5 * (Eigen::MatrixXcd::Identity(2, 2) +
                                static_cast<double>(sign) * analyzer(theta).mat);
    return Operator(std::move(m), {2});
}

} // namespace

State singlet() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return State(std::move(v), {2, 2});
}

Operator analyzer(double theta) {
    Eigen::MatrixXcd m = std::cos(theta) * pauli_z().mat + std::sin(theta) * pauli_x().mat;
    return Operator(std::move(m), {2});
}

EprSetup make_epr_setup(Event source, Event alice, Event bob, State pair_state,
                        double alice_setting, double bob_setting) {
    if (pair_state.dim() != 4)
        throw ArgumentError("epr setup needs a two-qubit pair state");
    const FutureShadow shadow = future_shadow(make_region({source.x}, source.t, source.t));
    if (!shadow.contains(alice) || !shadow.contains(bob))
        throw ArgumentError("both detection events must lie in the source's future shadow");
    if (!spacelike(alice, bob))
        throw ArgumentError("detection events must be spacelike separated");
    return EprSetup{source, alice, bob, std::move(pair_state), alice_setting, bob_setting};
}

std::array<double, 2> local_marginal(const EprSetup& setup, Party party, RemoteAction remote) {
    const int own = (party == Party::alice) ? 0 : 1;
    const int other = 1 - own;
    Operator rho = outer(setup.pair_state, setup.pair_state);
    if (remote.measures) {
        // Project-and-forget on the remote side.
        Eigen::MatrixXcd decohered = Eigen::MatrixXcd::Zero(4, 4);
        for (int sign : {+1, -1}) {
            const Operator pi = embed(qubit_projector(remote.angle, sign), {other}, {2, 2});
            decohered += pi.mat * rho.mat * pi.mat;
        }
        rho = Operator(std::move(decohered), {2, 2});
    }
    const Operator reduced = partial_trace(rho, {own});
    const double setting = (party == Party::alice) ? setup.alice_setting : setup.bob_setting;
    std::array<double, 2> out{};
    out[0] = (reduced.mat * qubit_projector(setting, +1).mat).trace().real();
    out[1] = (reduced.mat * qubit_projector(setting, -1).mat).trace().real();
    return out;
}

double joint_correlation(const EprSetup& setup, double a, double b) {
    const Operator ab = kron(analyzer(a), analyzer(b));
    return (setup.pair_state.amp.adjoint() * ab.mat * setup.pair_state.amp)(0, 0).real();
}

double joint_correlation(const EprSetup& setup) {
    return joint_correlation(setup, setup.alice_setting, setup.bob_setting);
}

double chsh_value(const EprSetup& setup, double a, double a_prime, double b, double b_prime) {
    return joint_correlation(setup, a, b) - joint_correlation(setup, a, b_prime) +
           joint_correlation(setup, a_prime, b) + joint_correlation(setup, a_prime, b_prime);
}

Availability correlation_available(const EprSetup& setup, Event observer) {
    const FutureShadow sa = future_shadow(make_region({setup.alice_event.x},
                                                      setup.alice_event.t, setup.alice_event.t));
    const FutureShadow sb = future_shadow(make_region({setup.bob_event.x},
                                                      setup.bob_event.t, setup.bob_event.t));
    Availability out;
    if (sa.contains(observer) && sb.contains(observer)) {
        out.available = true;
        out.correlation = joint_correlation(setup);
        return out;
    }
    // Static worldline: earliest t >= observer.t inside both shadows.
    const std::int64_t ta = setup.alice_event.t + std::abs(observer.x - setup.alice_event.x);
    const std::int64_t tb = setup.bob_event.t + std::abs(observer.x - setup.bob_event.x);
    out.earliest_time = std::max(observer.t, std::max(ta, tb));
    return out;
}

SampleRun sample_run(const EprSetup& setup, std::int64_t n_trials, std::uint64_t seed,
                     int threads) {
    if (n_trials < 1) throw ArgumentError("sample_run: need at least one trial");

    // Joint Born distribution over (+,+), (+,-), (-,+), (-,-).
    std::array<double, 4> p{};
    {
        int idx = 0;
        for (int sa : {+1, -1})
            for (int sb : {+1, -1}) {
                const Operator pi =
                    kron(qubit_projector(setup.alice_setting, sa),
                         qubit_projector(setup.bob_setting, sb));
                p[idx++] = (setup.pair_state.amp.adjoint() * pi.mat *
                            setup.pair_state.amp)(0, 0).real();
            }
    }
    std::array<double, 3> cuts{p[0], p[0] + p[1], p[0] + p[1] + p[2]};

    SampleRun run;
    run.alice.event = setup.alice_event;
    run.alice.setting = setup.alice_setting;
    run.alice.outcome_distribution = {p[0] + p[1], p[2] + p[3]};
    run.alice.sample_outcomes.resize(static_cast<size_t>(n_trials));
    run.bob.event = setup.bob_event;
    run.bob.setting = setup.bob_setting;
    run.bob.outcome_distribution = {p[0] + p[2], p[1] + p[3]};
    run.bob.sample_outcomes.resize(static_cast<size_t>(n_trials));

    const std::int64_t n_blocks = (n_trials + kSampleBlock - 1) / kSampleBlock;
    auto sample_block = [&](std::int64_t block) {
        Rng rng = Rng::for_block(seed, static_cast<std::uint64_t>(block));
        const std::int64_t begin = block * kSampleBlock;
        const std::int64_t end = std::min(n_trials, begin + kSampleBlock);
        for (std::int64_t i = begin; i < end; ++i) {
            const double u = rng.uniform();
            const int cell = u < cuts[0] ? 0 : (u < cuts[1] ? 1 : (u < cuts[2] ? 2 : 3));
            run.alice.sample_outcomes[static_cast<size_t>(i)] = (cell < 2) ? 1 : -1;
            run.bob.sample_outcomes[static_cast<size_t>(i)] = (cell % 2 == 0) ? 1 : -1;
        }
    };

    if (threads <= 1 || n_blocks == 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) sample_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::int64_t> counter{0};
        const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_blocks));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::int64_t b = counter.fetch_add(1); b < n_blocks;
                     b = counter.fetch_add(1))
                    sample_block(b);
            });
        for (auto& th : pool) th.join();
    }

    std::int64_t acc = 0;
    for (std::int64_t i = 0; i < n_trials; ++i)
        acc += static_cast<std::int64_t>(run.alice.sample_outcomes[static_cast<size_t>(i)]) *
               run.bob.sample_outcomes[static_cast<size_t>(i)];
    run.empirical_correlation = static_cast<double>(acc) / static_cast<double>(n_trials);
    return run;
}

} // namespace lqm
