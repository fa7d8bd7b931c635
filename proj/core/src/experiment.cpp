#include "lqm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <thread>

#include "lqm/amplifier.hpp"
#include "lqm/epr.hpp"
#include "lqm/linalg.hpp"
#include "lqm/localnet.hpp"
#include "lqm/measurement.hpp"
#include "lqm/quantum.hpp"
#include "lqm/rng.hpp"
#include "lqm/spacetime.hpp"
#include "lqm/version.hpp"

namespace lqm {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config field access
// ---------------------------------------------------------------------------

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double field_num(const json& j, const std::string& scope, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) bad_field(scope + "." + key, "expected a number");
    return j.at(key).get<double>();
}

std::int64_t field_int(const json& j, const std::string& scope, const std::string& key,
                       std::int64_t dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer()) bad_field(scope + "." + key, "expected an integer");
    return j.at(key).get<std::int64_t>();
}

std::vector<double> field_num_array(const json& j, const std::string& scope,
                                    const std::string& key, std::vector<double> dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) bad_field(scope + "." + key, "expected a nonempty array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) bad_field(scope + "." + key, "expected numeric entries");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<int> field_int_array(const json& j, const std::string& scope, const std::string& key,
                                 std::vector<int> dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_array() || v.empty()) bad_field(scope + "." + key, "expected a nonempty array");
    std::vector<int> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) bad_field(scope + "." + key, "expected integer entries");
        out.push_back(e.get<int>());
    }
    return out;
}

// Regions are written {"sites": [..], "t": [t_min, t_max]}.
Region field_region(const json& j, const std::string& scope, const std::string& key,
                    const Region& dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    const std::string path = scope + "." + key;
    if (!v.is_object() || !v.contains("sites") || !v.contains("t"))
        bad_field(path, "expected {\"sites\": [..], \"t\": [t_min, t_max]}");
    std::vector<std::int64_t> sites;
    for (const auto& s : v.at("sites")) {
        if (!s.is_number_integer()) bad_field(path + ".sites", "expected integer sites");
        sites.push_back(s.get<std::int64_t>());
    }
    const json& t = v.at("t");
    if (!t.is_array() || t.size() != 2) bad_field(path + ".t", "expected [t_min, t_max]");
    try {
        return make_region(std::move(sites), t[0].get<std::int64_t>(), t[1].get<std::int64_t>());
    } catch (const ArgumentError& e) {
        bad_field(path, e.what());
    }
}

// Complex scalars are written [re, im].
cxd parse_complex(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        bad_field(path, "expected a complex number as [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Event field_event(const json& j, const std::string& scope, const std::string& key, Event dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    const std::string path = scope + "." + key;
    if (!v.is_object() || !v.contains("x") || !v.contains("t"))
        bad_field(path, "expected {\"x\": .., \"t\": ..}");
    return Event{v.at("x").get<std::int64_t>(), v.at("t").get<std::int64_t>()};
}

// ---------------------------------------------------------------------------
// Deterministic random inputs
// ---------------------------------------------------------------------------

// Deterministic parallel sweep: every index writes only its own slot.
void parallel_sweep(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, count));
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

Eigen::MatrixXcd gaussian_matrix(Rng& rng, Index n) {
    Eigen::MatrixXcd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const auto [re, im] = rng.gaussian_pair();
            g(i, j) = cxd(re, im);
        }
    return g;
}

Operator random_hermitian(Rng& rng, std::vector<Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    Eigen::MatrixXcd g = gaussian_matrix(rng, n);
    return Operator(0.5 * (g + g.adjoint().eval()), std::move(dims));
}

State random_state(Rng& rng, std::vector<Index> dims) {
    Index n = 1;
    for (Index d : dims) n *= d;
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) {
        const auto [re, im] = rng.gaussian_pair();
        v[i] = cxd(re, im);
    }
    v /= v.norm();
    return State(std::move(v), std::move(dims));
}

std::vector<double> linspace(double lo, double hi, std::int64_t points) {
    std::vector<double> out;
    if (points == 1) {
        out.push_back(lo);
        return out;
    }
    for (std::int64_t i = 0; i < points; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    return out;
}

State uniform_superposition(Index dim) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(double(dim)));
    return State(std::move(v), {dim});
}

// Qubit chain state: local state on `targets`, slot |0> everywhere else.
State chain_state_with(const LatticeNet& net, const State& local, const std::vector<int>& targets) {
    return embed_state(local, targets, net.chain_dims());
}

// ---------------------------------------------------------------------------
// measure: coupling construction, mixture identity, intertwining residual,
// partial-coupling fidelity.
// ---------------------------------------------------------------------------

void run_measure(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const Index d = field_int(p, "measure", "system_dim", 2);
    if (d < 2 || d > 16) bad_field("measure.system_dim", "expected 2..16");
    const std::int64_t t_points = field_int(p, "measure", "t_points", 21);
    if (t_points < 2) bad_field("measure.t_points", "expected at least 2 grid points");
    const auto epsilons = field_num_array(p, "measure", "epsilons", {0.0, 0.01, 0.1});
    const std::int64_t eq4_samples = field_int(p, "measure", "eq4_samples", 1000);
    if (eq4_samples < 1) bad_field("measure.eq4_samples", "expected a positive count");

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (Index i = 0; i < d; ++i) a(i, i) = static_cast<double>(i);
    const SpectralObservable obs = spectral_decompose(Operator(a, {d}));

    std::vector<State> pointers;
    for (Index i = 0; i < d; ++i) pointers.push_back(basis_state(i, {d}));
    const MeasurementModel model = build_coupling(obs, basis_state(0, {d}), pointers);
    const State phi = uniform_superposition(d);

    HamiltonianSpec free_off;
    free_off.h_sys = zero_op({d});
    free_off.h_micro = zero_op({d});

    rec.columns = {"t", "fidelity"};
    for (const auto& [t, f] : finite_T_fidelity(free_off, model, phi, linspace(0.0, 1.0, t_points)))
        rec.rows.push_back({t, f});

    const Isometry w = ready_isometry(model);
    const std::vector<Isometry> family = outcome_isometries(model);
    rec.metrics["intertwiner_residual_free_off"] =
        heisenberg_intertwiner(free_off, model, w, family, true);
    rec.metrics["pointer_family_residual"] =
        validate_isometry_family(std::span<const Isometry>(family));

    json sweep = json::array();
    const Operator x01 = hermitian_basis(d)[0]; // unit-norm offdiagonal generator
    for (double eps : epsilons) {
        HamiltonianSpec spec;
        spec.h_sys = Operator(eps * x01.mat, {d});
        spec.h_micro = zero_op({d});
        const double r = heisenberg_intertwiner(spec, model, w, family, false);
        sweep.push_back({{"epsilon", eps},
                         {"residual", r},
                         {"bound", 2.0 * eps * model.duration + 1e-9}});
    }
    rec.metrics["intertwiner_sweep"] = sweep;

    Rng rng(cfg.seed);
    double eq4_worst = 0.0;
    for (std::int64_t s = 0; s < eq4_samples; ++s) {
        const State sample_phi = random_state(rng, {d});
        const Operator b = random_hermitian(rng, {d});
        const State psi = apply_measurement(model, sample_phi);
        const double lhs = reduced_expectation(psi, b);
        double rhs = 0.0;
        for (int j = 0; j < obs.outcomes(); ++j) {
            const Eigen::VectorXcd ej = obs.projections[j].mat * sample_phi.amp;
            rhs += (ej.adjoint() * b.mat * ej)(0, 0).real();
        }
        eq4_worst = std::max(eq4_worst, std::abs(lhs - rhs));
    }
    rec.metrics["mixture_identity_max_deviation"] = eq4_worst;
    rec.metrics["mixture_identity_samples"] = eq4_samples;
}

// ---------------------------------------------------------------------------
// decohere: overlap-decay law, dense/symbolic agreement, restricted-algebra
// mixture bound.
// ---------------------------------------------------------------------------

void run_decohere(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const double r = field_num(p, "decohere", "overlap", 0.5);
    if (!(std::abs(r) < 1.0)) bad_field("decohere.overlap", "expected |overlap| < 1");
    const std::int64_t n_min = field_int(p, "decohere", "n_min", 1);
    const std::int64_t n_max = field_int(p, "decohere", "n_max", 20);
    if (n_min < 1 || n_max < n_min) bad_field("decohere.n_min/n_max", "empty N grid");
    const std::int64_t dense_max = field_int(p, "decohere", "dense_check_max", 10);

    cxd wa(1.0 / std::sqrt(2.0), 0.0), wb = wa;
    if (p.contains("weights")) {
        const json& w = p.at("weights");
        if (!w.is_array() || w.size() != 2) bad_field("decohere.weights", "expected two [re, im]");
        wa = parse_complex(w[0], "decohere.weights[0]");
        wb = parse_complex(w[1], "decohere.weights[1]");
    }

    const State a1 = basis_state(0, {2});
    Eigen::VectorXcd v2(2);
    v2 << r, std::sqrt(1.0 - r * r);
    const State a2 = State(std::move(v2), {2});

    rec.columns = {"N", "interference"};
    for (std::int64_t n = n_min; n <= n_max; ++n) {
        const Amplifier amp = make_amplifier(static_cast<int>(n), {a1, a2});
        rec.rows.push_back({static_cast<double>(n), interference_magnitude(amp, wa, wb)});
    }

    double dense_diff = 0.0;
    for (std::int64_t n = n_min; n <= std::min(n_max, dense_max); ++n) {
        const Amplifier amp = make_amplifier(static_cast<int>(n), {a1, a2});
        const cxd dense = pointer_state(amp, 0).amp.dot(pointer_state(amp, 1).amp);
        const cxd symbolic = std::pow(amp.readout_overlap, static_cast<double>(n));
        dense_diff = std::max(dense_diff, std::abs(dense - symbolic));
    }
    rec.metrics["dense_symbolic_max_diff"] = dense_diff;

    const std::int64_t mix_n = p.contains("mixture")
                                   ? field_int(p.at("mixture"), "decohere.mixture", "n", 6)
                                   : 6;
    const std::int64_t mix_k = p.contains("mixture")
                                   ? field_int(p.at("mixture"), "decohere.mixture", "k", 2)
                                   : 2;
    if (mix_k < 0 || mix_k > mix_n) bad_field("decohere.mixture.k", "expected 0 <= k <= n");
    {
        const Amplifier amp = make_amplifier(static_cast<int>(mix_n), {a1, a2});
        State xi = kron(kron(basis_state(0, {2}), basis_state(0, {2})), pointer_state(amp, 0));
        State eta = kron(kron(basis_state(1, {2}), basis_state(1, {2})), pointer_state(amp, 1));
        const auto mix = mixture_law_check(xi, eta, wa, wb,
                                           {static_cast<int>(mix_k)}, amp);
        rec.metrics["mixture_n"] = mix_n;
        rec.metrics["mixture_k"] = mix_k;
        rec.metrics["mixture_deviation"] = mix.max_deviation;
        rec.metrics["mixture_bound"] = mix.bound;
    }
}

// ---------------------------------------------------------------------------
// nosignal: expectation shift of spacelike probes when the apparatus is
// added, before and after the coupling.
// ---------------------------------------------------------------------------

void run_nosignal(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const int n_sites = static_cast<int>(field_int(p, "nosignal", "n_sites", 8));
    if (n_sites < 4 || n_sites > 14) bad_field("nosignal.n_sites", "expected 4..14");
    const Region region = field_region(p, "nosignal", "region", make_region({0, 1}, 0, 1));
    const Region probe = field_region(p, "nosignal", "probe_region", make_region({5}, 0, 0));
    const auto system_sites = field_int_array(p, "nosignal", "system_sites", {0});
    const auto apparatus_sites = field_int_array(p, "nosignal", "apparatus_sites", {1});
    const std::int64_t samples = field_int(p, "nosignal", "samples", 1000);
    if (samples < 1) bad_field("nosignal.samples", "expected a positive count");

    const LatticeNet net = make_net(n_sites);
    const SpectralObservable obs = spectral_decompose(pauli_z());
    Index app_dim = 1;
    for (size_t i = 0; i < apparatus_sites.size(); ++i) app_dim *= net.site_dim;
    std::vector<State> pointers{basis_state(0, {app_dim}), basis_state(app_dim - 1, {app_dim})};
    LocalizedMeasurement lm;
    try {
        lm = localize_measurement(net, region, system_sites, apparatus_sites, obs,
                                  basis_state(0, {app_dim}), pointers);
    } catch (const CapacityError&) {
        throw;
    } catch (const std::exception& e) {
        bad_field("nosignal.region/system_sites/apparatus_sites", e.what());
    }

    std::vector<int> free_sites;
    for (int s = 0; s < n_sites; ++s)
        if (std::find(apparatus_sites.begin(), apparatus_sites.end(), s) == apparatus_sites.end())
            free_sites.push_back(s);
    std::vector<Index> free_dims(free_sites.size(), net.site_dim);
    Index probe_dim = 1;
    for (size_t i = 0; i < probe.sites.size(); ++i) probe_dim *= net.site_dim;

    rec.columns = {"trial", "delta_ready", "delta_coupled"};
    rec.rows.assign(static_cast<size_t>(samples), {});
    parallel_sweep(samples, cfg.threads, [&](std::int64_t i) {
        Rng rng = Rng::for_block(cfg.seed, static_cast<std::uint64_t>(i));
        const State phi = chain_state_with(net, random_state(rng, free_dims), free_sites);
        const Operator b = random_hermitian(rng, {probe_dim});
        const NoSignalDelta delta = no_signaling_check(net, lm, b, probe, phi);
        rec.rows[static_cast<size_t>(i)] = {static_cast<double>(i), delta.before_coupling,
                                            delta.after_coupling};
    });
    double worst_before = 0.0, worst_after = 0.0;
    for (const auto& row : rec.rows) {
        worst_before = std::max(worst_before, row[1]);
        worst_after = std::max(worst_after, row[2]);
    }
    rec.metrics["max_delta"] = std::max(worst_before, worst_after);
    rec.metrics["max_delta_ready"] = worst_before;
    rec.metrics["max_delta_coupled"] = worst_after;
    rec.metrics["locality_residual"] = locality_check(net, region, probe);
}

// ---------------------------------------------------------------------------
// epr: joint statistics, sampling, and record availability along worldlines.
// ---------------------------------------------------------------------------

void run_epr(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const double alice_angle = field_num(p, "epr", "alice_angle", 0.0);
    const double bob_angle = field_num(p, "epr", "bob_angle", std::numbers::pi / 4.0);
    const auto chsh_angles = field_num_array(
        p, "epr", "chsh_angles",
        {0.0, std::numbers::pi / 2.0, std::numbers::pi / 4.0, 3.0 * std::numbers::pi / 4.0});
    if (chsh_angles.size() != 4) bad_field("epr.chsh_angles", "expected four angles");
    const std::int64_t trials = field_int(p, "epr", "trials", 100000);
    if (trials < 1) bad_field("epr.trials", "expected a positive count");

    const Event source = field_event(p, "epr", "source", Event{0, 0});
    const Event alice = field_event(p, "epr", "alice", Event{-5, 5});
    const Event bob = field_event(p, "epr", "bob", Event{5, 5});

    State pair = singlet();
    if (p.contains("pair_state")) {
        const json& v = p.at("pair_state");
        if (!v.is_array() || v.size() != 4)
            bad_field("epr.pair_state", "expected four [re, im] amplitudes");
        Eigen::VectorXcd amp(4);
        for (int i = 0; i < 4; ++i)
            amp[i] = parse_complex(v[i], "epr.pair_state[" + std::to_string(i) + "]");
        const double norm = amp.norm();
        if (norm < 1e-12) bad_field("epr.pair_state", "state has zero norm");
        pair = State(amp / norm, {2, 2});
    }

    EprSetup setup;
    try {
        setup = make_epr_setup(source, alice, bob, pair, alice_angle, bob_angle);
    } catch (const ArgumentError& e) {
        bad_field("epr.source/alice/bob", e.what());
    }

    const SampleRun run = sample_run(setup, trials, cfg.seed, cfg.threads);
    rec.columns = {"trial", "alice_setting", "bob_setting", "alice_outcome", "bob_outcome"};
    rec.rows.reserve(static_cast<size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i)
        rec.rows.push_back({static_cast<double>(i), alice_angle, bob_angle,
                            static_cast<double>(run.alice.sample_outcomes[static_cast<size_t>(i)]),
                            static_cast<double>(run.bob.sample_outcomes[static_cast<size_t>(i)])});

    const double analytic = joint_correlation(setup);
    rec.metrics["analytic_correlation"] = analytic;
    rec.metrics["empirical_correlation"] = run.empirical_correlation;
    rec.metrics["empirical_stderr"] =
        std::sqrt(std::max(0.0, 1.0 - analytic * analytic) / static_cast<double>(trials));
    rec.metrics["chsh"] =
        chsh_value(setup, chsh_angles[0], chsh_angles[1], chsh_angles[2], chsh_angles[3]);

    double marg = 0.0;
    for (double remote : {0.0, std::numbers::pi / 7.0, 1.1}) {
        const auto base = local_marginal(setup, Party::alice, RemoteAction::none());
        const auto moved = local_marginal(setup, Party::alice, RemoteAction::measure(remote));
        marg = std::max({marg, std::abs(base[0] - moved[0]), std::abs(base[1] - moved[1])});
    }
    rec.metrics["marginal_invariance_delta"] = marg;

    const Availability at_detection = correlation_available(setup, alice);
    json avail;
    avail["available_at_detection"] = at_detection.available;
    if (at_detection.earliest_time) avail["earliest_time"] = *at_detection.earliest_time;
    const std::int64_t stride =
        std::max<std::int64_t>(1, (at_detection.earliest_time.value_or(alice.t) - alice.t) / 4);
    json timeline = json::array();
    for (std::int64_t t = alice.t;; t += stride) {
        const Availability a = correlation_available(setup, Event{alice.x, t});
        timeline.push_back({{"t", t}, {"available", a.available}});
        if (a.available) break;
    }
    avail["timeline"] = timeline;
    rec.metrics["availability"] = avail;
}

// ---------------------------------------------------------------------------
// entangle: both entangled-state constructions across far regions.
// ---------------------------------------------------------------------------

void run_entangle(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const int n_sites = static_cast<int>(field_int(p, "entangle", "n_sites", 8));
    if (n_sites < 3 || n_sites > 14) bad_field("entangle.n_sites", "expected 3..14");
    const Region r1 = field_region(p, "entangle", "region_1", make_region({0}, 0, 0));
    const Region r2 = field_region(p, "entangle", "region_2", make_region({5}, 0, 0));

    const LatticeNet net = make_net(n_sites);
    for (const auto& [name, region] : {std::pair<const char*, const Region*>{"region_1", &r1},
                                       {"region_2", &r2}})
        for (std::int64_t s : region->sites)
            if (s < 0 || s >= n_sites)
                bad_field(std::string("entangle.") + name,
                          "site " + std::to_string(s) + " outside the chain");
    const auto dims = net.chain_dims();
    Index d1 = 1, d2 = 1;
    for (size_t i = 0; i < r1.sites.size(); ++i) d1 *= net.site_dim;
    for (size_t i = 0; i < r2.sites.size(); ++i) d2 *= net.site_dim;
    std::vector<int> s1(r1.sites.begin(), r1.sites.end());
    std::vector<int> s2(r2.sites.begin(), r2.sites.end());

    const Operator e_local = outer(basis_state(0, {d1}), basis_state(0, {d1}));
    const Operator f_local = outer(basis_state(0, {d2}), basis_state(0, {d2}));
    const Operator e = embed(e_local, s1, dims);
    const Operator f = embed(f_local, s2, dims);
    double locality_residual = 0.0;
    try {
        locality_residual = locality_check(net, r1, r2);
    } catch (const std::exception& e2) {
        bad_field("entangle.region_1/region_2", e2.what());
    }

    auto expectation = [](const State& psi, const Operator& op) {
        return (psi.amp.adjoint() * op.mat * psi.amp)(0, 0).real();
    };
    auto analyze = [&](const State& psi, const Operator& pe, const Operator& pf, double id) {
        const double vef = expectation(psi, Operator(pe.mat * pf.mat, pe.factor_dims));
        const double ve = expectation(psi, pe);
        const double vf = expectation(psi, pf);
        const Operator reduced = partial_trace(outer(psi, psi), s1);
        const Eigen::VectorXd schmidt = schmidt_coefficients(psi, s1);
        rec.rows.push_back({id, vef, ve, vf, vef - ve * vf, von_neumann_entropy(reduced),
                            schmidt[0], schmidt.size() > 1 ? schmidt[1] : 0.0,
                            locality_residual});
    };

    rec.columns = {"construction", "ef", "e", "f", "covariance", "entropy",
                   "schmidt_1", "schmidt_2", "locality_residual"};

    try {
        const State borchers = borchers_entangle(net, r1, e_local, r2, f_local);
        analyze(borchers, e, f, 0.0);

        const State split = split_entangle(net, r1, basis_state(0, {d1}), basis_state(1, {d1}),
                                           r2, basis_state(0, {d2}), basis_state(1, {d2}));
        analyze(split, e, f, 1.0);
    } catch (const CapacityError&) {
        throw;
    } catch (const std::exception& e2) {
        bad_field("entangle.region_1/region_2", e2.what());
    }

    rec.metrics["spacelike_gap"] = min_spacelike_gap(r1, r2);
    rec.metrics["locality_residual"] = locality_residual;
}

// ---------------------------------------------------------------------------
// limits: the three idealization sweeps (coupling time, amplifier size,
// apparatus extent).
// ---------------------------------------------------------------------------

void run_limits(const ExperimentConfig& cfg, ExperimentRecord& rec) {
    const json& p = cfg.params;
    const std::int64_t t_points = field_int(p, "limits", "t_points", 11);
    if (t_points < 2) bad_field("limits.t_points", "expected at least 2 grid points");
    const std::int64_t n_min = field_int(p, "limits", "n_min", 1);
    const std::int64_t n_max = field_int(p, "limits", "n_max", 20);
    if (n_min < 1 || n_max < n_min) bad_field("limits.n_min/n_max", "empty N grid");
    const double r = field_num(p, "limits", "overlap", 0.5);
    if (!(std::abs(r) < 1.0)) bad_field("limits.overlap", "expected |overlap| < 1");
    const auto radii = field_int_array(p, "limits", "apparatus_sizes", {1, 2, 3});
    const int n_sites = static_cast<int>(field_int(p, "limits", "n_sites", 8));
    if (n_sites < 6 || n_sites > 14) bad_field("limits.n_sites", "expected 6..14");

    rec.columns = {"limit", "x", "value"};

    // Limit 1: partial coupling time, fidelity to the pointer branches.
    {
        const SpectralObservable obs = spectral_decompose(pauli_z());
        std::vector<State> pointers{basis_state(0, {2}), basis_state(1, {2})};
        const MeasurementModel model = build_coupling(obs, basis_state(0, {2}), pointers);
        HamiltonianSpec free_off;
        free_off.h_sys = zero_op({2});
        free_off.h_micro = zero_op({2});
        const State phi = uniform_superposition(2);
        for (const auto& [t, f] :
             finite_T_fidelity(free_off, model, phi, linspace(0.0, 1.0, t_points)))
            rec.rows.push_back({1.0, t, f});
    }

    // Limit 2: amplifier size, cross-branch interference magnitude.
    {
        const State a1 = basis_state(0, {2});
        Eigen::VectorXcd v2(2);
        v2 << r, std::sqrt(1.0 - r * r);
        const State a2 = State(std::move(v2), {2});
        const cxd w(1.0 / std::sqrt(2.0), 0.0);
        for (std::int64_t n = n_min; n <= n_max; ++n)
            rec.rows.push_back(
                {2.0, static_cast<double>(n),
                 interference_magnitude(make_amplifier(static_cast<int>(n), {a1, a2}), w, w)});
    }

    // Limit 3: apparatus extent R; probes outside the region stay unchanged
    // (value column), probes inside see the coupling (metrics).
    {
        const LatticeNet net = make_net(n_sites);
        json inside = json::array();
        for (int radius : radii) {
            if (radius < 1 || radius + 3 > n_sites)
                bad_field("limits.apparatus_sizes", "radius leaves no spacelike probe site");
            std::vector<std::int64_t> region_sites;
            for (int s = 0; s <= radius; ++s) region_sites.push_back(s);
            const Region region = make_region(region_sites, 0, 1);
            std::vector<int> app_sites;
            for (int s = 1; s <= radius; ++s) app_sites.push_back(s);
            Index app_dim = 1;
            for (size_t i = 0; i < app_sites.size(); ++i) app_dim *= net.site_dim;

            const SpectralObservable obs = spectral_decompose(pauli_z());
            std::vector<State> pointers{basis_state(0, {app_dim}),
                                        basis_state(app_dim - 1, {app_dim})};
            const LocalizedMeasurement lm = localize_measurement(
                net, region, {0}, app_sites, obs, basis_state(0, {app_dim}), pointers);

            Eigen::VectorXcd plus(2);
            plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
            const State phi = chain_state_with(net, State(std::move(plus), {2}), {0});

            double outside = 0.0;
            for (int s = radius + 2; s < n_sites; ++s) {
                const Region probe = make_region({s}, 0, 0);
                const NoSignalDelta delta =
                    no_signaling_check(net, lm, pauli_x(), probe, phi);
                outside = std::max(outside, delta.max());
            }
            rec.rows.push_back({3.0, static_cast<double>(radius), outside});

            // Visibility at an apparatus site, for contrast.
            const Operator bz = embed(pauli_z(), {app_sites.front()}, net.chain_dims());
            const Eigen::VectorXcd after = lm.w_evolved.matrix.mat * phi.amp;
            const double before_v = (phi.amp.adjoint() * bz.mat * phi.amp)(0, 0).real();
            const double after_v = (after.adjoint() * bz.mat * after)(0, 0).real();
            inside.push_back({{"apparatus_size", radius},
                              {"inside_delta", std::abs(after_v - before_v)},
                              {"region_fraction",
                               static_cast<double>(radius + 1) / static_cast<double>(n_sites)}});
        }
        rec.metrics["apparatus_extent"] = inside;
    }
}

void require_finite(const ExperimentRecord& rec) {
    for (const auto& row : rec.rows) {
        if (row.size() != rec.columns.size())
            throw ConstructionError("experiment row width does not match columns");
        for (double v : row)
            if (!std::isfinite(v)) throw ConstructionError("experiment produced a non-finite value");
    }
}

} // namespace

ExperimentConfig config_from_json(const json& j, const std::string& expected_experiment) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    if (j.contains("experiment")) {
        if (!j.at("experiment").is_string())
            throw ConfigError("experiment: expected a string");
        cfg.experiment = j.at("experiment").get<std::string>();
    }
    if (!expected_experiment.empty()) {
        if (cfg.experiment.empty())
            cfg.experiment = expected_experiment;
        else if (cfg.experiment != expected_experiment)
            throw ConfigError("experiment: config says '" + cfg.experiment +
                              "' but the subcommand is '" + expected_experiment + "'");
    }
    if (cfg.experiment.empty()) throw ConfigError("experiment: missing");
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
        throw ConfigError("experiment: unknown experiment '" + cfg.experiment + "'");

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) throw ConfigError("seed: expected an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("output_dir: expected a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1)
            throw ConfigError("threads: expected a positive integer");
        cfg.threads = j.at("threads").get<int>();
    }
    cfg.params = j;
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  const std::string& expected_experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error in '" + path.string() + "': " + e.what());
    }
    return config_from_json(j, expected_experiment);
}

ExperimentRecord run_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    rec.experiment = config.experiment;
    rec.config_echo = config.params;
    rec.version = kVersion;

    const bool needs_seed = config.experiment == "measure" || config.experiment == "nosignal" ||
                            config.experiment == "epr";
    if (needs_seed && !config.seed_set)
        throw ConfigError("seed: required for experiment '" + config.experiment + "'");

    if (config.experiment == "measure")
        run_measure(config, rec);
    else if (config.experiment == "decohere")
        run_decohere(config, rec);
    else if (config.experiment == "nosignal")
        run_nosignal(config, rec);
    else if (config.experiment == "epr")
        run_epr(config, rec);
    else if (config.experiment == "entangle")
        run_entangle(config, rec);
    else if (config.experiment == "limits")
        run_limits(config, rec);
    else
        throw ConfigError("experiment: unknown experiment '" + config.experiment + "'");

    require_finite(rec);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void emit_record(const ExperimentRecord& record, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    const auto csv_path = out_dir / "results.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw ConstructionError("emit: cannot write '" + csv_path.string() + "'");
    for (size_t c = 0; c < record.columns.size(); ++c)
        csv << (c ? "," : "") << record.columns[c];
    csv << "\n";
    for (const auto& row : record.rows) {
        for (size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << format_double(row[c]);
        csv << "\n";
    }
    csv.close();
    if (!csv) throw ConstructionError("emit: failed writing '" + csv_path.string() + "'");

    json summary;
    summary["experiment"] = record.experiment;
    summary["params"] = record.config_echo;
    summary["metrics"] = record.metrics;
    summary["version"] = record.version;
    summary["wall_seconds"] = record.wall_seconds;
    summary["rows"] = record.rows.size();

    const auto json_path = out_dir / "summary.json";
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw ConstructionError("emit: cannot write '" + json_path.string() + "'");
    js << summary.dump(2) << "\n";
    js.close();
    if (!js) throw ConstructionError("emit: failed writing '" + json_path.string() + "'");
}

} // namespace lqm
