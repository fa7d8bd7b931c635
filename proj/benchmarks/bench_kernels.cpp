// Microbenchmarks for the tensor-product kernels and the heavier experiment
// building blocks. Run: benchmarks/lqmlab_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <cmath>

#include "lqm/amplifier.hpp"
#include "lqm/linalg.hpp"
#include "lqm/measurement.hpp"
#include "lqm/quantum.hpp"
#include "lqm/rng.hpp"

using namespace lqm;

namespace {

Operator random_hermitian(Rng& rng, Index n) {
    Eigen::MatrixXcd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const auto [re, im] = rng.gaussian_pair();
            g(i, j) = cxd(re, im);
        }
    return Operator(0.5 * (g + g.adjoint().eval()), {n});
}

void bm_kron(benchmark::State& state) {
    const Index n = state.range(0);
    Rng rng(1);
    const Operator a = random_hermitian(rng, n);
    const Operator b = random_hermitian(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(kron(a, b).mat.data());
    state.SetComplexityN(n);
}

void bm_embed_middle(benchmark::State& state) {
    const int sites = static_cast<int>(state.range(0));
    const std::vector<Index> dims(static_cast<size_t>(sites), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(embed(pauli_x(), {sites / 2}, dims).mat.data());
}

void bm_partial_trace(benchmark::State& state) {
    const int sites = static_cast<int>(state.range(0));
    Rng rng(2);
    Index n = Index(1) << sites;
    Eigen::MatrixXcd g(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = cxd(rng.uniform(), rng.uniform());
    const Operator rho(g, std::vector<Index>(static_cast<size_t>(sites), 2));
    for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, {0, 1}).mat.data());
}

void bm_expm(benchmark::State& state) {
    const Index n = state.range(0);
    Rng rng(3);
    const Operator h = random_hermitian(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(expm_i_hermitian(h, 0.7).mat.data());
}

void bm_build_coupling(benchmark::State& state) {
    const Index d = state.range(0);
    Rng rng(4);
    const SpectralObservable obs = spectral_decompose(random_hermitian(rng, d));
    std::vector<State> pointers;
    for (Index j = 0; j < d; ++j) pointers.push_back(basis_state(j, {d}));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            build_coupling(obs, basis_state(0, {d}), pointers).coupling_generator.mat.data());
}

void bm_apply_measurement(benchmark::State& state) {
    const Index d = state.range(0);
    Rng rng(5);
    const SpectralObservable obs = spectral_decompose(random_hermitian(rng, d));
    std::vector<State> pointers;
    for (Index j = 0; j < d; ++j) pointers.push_back(basis_state(j, {d}));
    const MeasurementModel m = build_coupling(obs, basis_state(0, {d}), pointers);
    Eigen::VectorXcd v(d);
    for (Index i = 0; i < d; ++i) v[i] = cxd(rng.gaussian(), rng.gaussian());
    const State phi(v / v.norm(), {d});
    for (auto _ : state) benchmark::DoNotOptimize(apply_measurement(m, phi).amp.data());
}

void bm_mixture_law(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::VectorXcd v(2);
    v << 0.5, std::sqrt(0.75);
    const Amplifier amp = make_amplifier(n, {basis_state(0, {2}), State(v, {2})});
    const State xi = kron(kron(basis_state(0, {2}), basis_state(0, {2})), pointer_state(amp, 0));
    const State eta = kron(kron(basis_state(1, {2}), basis_state(1, {2})), pointer_state(amp, 1));
    const cxd w(1.0 / std::sqrt(2.0), 0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(mixture_law_check(xi, eta, w, w, {n / 2}, amp).max_deviation);
}

} // namespace

BENCHMARK(bm_kron)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bm_embed_middle)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(bm_partial_trace)->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(bm_expm)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(bm_build_coupling)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bm_apply_measurement)->Arg(2)->Arg(8);
BENCHMARK(bm_mixture_law)->Arg(4)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
