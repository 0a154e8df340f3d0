// Serial reference vs OpenMP kernels: dense H application, exact
// summation, and Metropolis chain batches.
#include <benchmark/benchmark.h>

#include <random>

#include "qvmc/oracles.hpp"

using namespace qvmc;

namespace {

JastrowParams random_params(const JastrowBasis& basis, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.3);
    JastrowParams p = JastrowParams::zeros(basis);
    for (auto& c : p.j1) c = {g(rng), g(rng)};
    for (auto& c : p.j2) c = {g(rng), g(rng)};
    return p;
}

Exec exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Exec::Serial : Exec::OpenMP;
}

void bench_apply_hamiltonian(benchmark::State& state) {
    auto inst = gen_sk(16, 1);
    auto diag = classical_diagonal(inst);
    Eigen::VectorXcd in = Eigen::VectorXcd::Random(1 << 16), out(1 << 16);
    for (auto _ : state) {
        apply_hamiltonian(inst, 0.5, diag, in, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * (1 << 16));
}

void bench_exact_sum(benchmark::State& state) {
    auto inst = gen_sk(14, 2);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 3);
    for (auto _ : state) {
        auto stats = exact_sum_stats(basis, p, inst, 0.5, exec_of(state));
        benchmark::DoNotOptimize(stats.weight);
    }
    state.SetItemsProcessed(state.iterations() * (1 << 14));
}

void bench_sample_batch(benchmark::State& state) {
    auto inst = gen_sk(24, 4);
    auto basis = JastrowBasis::build(inst, ParamSupport::GraphEdges);
    auto p = random_params(basis, 5);
    const SamplingPlan plan{4, 100, 20000, 1};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto stats = sample_batch(basis, p, inst, 0.5, plan, ++seed, exec_of(state));
        benchmark::DoNotOptimize(stats.weight);
    }
    state.SetItemsProcessed(state.iterations() * plan.n_samples);
}

BENCHMARK(bench_apply_hamiltonian)->Arg(0)->Arg(1)->ArgName("openmp");
BENCHMARK(bench_exact_sum)->Arg(0)->Arg(1)->ArgName("openmp");
BENCHMARK(bench_sample_batch)->Arg(0)->Arg(1)->ArgName("openmp");

}  // namespace

BENCHMARK_MAIN();
