#include "dcm/catalog.hpp"
#include "dcm/clt.hpp"
#include "dcm/metrics.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace dcm;

static Pmf uniform(Index n) {
    std::vector<Pmf::Atom> atoms;
    for (Index i = 0; i < n; ++i) atoms.push_back({Rational(i), 1.0 / static_cast<double>(n)});
    return Pmf::from_atoms(std::move(atoms));
}

static void BM_convolve(benchmark::State& state) {
    Pmf a = uniform(state.range(0));
    Pmf b = uniform(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(convolve(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_convolve)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_solve(benchmark::State& state, const char* model) {
    auto e = make(model);
    for (auto _ : state) benchmark::DoNotOptimize(exact_distribution(e.spec, state.range(0)));
}
BENCHMARK_CAPTURE(BM_solve, unsuccessful_search, "unsuccessful_search")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_solve, quickselect, "quickselect")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_solve, broadcast_a_time, "broadcast_a_time")->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_zeta3_to_normal(benchmark::State& state) {
    auto e = make("node_depth");
    Pmf p = exact_distribution(e.spec, state.range(0));
    double m = moment(p, 1, false);
    double s = std::sqrt(moment(p, 2, true));
    RealPmf z = affine_real(p, 1.0 / s, -m / s);
    for (auto _ : state) benchmark::DoNotOptimize(zeta3(z, NormalMixture::standard()));
}
BENCHMARK(BM_zeta3_to_normal)->Arg(64)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

static void BM_bound23(benchmark::State& state) {
    auto e = make("unsuccessful_search");
    CltVerifier v(e.spec, e.params);
    v.moments(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(v.bound23_terms(state.range(0)));
}
BENCHMARK(BM_bound23)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
