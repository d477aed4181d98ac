#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sphmult/harness.hpp"
#include "sphmult/kernels.hpp"
#include "sphmult/mult.hpp"
#include "sphmult/sphfn.hpp"
#include "sphmult/transform.hpp"

using namespace sphmult;

static void BM_PhiOracle(benchmark::State& state) {
    const RankOneSpace s = RankOneSpace::CH2();
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(phi_oracle(s, 3.0, t));
}
BENCHMARK(BM_PhiOracle)->Arg(1)->Arg(5)->Arg(10);

static void BM_PhiHarishChandra(benchmark::State& state) {
    const RankOneSpace s = RankOneSpace::H3();
    const int L = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(phi_hc(s, 2.0, 2.0, L).value);
}
BENCHMARK(BM_PhiHarishChandra)->Arg(4)->Arg(12);

static void BM_SphericalTransform(benchmark::State& state) {
    const RankOneSpace s = RankOneSpace::H2();
    const auto f = RadialFunction::sample([](double t) { return cplx(std::exp(-t * t), 0.0); },
                                          RadialGrid::uniform(12.0, 0.5));
    for (auto _ : state) benchmark::DoNotOptimize(spherical_transform(s, f, 2.5));
}
BENCHMARK(BM_SphericalTransform);

static void BM_PhiP(benchmark::State& state) {
    const RankOneSpace s = RankOneSpace::H2();
    const SpectralFunction m = imaginary_power_1d(s, 1.0);
    const Exponent p(1.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(phi_p_eval(s, m, p, 3.0, PhiRoute::shifted_eps, {.lambda_max = 20.0}));
}
BENCHMARK(BM_PhiP)->Unit(benchmark::kMicrosecond);

static void BM_OperatorApply(benchmark::State& state) {
    const ProductSpace space = parse_product_space("H2xH2");
    const MultiplierSpec m = builtin_multiplier("imaginary_powers", {1.0, 1.0, 1.0}, space);
    const int n = static_cast<int>(state.range(0));
    const DiscreteOperator op(space, m, 0.04, std::sqrt(40 / 0.04), RadialGrid::uniform(4.0, 4.0 * 16 / n));
    std::vector<cplx> f(op.points() * op.points(), cplx(1.0, 0.0));
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(f));
}
BENCHMARK(BM_OperatorApply)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
