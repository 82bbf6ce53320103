// Serial reference vs OpenMP path for the parallel kernels.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "pkmech/curvature.hpp"
#include "pkmech/hamilton.hpp"
#include "pkmech/integrate.hpp"
#include "pkmech/sampling.hpp"

using namespace pkmech;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

Metric curved_metric() {
    const Chart c(2);
    return metric_from_potential(parse("x1*y1 + x2*y2 + (x1*y1)^2 + 0.3*x1*y2*x2*y1", c), c);
}

void BM_equal_on_samples(benchmark::State& state) {
    const Chart c(3);
    const Expr a = parse("sin(x1*y2) + ln(1 + x3^2)*cos(y1) + (x2 - y3)^4", c);
    const Expr b = simplify(a);
    SampleOptions opts;
    opts.trials = 2000;
    opts.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(equal_on_samples(a, b, opts));
}

void BM_symmetry_report(benchmark::State& state) {
    const Metric g = curved_metric();
    const CurvatureTensor R = riemann(g);
    const ProductStructure J = model_product_structure(g.chart());
    for (auto _ : state) benchmark::DoNotOptimize(symmetry_report(R, J, 20, 1, mode(state)));
}

void BM_constant_c_test(benchmark::State& state) {
    const Metric g = curved_metric();
    const ProductStructure J = model_product_structure(g.chart());
    const CurvatureTensor R = riemann(g);
    const CurvatureTensor R0 = r_zero(g, J);
    for (auto _ : state) benchmark::DoNotOptimize(constant_c_test(R, R0, 20, 1, mode(state)));
}

void BM_integrate_batch(benchmark::State& state) {
    const Chart c(2);
    const ODESystem sys = hamilton_odes(HamiltonianSystem(c, parse("x1*y1 + x2*y2 + 0.1*x1^2*y2", c)));
    std::vector<std::vector<double>> states;
    for (int k = 0; k < 32; ++k) states.push_back({0.01 * k, 0.2, -0.1, 0.005 * k});
    for (auto _ : state) benchmark::DoNotOptimize(integrate_batch(sys, states, 0.0, 1.0, 1e-3, mode(state)));
}

}  // namespace

BENCHMARK(BM_equal_on_samples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_symmetry_report)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_constant_c_test)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate_batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
