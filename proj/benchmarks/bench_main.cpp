#include <torusflow/construction.hpp>
#include <torusflow/radial_solver.hpp>
#include <torusflow/verify.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace torusflow;

static void BM_IntegrateUndampedS5(benchmark::State& state) {
    const auto u = fundamental_fields_s5();
    const Field x = lifted_field_s5() + u[0] + std::exp(1.0) * u[1] + std::exp(2.0) * u[2];
    const Vec p = SpherePoint::from_pairs(0.2, 0.3, 0.5, 0.1, 0.2, 0.3).y;
    const double t1 = static_cast<double>(state.range(0));
    for (auto _ : state) {
        const Trajectory tr = integrate(x, p, 0.0, t1, {1e-10, 1e-12});
        benchmark::DoNotOptimize(tr.points.back());
        state.counters["steps"] = static_cast<double>(tr.stats.accepted);
    }
}
BENCHMARK(BM_IntegrateUndampedS5)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_CommutantProbe(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const Field x = radial_plus_affine(k, Vec{{1.0, std::sqrt(2.0)}});
    ProbeOptions o;
    o.collocation = 500;
    for (auto _ : state) {
        const CommutantProbeReport r = commutant_dimension_probe(x, o);
        benchmark::DoNotOptimize(r.estimated_dimension);
    }
}
BENCHMARK(BM_CommutantProbe)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_HaarAverageFunction(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    const Vec q = SpherePoint::normalized(Vec{{0.4, -0.2, 0.7, 0.1, -0.3, 0.45}}).y;
    const ScalarFn theta =
        haar_average_function([q](const Vec& y) { return (y - q).squaredNorm(); }, Chart::sphere5(), nodes);
    const Vec p = SpherePoint::from_pairs(0.2, 0.3, 0.5).y;
    for (auto _ : state) benchmark::DoNotOptimize(theta(p));
    state.SetItemsProcessed(state.iterations() * nodes * nodes * nodes);
}
BENCHMARK(BM_HaarAverageFunction)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_RadialSolve(benchmark::State& state) {
    const ScalarFn g = [](const Vec& x) { return std::sin(x[0]) * x[1]; };
    const RadialSolution f = solve_radial(g, 2);
    const Vec x{{1.3, -0.7}};
    for (auto _ : state) benchmark::DoNotOptimize(f(x));
}
BENCHMARK(BM_RadialSolve);

static void BM_ClassifyLineForward(benchmark::State& state) {
    const LineModel m = line_model_fields(LineBase::line, Vec{{1.0}});
    for (auto _ : state) {
        const LimitSetReport r = classify_limit(m.describing, Vec{{0.5, 0.0}}, TimeDirection::forward, 1e12);
        benchmark::DoNotOptimize(r.final_distance);
    }
}
BENCHMARK(BM_ClassifyLineForward)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
