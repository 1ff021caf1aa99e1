#include <benchmark/benchmark.h>

#include "rnl/gradients.hpp"
#include "rnl/numerics.hpp"
#include "rnl/rng.hpp"
#include "rnl/topology.hpp"
#include "rnl/training.hpp"

namespace {

rnl::ResNetModel bench_model(std::size_t depth) {
    return rnl::xavier_init(rnl::make_2d_classifier(1.0, 0.1, depth, 2), 42);
}

void bm_forward(benchmark::State& state) {
    const auto model = bench_model(static_cast<std::size_t>(state.range(0)));
    const rnl::Vec64 x{0.3, -0.7};
    for (auto _ : state) benchmark::DoNotOptimize(rnl::forward(model, x).first);
}
BENCHMARK(bm_forward)->Arg(5)->Arg(20);

void bm_input_gradient(benchmark::State& state) {
    const auto model = bench_model(static_cast<std::size_t>(state.range(0)));
    const rnl::Vec64 x{0.3, -0.7};
    for (auto _ : state) benchmark::DoNotOptimize(rnl::input_gradient(model, x).grad);
}
BENCHMARK(bm_input_gradient)->Arg(5)->Arg(20);

void bm_spectral_summary(benchmark::State& state) {
    rnl::Rng rng(7);
    const auto n = static_cast<std::size_t>(state.range(0));
    rnl::Mat64 A(n, n);
    for (double& v : A.a) v = rng.uniform(-1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(rnl::spectral_summary(A));
}
BENCHMARK(bm_spectral_summary)->Arg(2)->Arg(4);

void bm_level_components(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    rnl::GridDomain g{{-2.0, -2.0}, {2.0, 2.0}, {n, n}};
    const auto field = rnl::evaluate_grid(
        [](const rnl::Vec64& x) { return x[0] * x[0] + x[1] * x[1] - 0.5; }, g);
    for (auto _ : state) benchmark::DoNotOptimize(rnl::level_components(field, g, 0.5));
}
BENCHMARK(bm_level_components)->Arg(101)->Arg(201);

void bm_train_epoch(benchmark::State& state) {
    const auto data = rnl::make_dataset(rnl::DatasetKind::Quad1D, 300, 1);
    const auto skeleton = rnl::make_1d_regressor(1.0, 0.5, 5);
    rnl::TrainConfig tc;
    tc.epochs = 1;
    tc.loss = rnl::Loss::Mse;
    for (auto _ : state) {
        auto init = rnl::xavier_init(skeleton, 3);
        benchmark::DoNotOptimize(rnl::train(init, data, tc));
    }
}
BENCHMARK(bm_train_epoch);

} // namespace

BENCHMARK_MAIN();
