#include <benchmark/benchmark.h>

#include "aor/dataset.hpp"
#include "aor/layers.hpp"
#include "aor/ortho.hpp"
#include "aor/rng.hpp"
#include "aor/split_model.hpp"
#include "aor/train.hpp"

namespace {

aor::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    aor::Rng rng(seed);
    aor::Matrix m(rows, cols);
    for (double& v : m.data)
        v = rng.normal();
    return m;
}

void bm_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const aor::Matrix a = random_matrix(n, n, 1);
    const aor::Matrix b = random_matrix(n, n, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(aor::matmul(a, b));
}
BENCHMARK(bm_matmul)->Arg(16)->Arg(64)->Arg(256);

void bm_forward_backward(benchmark::State& state) {
    const auto batch = static_cast<std::size_t>(state.range(0));
    aor::SplitModel model = aor::build_split_model({});
    const aor::Matrix x = random_matrix(batch, model.config.input_dim, 3);
    std::vector<int> labels(batch);
    for (std::size_t i = 0; i < batch; ++i)
        labels[i] = static_cast<int>(i % 4);
    const aor::Matrix targets = aor::one_hot(labels, 4);
    for (auto _ : state) {
        model.zero_grads();
        benchmark::DoNotOptimize(aor::total_loss(model, x, targets, 1.0));
    }
}
BENCHMARK(bm_forward_backward)->Arg(64)->Arg(256);

void bm_l_ortho_grad(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const aor::Matrix w1 = random_matrix(d, 16, 4);
    const aor::Matrix w2 = random_matrix(d, 16, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(aor::l_ortho_grad(w1, w2));
}
BENCHMARK(bm_l_ortho_grad)->Arg(16)->Arg(64)->Arg(256);

void bm_generate_dataset(benchmark::State& state) {
    aor::DatasetSpec spec = aor::daisee_skew_preset();
    spec.n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(aor::generate_task_dataset(spec));
}
BENCHMARK(bm_generate_dataset)->Arg(1000)->Arg(10000);

void bm_stage_b_epoch(benchmark::State& state) {
    aor::DatasetSpec spec = aor::daisee_skew_preset();
    spec.n = 4000;
    const auto ds = aor::generate_task_dataset(spec);
    const auto [train_ds, val_ds] = aor::split_train_val(ds, 0.2, 7);

    aor::SplitModel model = aor::build_split_model({});
    model.stage_tag = "stage-a";
    aor::freeze_for_stage_b(model);

    aor::TrainingConfig cfg;
    cfg.lambda = 1.0;
    cfg.epochs = 1;
    for (auto _ : state) {
        aor::SplitModel fresh = model;
        benchmark::DoNotOptimize(aor::train_stage_b(fresh, train_ds, val_ds, cfg));
    }
}
BENCHMARK(bm_stage_b_epoch);

} // namespace

BENCHMARK_MAIN();
