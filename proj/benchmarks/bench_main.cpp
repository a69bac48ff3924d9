#include "pusc/model.hpp"
#include "pusc/risk.hpp"
#include "pusc/sampling.hpp"
#include "pusc/trainer.hpp"

#include <benchmark/benchmark.h>

using namespace pusc;

namespace {

std::vector<double> random_scores(std::size_t n, Rng& rng) {
    std::vector<double> g(n);
    for (auto& v : g) v = 4.0 * rng.normal();
    return g;
}

void BM_RiskComponents(benchmark::State& state) {
    Rng rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto gl = random_scores(n / 4, rng);
    const auto gu = random_scores(n - n / 4, rng);
    for (auto _ : state) {
        auto r = risk_components(gl, gu, 0.5, ScenarioMode::ss, Loss{});
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RiskComponents)->Arg(64)->Arg(512)->Arg(4096);

void BM_ForwardBackward(benchmark::State& state) {
    Rng rng(2);
    const auto width = static_cast<std::size_t>(state.range(0));
    const auto model = MLPModel::init({1, width, width, width, width, 1}, Activation::tanh, rng);
    GaussianMixtureSpec mix;
    const auto data = gaussian_mixture(64, mix, rng);
    const std::vector<double> upstream(64, 1.0 / 64);
    for (auto _ : state) {
        auto g = model.forward(data.x);
        auto grads = model.backward(data.x, upstream);
        benchmark::DoNotOptimize(g);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_ForwardBackward)->Arg(8)->Arg(32)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
    Rng rng(3);
    GaussianMixtureSpec mix;
    const auto pool = gaussian_mixture(5000, mix, rng);
    ScarConfig sc;
    sc.c = 0.5;
    sc.n = 1000;
    sc.pi = 0.5;
    const auto pu = scar_label(pool, sc, rng);
    const auto model = MLPModel::init({1, 32, 32, 32, 32, 1}, Activation::tanh, rng);
    TrainerConfig cfg;
    cfg.epochs = 1;
    cfg.method = Method::nnpu_ss;
    for (auto _ : state) {
        auto res = train(pu, cfg, model);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
