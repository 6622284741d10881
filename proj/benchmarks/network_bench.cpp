#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "uavsim/map_pipeline.h"
#include "uavsim/q_network.h"
#include "uavsim/scenarios.h"

namespace {

using namespace uavsim;

struct Fixture {
    QNetwork net;
    std::vector<double> params;
    std::vector<Observation> observations;
    std::vector<const Observation*> batch;

    Fixture(int local_size, int global_scaling, int batch_size)
        : net(NetworkConfig{}, ObservationSpec{local_size, global_scaling}, 32) {
        std::mt19937_64 rng(7);
        params = net.initial_parameters(rng);
        auto env = std::make_shared<const EnvironmentMap>(builtin_map("manhattan32"));
        ScenarioConfig scenario;
        for (int i = 0; i < batch_size; ++i) {
            const EpisodeState state = new_episode(env, scenario, rng);
            observations.push_back(assemble_observation(state, ObservationSpec{local_size, global_scaling}));
        }
        for (const auto& o : observations) batch.push_back(&o);
    }
};

void BM_Forward(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), static_cast<int>(state.range(2)));
    for (auto _ : state) {
        auto q = f.net.forward(f.params, f.batch, nullptr);
        benchmark::DoNotOptimize(q.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_ForwardBackward(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), static_cast<int>(state.range(2)));
    std::vector<double> grad(f.params.size());
    ForwardCache cache;
    for (auto _ : state) {
        auto q = f.net.forward(f.params, f.batch, &cache);
        Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(q.rows(), q.cols(), 1e-3);
        f.net.backward(f.params, cache, dq, grad);
        benchmark::DoNotOptimize(grad.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(2));
}

void BM_AssembleObservation(benchmark::State& state) {
    auto env = std::make_shared<const EnvironmentMap>(builtin_map("manhattan32"));
    std::mt19937_64 rng(3);
    const EpisodeState episode = new_episode(env, ScenarioConfig{}, rng);
    const ObservationSpec spec{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
    for (auto _ : state) {
        auto obs = assemble_observation(episode, spec);
        benchmark::DoNotOptimize(obs.flying_time);
    }
}

}  // namespace

BENCHMARK(BM_Forward)->Args({17, 3, 32})->Args({0, 1, 32})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardBackward)->Args({17, 3, 32})->Args({0, 1, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleObservation)->Args({17, 3})->Args({0, 1});

BENCHMARK_MAIN();
