#include <benchmark/benchmark.h>

#include "qcor/config.hpp"
#include "qcor/crosswalk.hpp"
#include "qcor/fisheries.hpp"
#include "qcor/fusion.hpp"
#include "qcor/net.hpp"
#include "qcor/replay.hpp"

namespace {

using namespace qcor;

ParamNet make_net(std::vector<int> sizes, uint64_t seed) {
  Rng rng(seed);
  return ParamNet::create(std::move(sizes), true, rng);
}

void BM_NetForwardSmall(benchmark::State& state) {
  const ParamNet net = make_net({10, 16, 4}, 1);
  VecD input(10, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(input));
}
BENCHMARK(BM_NetForwardSmall);

void BM_NetForwardDeep(benchmark::State& state) {
  const ParamNet net = make_net({88, 32, 32, 32, 32, 32, 4}, 2);
  VecD input(88, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(input));
}
BENCHMARK(BM_NetForwardDeep);

void BM_NetGradDeep(benchmark::State& state) {
  const ParamNet net = make_net({88, 32, 32, 32, 32, 32, 4}, 3);
  VecD input(88, 0.5);
  VecD cot(4, 0.0);
  cot[1] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(net.grad(input, cot));
}
BENCHMARK(BM_NetGradDeep);

void BM_AdamStep(benchmark::State& state) {
  ParamNet net = make_net({88, 32, 32, 32, 32, 32, 4}, 4);
  VecD params = net.flatten_params();
  VecD grads(params.size(), 1e-3);
  AdamState adam = AdamState::create(params.size(), 1e-4);
  for (auto _ : state) {
    adam_step(params, grads, adam);
    benchmark::DoNotOptimize(params.data());
  }
}
BENCHMARK(BM_AdamStep);

void BM_ReplaySample(benchmark::State& state) {
  ReplayBuffer buffer(100'000, 0.7, 1e-3);
  Rng rng(5);
  for (int i = 0; i < 100'000; ++i) {
    buffer.push(Experience{{rng.uniform()}, 0, rng.uniform(), {rng.uniform()}, false});
  }
  for (auto _ : state) benchmark::DoNotOptimize(buffer.sample(32, rng));
}
BENCHMARK(BM_ReplaySample);

void BM_FisheriesStep(benchmark::State& state) {
  FisheriesEnv env{FisheriesParams{}};
  Rng rng(6);
  env.reset(rng);
  long step = 0;
  for (auto _ : state) {
    StepResult sr = env.step(0, rng);
    benchmark::DoNotOptimize(sr.reward);
    if (sr.terminal || ++step % 90 == 0) env.reset(rng);
  }
}
BENCHMARK(BM_FisheriesStep);

void BM_CrosswalkStepEval(benchmark::State& state) {
  CrosswalkEnv env{CrosswalkParams{}, CrosswalkMode::Evaluation};
  Rng rng(7);
  env.reset(rng);
  for (auto _ : state) {
    StepResult sr = env.step(2, rng);
    benchmark::DoNotOptimize(sr.reward);
    if (sr.terminal) env.reset(rng);
  }
}
BENCHMARK(BM_CrosswalkStepEval);

void BM_FusedEvaluate(benchmark::State& state) {
  CrosswalkParams params;
  auto net = std::make_shared<ParamNet>(make_net({16, 32, 32, 32, 32, 32, 4}, 8));
  FusedQ fused;
  fused.rule = FusionRule::MaxMin;
  for (const StateSlicer& s : crosswalk_entity_slicers(params)) {
    fused.entities.push_back(FusedQ::Entity{s, net});
  }
  VecD statev(88, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fused.fuse(statev));
}
BENCHMARK(BM_FusedEvaluate);

}  // namespace

BENCHMARK_MAIN();
