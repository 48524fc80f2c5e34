#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcor/fisheries.hpp"
#include "qcor/fusion.hpp"

using namespace qcor;

namespace {

FisheriesState spread_state(double total, int n) {
  return FisheriesState{VecD(n, total / n), 0};
}

int fixed_joint_action(const FisheriesParams& p, double value) {
  int local = -1;
  for (std::size_t i = 0; i < p.local_actions.size(); ++i) {
    if (p.local_actions[i] == value) local = static_cast<int>(i);
  }
  REQUIRE(local >= 0);
  const std::vector<int> joint(p.n_boats, local);
  return static_cast<int>(
      encode_joint_action(joint, static_cast<int>(p.local_actions.size())));
}

}  // namespace

TEST_CASE("growth fixed point at the maximum population") {
  const FisheriesParams p;
  CHECK(grow_population(p.max_population, p) == doctest::Approx(p.max_population));
}

TEST_CASE("growth from the initial population") {
  const FisheriesParams p;
  const double expected = 1.5e5 * std::exp(0.5 * (1.0 - 1.5e5 / 3e5));
  CHECK(grow_population(1.5e5, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(192603.8).epsilon(1e-5));
}

TEST_CASE("extinction is absorbing") {
  const FisheriesParams p;
  CHECK(grow_population(0.0, p) == 0.0);
}

TEST_CASE("actions outside the local set are rejected") {
  const FisheriesParams p;
  Rng rng(1);
  VecD actions(p.n_boats, 0.3);
  actions[4] = 0.0;  // not a member
  CHECK_THROWS_AS(fisheries_step(spread_state(1.5e5, p.n_boats), actions, p, rng),
                  std::invalid_argument);
}

TEST_CASE("per-boat reward for a known catch") {
  // c=100 at a=0.5: (100 - 1e3 * 0.25) / 3e5 = -5.0e-4
  const FisheriesParams p;
  const double reward = (100.0 - p.fishing_cost * 0.25) / p.max_population;
  CHECK(reward == doctest::Approx(-5.0e-4).epsilon(1e-12));
}

TEST_CASE("global reward is exactly the sum of the boat rewards") {
  const FisheriesParams p;
  Rng rng(2);
  FisheriesState state = spread_state(1.5e5, p.n_boats);
  VecD actions(p.n_boats);
  const double values[4] = {1.0, 0.5, 0.3, 0.1};
  for (int i = 0; i < p.n_boats; ++i) actions[i] = values[i % 4];
  const FisheriesStepResult sr = fisheries_step(state, actions, p, rng);
  double total = 0.0;
  for (double r : sr.boat_rewards) total += r;
  CHECK(sr.reward == total);  // bit-exact: computed as the running sum
}

TEST_CASE("catches never drive a region negative") {
  FisheriesParams p;
  Rng rng(3);
  FisheriesState state = spread_state(5000.0, p.n_boats);  // small stock, greedy catch
  VecD actions(p.n_boats, 1.0);
  for (int step = 0; step < 50; ++step) {
    const FisheriesStepResult sr = fisheries_step(state, actions, p, rng);
    for (double f : sr.state.fish) CHECK(f >= 0.0);
    if (sr.terminal) break;
    state = sr.state;
  }
}

TEST_CASE("poisson catch concentrates on the stated mean") {
  // a=0.3, f=1e4, eta=0.98 -> mean 2940
  const FisheriesParams p;
  const double mean = p.boat_efficiency * 0.3 * 1e4;
  CHECK(mean == doctest::Approx(2940.0));
  Rng rng(4);
  const int draws = 10000;
  double total = 0.0;
  for (int i = 0; i < draws; ++i) total += static_cast<double>(rng.poisson(mean));
  const double sigma_mean = std::sqrt(mean / draws);
  CHECK(std::fabs(total / draws - mean) <= 3.0 * sigma_mean);
}

TEST_CASE("single-boat environment structure") {
  const FisheriesParams global;
  FisheriesEnv env = single_boat_env(global);
  CHECK(env.observation_dim() == 1);
  CHECK(env.action_count() == 4);
  CHECK(env.params().max_population == doctest::Approx(3e4));
  CHECK(env.params().initial_population == doctest::Approx(15000.0));
  Rng rng(5);
  const VecD obs = env.reset(rng);
  CHECK(obs[0] == doctest::Approx(0.5));  // 15000 / 3e4
}

TEST_CASE("greedy harvesting collapses the single-boat fishery within a few seasons") {
  FisheriesEnv env = single_boat_env(FisheriesParams{});
  Rng rng(6);
  env.reset(rng);
  int season = 0;
  int outcome = 0;
  for (; season < 100; ++season) {
    const StepResult sr = env.step(0, rng);  // action index 0 is a=1.0
    if (sr.terminal) {
      outcome = sr.outcome;
      break;
    }
  }
  CHECK(outcome == kFisheriesCollapsed);
  CHECK(season < 10);
}

TEST_CASE("conservative harvesting survives the full horizon from 15000 fish") {
  FisheriesEnv env = single_boat_env(FisheriesParams{});
  Rng rng(7);
  env.reset(rng);
  StepResult sr;
  long steps = 0;
  do {
    sr = env.step(3, rng);  // action index 3 is a=0.1
    ++steps;
  } while (!sr.terminal);
  CHECK(sr.outcome == kFisheriesSurvived);
  CHECK(steps == 100);
}

TEST_CASE("joint environment decodes per-boat proportions and spreads equally") {
  const FisheriesParams p;
  FisheriesEnv env{p};
  Rng rng(8);
  const VecD obs = env.reset(rng);
  REQUIRE(obs.size() == 10);
  for (double o : obs) CHECK(o == doctest::Approx(0.5));  // 15000 per region / 3e4

  const StepResult sr = env.step(fixed_joint_action(p, 0.1), rng);
  // equal spreading keeps all regions identical
  for (std::size_t i = 1; i < sr.next_state.size(); ++i) {
    CHECK(sr.next_state[i] == doctest::Approx(sr.next_state[0]));
  }
  CHECK_FALSE(sr.terminal);
}

TEST_CASE("season horizon terminates with the survived outcome") {
  FisheriesParams p;
  p.horizon = 3;
  FisheriesEnv env{p};
  Rng rng(9);
  env.reset(rng);
  const int action = fixed_joint_action(p, 0.1);
  StepResult sr;
  for (int i = 0; i < 3; ++i) sr = env.step(action, rng);
  CHECK(sr.terminal);
  CHECK(sr.outcome == kFisheriesSurvived);
  CHECK(env.episode_time() == doctest::Approx(3.0));
}

TEST_CASE("identical seeds reproduce identical episodes") {
  const FisheriesParams p;
  FisheriesEnv env_a{p};
  FisheriesEnv env_b{p};
  Rng rng_a(10);
  Rng rng_b(10);
  env_a.reset(rng_a);
  env_b.reset(rng_b);
  const int action = fixed_joint_action(p, 0.3);
  for (int i = 0; i < 25; ++i) {
    const StepResult a = env_a.step(action, rng_a);
    const StepResult b = env_b.step(action, rng_b);
    CHECK(a.next_state == b.next_state);
    CHECK(a.reward == b.reward);
    if (a.terminal) break;
  }
}
