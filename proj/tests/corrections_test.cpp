#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcor/correction.hpp"
#include "support/tabular.hpp"

using namespace qcor;
using qcor::test::TabularEnv;
using qcor::test::TabularMdp;
using qcor::test::two_state_chain;
using qcor::test::value_iteration;

namespace {

ParamNet zero_net(std::vector<int> sizes) {
  Rng rng(0);
  ParamNet net = ParamNet::create(std::move(sizes), false, rng);
  net.unflatten_params(VecD(net.param_count(), 0.0));
  return net;
}

DqnConfig toy_config(long steps, uint64_t seed) {
  DqnConfig cfg;
  cfg.total_train_steps = steps;
  cfg.buffer_capacity = 10000;
  cfg.target_update_frequency = 250;
  cfg.discount = 0.9;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 32;
  cfg.exploration_fraction = 0.5;
  cfg.final_epsilon = 0.1;
  cfg.hidden_layers = {32};
  cfg.max_episode_steps = 20;
  cfg.seed = seed;
  cfg.log_every = 100;
  return cfg;
}

QFunction table_q(const std::vector<std::vector<double>>& table) {
  return [table](const VecD& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 1.0) return VecD(table[i].begin(), table[i].end());
    }
    return VecD(table.front().size(), 0.0);
  };
}

double mean_abs_delta(const ParamNet& delta, const TabularEnv& env) {
  double total = 0.0;
  int count = 0;
  for (int s = 0; s < env.mdp().n_states(); ++s) {
    const VecD d = delta.forward(env.one_hot(s));
    for (double v : d) {
      total += std::fabs(v);
      ++count;
    }
  }
  return total / count;
}

}  // namespace

TEST_CASE("zero delta parameters reproduce q_lo exactly") {
  CorrectionSpec spec;
  spec.q_lo = [](const VecD&) { return VecD{0.3, -0.7}; };
  spec.delta = zero_net({2, 4, 2});
  const VecD q = corrected_q(spec, VecD{1.0, 0.0});
  CHECK(q == VecD{0.3, -0.7});
}

TEST_CASE("zero q_lo degenerates to the delta network alone") {
  Rng rng(1);
  CorrectionSpec spec;
  spec.q_lo = [](const VecD&) { return VecD{0.0, 0.0}; };
  spec.delta = ParamNet::create({2, 6, 2}, true, rng);
  const VecD s{0.4, -0.2};
  CHECK(corrected_q(spec, s) == spec.delta.forward(s));
}

TEST_CASE("a correction can flip the greedy action") {
  CorrectionSpec spec;
  spec.q_lo = [](const VecD&) { return VecD{1.0, 0.0}; };
  spec.delta = zero_net({1, 2});
  spec.delta.biases.back() = {0.2, 1.5};
  const VecD q = corrected_q(spec, VecD{0.0});
  CHECK(q[0] == doctest::Approx(1.2));
  CHECK(q[1] == doctest::Approx(1.5));
  CHECK(argmax_lowest(q) == 1);
}

TEST_CASE("zero TD error on the whole batch leaves delta unchanged") {
  // q_lo equal to the exact Q* of a zero-reward MDP, zero-initialized delta:
  // every target matches every prediction
  TabularMdp mdp{{{{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}},
                 {{0.0, 0.0}, {0.0, 0.0}},
                 0.9};
  TabularEnv env(mdp);
  CorrectionSpec spec;
  spec.q_lo = [](const VecD&) { return VecD{0.0, 0.0}; };  // the exact Q* here
  spec.delta = zero_net({2, 8, 2});
  spec.cfg = toy_config(100, 2);
  const CorrectionResult result = train_correction(env, spec);
  for (double p : result.spec.delta.flatten_params()) CHECK(p == 0.0);
}

TEST_CASE("frozen q_lo outputs are bit-identical before and after training") {
  const TabularMdp mdp = qcor::test::random_mdp(3, 2, 0.9, 21);
  TabularEnv env(mdp);
  const auto q_star = value_iteration(mdp);
  const QFunction q_lo = table_q(q_star);

  std::vector<VecD> probe;
  std::vector<VecD> before;
  for (int s = 0; s < 3; ++s) {
    probe.push_back(env.one_hot(s));
    before.push_back(q_lo(probe.back()));
  }
  Rng rng(3);
  CorrectionSpec spec;
  spec.q_lo = q_lo;
  spec.delta = ParamNet::create({3, 16, 2}, true, rng);
  spec.cfg = toy_config(2000, 4);
  const CorrectionResult result = train_correction(env, spec);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK(result.spec.q_lo(probe[i]) == before[i]);
    CHECK(q_lo(probe[i]) == before[i]);
  }
}

TEST_CASE("with optimal q_lo the learned correction shrinks toward zero") {
  const TabularMdp mdp = two_state_chain(0.9);
  TabularEnv env(mdp);
  const auto q_star = value_iteration(mdp);
  Rng rng(5);
  CorrectionSpec spec;
  spec.q_lo = table_q(q_star);
  spec.delta = ParamNet::create({2, 16, 2}, true, rng);
  spec.cfg = toy_config(5000, 6);
  spec.cfg.target_update_frequency = 100;  // frequent syncs let the residual decay fully
  const double before = mean_abs_delta(spec.delta, env);
  const CorrectionResult result = train_correction(env, spec);
  const double after = mean_abs_delta(result.spec.delta, env);
  CHECK(after < 0.05);
  CHECK(after < before);
}

TEST_CASE("biased q_lo: the trained corrected policy recovers the optimum") {
  const uint64_t seed = qcor::test::find_mdp_seed_with_gap(5, 2, 0.9, 100, 0.15);
  const TabularMdp mdp = qcor::test::random_mdp(5, 2, 0.9, seed);
  TabularEnv env(mdp);
  const auto q_star = value_iteration(mdp);
  const std::vector<int> optimal = qcor::test::greedy_policy_of(q_star);

  // bias: +1 on action 0 everywhere, enough to flip some greedy choices
  auto biased = q_star;
  for (auto& row : biased) row[0] += 1.0;

  Rng rng(7);
  CorrectionSpec spec;
  spec.q_lo = table_q(biased);
  spec.delta = ParamNet::create({5, 32, 2}, true, rng);
  spec.cfg = toy_config(20000, 8);
  const CorrectionResult result = train_correction(env, spec);
  for (int s = 0; s < 5; ++s) {
    const VecD q = corrected_q(result.spec, env.one_hot(s));
    CHECK(argmax_lowest(q) == optimal[s]);
  }
}

TEST_CASE("with q_lo identically zero the trajectory matches plain DQN bit for bit") {
  const TabularMdp mdp = two_state_chain(0.9);
  TabularEnv env_a(mdp);
  TabularEnv env_b(mdp);
  DqnConfig cfg = toy_config(3000, 9);

  const TrainResult plain = train_dqn(env_a, cfg);

  DqnTrainer correction_trainer(env_b, cfg, [](const VecD&) { return VecD{0.0, 0.0}; });
  correction_trainer.run();

  CHECK(plain.net.flatten_params() == correction_trainer.net().flatten_params());
}

TEST_CASE("zero budget returns delta at initialization") {
  TabularEnv env(two_state_chain(0.9));
  Rng rng(10);
  CorrectionSpec spec;
  spec.q_lo = [](const VecD&) { return VecD{0.0, 0.0}; };
  spec.delta = ParamNet::create({2, 8, 2}, true, rng);
  spec.cfg = toy_config(0, 11);
  const VecD before = spec.delta.flatten_params();
  const CorrectionResult result = train_correction(env, spec);
  CHECK(result.spec.delta.flatten_params() == before);
}

TEST_CASE("same seed gives identical delta trajectories") {
  const TabularMdp mdp = two_state_chain(0.9);
  TabularEnv env_a(mdp);
  TabularEnv env_b(mdp);
  const auto q_star = value_iteration(mdp);
  auto make_spec = [&] {
    Rng rng(12);
    CorrectionSpec spec;
    spec.q_lo = table_q(q_star);
    spec.delta = ParamNet::create({2, 16, 2}, true, rng);
    spec.cfg = toy_config(2500, 13);
    return spec;
  };
  const CorrectionResult a = train_correction(env_a, make_spec());
  const CorrectionResult b = train_correction(env_b, make_spec());
  CHECK(a.spec.delta.flatten_params() == b.spec.delta.flatten_params());
}

TEST_CASE("decomposed correction trains one delta per agent and keeps dims") {
  // two agents on a 4-action joint encoding of a random MDP over 2 local actions
  const TabularMdp base = qcor::test::random_mdp(3, 4, 0.9, 31);
  TabularEnv env(base);
  DecomposedCorrectionSpec spec;
  spec.n_agents = 2;
  spec.local_actions = 2;
  for (int i = 0; i < 2; ++i) {
    spec.q_lo.push_back([](const VecD&) { return VecD{0.1, 0.2}; });
  }
  spec.cfg = toy_config(1500, 14);
  const DecomposedCorrectionResult result = train_decomposed_correction(env, spec);
  REQUIRE(result.deltas.size() == 2);
  for (const ParamNet& net : result.deltas) {
    CHECK(net.input_dim() == 3);
    CHECK(net.output_dim() == 2);
  }
}
