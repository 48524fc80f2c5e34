#pragma once

// Small tabular MDPs wrapped as EnvModel for trainer tests: one-hot state
// observations, no environment terminals (trainers truncate episodes).

#include "qcor/env.hpp"
#include "support/oracles.hpp"

namespace qcor::test {

class TabularEnv : public qcor::EnvModel {
 public:
  explicit TabularEnv(TabularMdp mdp);

  int action_count() const override { return mdp_.n_actions(); }
  int observation_dim() const override { return mdp_.n_states(); }
  double discount() const override { return mdp_.gamma; }
  qcor::VecD reset(qcor::Rng& rng) override;
  qcor::StepResult step(int action, qcor::Rng& rng) override;
  std::unique_ptr<qcor::EnvModel> clone() const override;

  const TabularMdp& mdp() const { return mdp_; }
  qcor::VecD one_hot(int state) const;
  int current_state() const { return state_; }

 private:
  TabularMdp mdp_;
  int state_ = 0;
};

/// Two-state deterministic chain: action 0 stays (reward 0 in state 0,
/// reward 1 in state 1), action 1 switches states (reward 0).
TabularMdp two_state_chain(double gamma = 0.9);

/// Random dense MDP with row-stochastic transitions and rewards in [0, 1].
TabularMdp random_mdp(int n_states, int n_actions, double gamma, uint64_t seed);

/// First seed at or after `start` whose random MDP has a comfortable action
/// gap everywhere (so small estimation errors cannot flip the greedy policy).
uint64_t find_mdp_seed_with_gap(int n_states, int n_actions, double gamma, uint64_t start,
                                double min_gap);

}  // namespace qcor::test
