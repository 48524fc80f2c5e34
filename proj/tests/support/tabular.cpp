#include "support/tabular.hpp"

#include <stdexcept>

namespace qcor::test {

TabularEnv::TabularEnv(TabularMdp mdp) : mdp_(std::move(mdp)) {}

qcor::VecD TabularEnv::one_hot(int state) const {
  qcor::VecD obs(mdp_.n_states(), 0.0);
  obs[state] = 1.0;
  return obs;
}

qcor::VecD TabularEnv::reset(qcor::Rng& rng) {
  state_ = rng.uniform_int(mdp_.n_states());
  return one_hot(state_);
}

qcor::StepResult TabularEnv::step(int action, qcor::Rng& rng) {
  if (action < 0 || action >= mdp_.n_actions()) {
    throw std::invalid_argument("TabularEnv::step: action out of range");
  }
  qcor::StepResult out;
  out.reward = mdp_.rewards[state_][action];
  const auto& probs = mdp_.transitions[state_][action];
  double u = rng.uniform();
  int next = mdp_.n_states() - 1;
  for (int s2 = 0; s2 < mdp_.n_states(); ++s2) {
    if (u < probs[s2]) {
      next = s2;
      break;
    }
    u -= probs[s2];
  }
  state_ = next;
  out.next_state = one_hot(state_);
  return out;
}

std::unique_ptr<qcor::EnvModel> TabularEnv::clone() const {
  return std::make_unique<TabularEnv>(*this);
}

TabularMdp two_state_chain(double gamma) {
  TabularMdp mdp;
  mdp.gamma = gamma;
  mdp.transitions = {
      {{1.0, 0.0}, {0.0, 1.0}},  // state 0: stay / switch
      {{0.0, 1.0}, {1.0, 0.0}},  // state 1: stay / switch
  };
  mdp.rewards = {
      {0.0, 0.0},  // state 0
      {1.0, 0.0},  // state 1
  };
  return mdp;
}

TabularMdp random_mdp(int n_states, int n_actions, double gamma, uint64_t seed) {
  qcor::Rng rng(seed);
  TabularMdp mdp;
  mdp.gamma = gamma;
  mdp.transitions.assign(n_states, {});
  mdp.rewards.assign(n_states, std::vector<double>(n_actions, 0.0));
  for (int s = 0; s < n_states; ++s) {
    mdp.transitions[s].assign(n_actions, std::vector<double>(n_states, 0.0));
    for (int a = 0; a < n_actions; ++a) {
      double total = 0.0;
      for (int s2 = 0; s2 < n_states; ++s2) {
        mdp.transitions[s][a][s2] = rng.uniform() + 0.05;  // keep the chain irreducible
        total += mdp.transitions[s][a][s2];
      }
      for (int s2 = 0; s2 < n_states; ++s2) mdp.transitions[s][a][s2] /= total;
      mdp.rewards[s][a] = rng.uniform();
    }
  }
  return mdp;
}

uint64_t find_mdp_seed_with_gap(int n_states, int n_actions, double gamma, uint64_t start,
                                double min_gap) {
  for (uint64_t seed = start; seed < start + 1000; ++seed) {
    const TabularMdp mdp = random_mdp(n_states, n_actions, gamma, seed);
    const auto q = value_iteration(mdp);
    if (min_action_gap(q) >= min_gap) return seed;
  }
  throw std::runtime_error("no MDP seed with the requested action gap");
}

}  // namespace qcor::test
