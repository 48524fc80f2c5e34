#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qcor/env.hpp"
#include "qcor/net.hpp"
#include "qcor/replay.hpp"

namespace qcor {

struct DqnConfig {
  long total_train_steps = 0;        ///< budget in environment steps (= experience samples)
  std::size_t buffer_capacity = 500'000;
  long target_update_frequency = 2000;  ///< gradient-update steps between syncs
  double discount = 0.99;
  double learning_rate = 1e-4;
  int batch_size = 32;
  double exploration_fraction = 0.2;
  double final_epsilon = 0.05;
  double replay_alpha = 0.7;
  double replay_beta = 1e-3;
  std::vector<int> hidden_layers = {16};
  bool dueling = true;
  long max_episode_steps = 0;  ///< 0: rely on environment terminals only
  uint64_t seed = 0;
  long log_every = 1;
};

struct TrainRecord {
  long step = 0;  ///< environment-step index
  double loss = 0.0;
  double epsilon = 0.0;
  int eval_index = -1;  ///< row in the convergence series, -1 if none
};

/// Double-Q temporal-difference target: terminal experiences back up the bare
/// reward; otherwise the next action is selected with the online parameters
/// and valued with the target parameters. An optional frozen q_lo is added to
/// both, in which case only the correction networks are the learned part.
double td_target(const Experience& exp, const ParamNet& online, const ParamNet& target,
                 double discount, const QFunction& q_lo = {});

/// One trainer owns its networks, replay buffer, and random streams; all
/// methods are single-threaded. Stream layout per seed: 0 environment,
/// 1 action selection, 2 replay sampling, 3+ network initialization.
class DqnTrainer {
 public:
  /// If q_lo is set the trainer learns an additive correction on top of it:
  /// actions maximize q_lo(s) + net(s) and TD errors are computed on the
  /// corrected values, with gradients flowing only through the network.
  /// q_lo is never modified. With q_lo identically zero the trajectory is
  /// bit-identical to plain DQN.
  DqnTrainer(EnvModel& env, const DqnConfig& cfg, QFunction q_lo = {},
             std::optional<ParamNet> initial_net = std::nullopt);

  /// Runs exactly cfg.total_train_steps environment steps, one gradient
  /// update per step once the buffer holds one batch.
  void run();

  /// One gradient update from a sampled batch. Requires size() >= batch_size.
  TrainRecord train_step();

  const ParamNet& net() const { return net_; }
  const ParamNet& target_net() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }
  const std::vector<TrainRecord>& log() const { return log_; }
  long env_steps_taken() const { return env_step_; }
  long updates_taken() const { return update_count_; }

  /// Greedy policy over a frozen copy of the current corrected values.
  Policy greedy_policy() const;
  /// Current corrected action values (live view; cheap to call).
  VecD corrected_values(const VecD& state) const;

  using EvalHook = std::function<void(long step, const Policy& frozen)>;
  /// hook fires at every multiple of eval_every environment steps and once
  /// more when the budget is exhausted.
  void set_eval_hook(long eval_every, EvalHook hook);
  void note_eval_index(int index);  ///< tag the latest log record

 private:
  void maybe_train();
  VecD q_lo_at(const VecD& state) const;

  EnvModel& env_;
  DqnConfig cfg_;
  QFunction q_lo_;
  ParamNet net_;
  ParamNet target_;
  AdamState adam_;
  ReplayBuffer buffer_;
  Rng env_rng_, action_rng_, replay_rng_;
  VecD state_;
  bool episode_open_ = false;
  long episode_steps_ = 0;
  long env_step_ = 0;
  long update_count_ = 0;
  std::vector<TrainRecord> log_;
  long eval_every_ = 0;
  EvalHook eval_hook_;
  // frozen q_lo values per buffer slot (state, next_state), filled lazily
  mutable std::vector<char> qlo_cache_valid_;
  mutable std::vector<std::pair<VecD, VecD>> qlo_cache_;
};

struct TrainResult {
  ParamNet net;
  std::vector<TrainRecord> log;
};

/// Convenience wrapper: construct a trainer, run the full budget, return the
/// final network and training log. Fully reproducible under cfg.seed.
TrainResult train_dqn(EnvModel& env, const DqnConfig& cfg, QFunction q_lo = {});

/// Multi-agent trainer: n networks over the global state, each predicting
/// values for the local action set; the joint action maximizes the sum of the
/// per-agent (optionally corrected) values. One parameter update per network
/// per environment step. The environment's flat action space must be the
/// base-|A_local| joint encoding.
class DecomposedTrainer {
 public:
  DecomposedTrainer(EnvModel& env, const DqnConfig& cfg, int n_agents, int local_actions,
                    std::vector<QFunction> q_lo = {});

  void run();
  TrainRecord train_step();

  const std::vector<ParamNet>& nets() const { return nets_; }
  const std::vector<TrainRecord>& log() const { return log_; }
  long env_steps_taken() const { return env_step_; }

  Policy greedy_policy() const;
  /// Per-agent corrected action values at a state.
  std::vector<VecD> corrected_values(const VecD& state) const;

  using EvalHook = std::function<void(long step, const Policy& frozen)>;
  void set_eval_hook(long eval_every, EvalHook hook);

 private:
  void maybe_train();

  EnvModel& env_;
  DqnConfig cfg_;
  int n_agents_;
  int local_actions_;
  std::vector<QFunction> q_lo_;
  std::vector<ParamNet> nets_;
  std::vector<ParamNet> targets_;
  std::vector<AdamState> adams_;
  ReplayBuffer buffer_;
  Rng env_rng_, action_rng_, replay_rng_;
  VecD state_;
  bool episode_open_ = false;
  long episode_steps_ = 0;
  long env_step_ = 0;
  long update_count_ = 0;
  std::vector<TrainRecord> log_;
  long eval_every_ = 0;
  EvalHook eval_hook_;
};

}  // namespace qcor
