#include "qcor/dqn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qcor/fusion.hpp"
#include "qcor/util.hpp"

namespace qcor {

namespace {

void add_into(VecD& acc, const VecD& inc) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += inc[i];
}

void validate_config(const DqnConfig& cfg) {
  if (cfg.total_train_steps < 0) throw std::invalid_argument("total_train_steps must be >= 0");
  if (cfg.batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (cfg.target_update_frequency <= 0) {
    throw std::invalid_argument("target_update_frequency must be positive");
  }
  if (cfg.discount <= 0.0 || cfg.discount > 1.0) {
    throw std::invalid_argument("discount must be in (0, 1]");
  }
  if (cfg.exploration_fraction < 0.0 || cfg.exploration_fraction > 1.0 ||
      cfg.final_epsilon < 0.0 || cfg.final_epsilon > 1.0) {
    throw std::invalid_argument("exploration schedule values must be in [0, 1]");
  }
}

std::vector<int> net_sizes(const DqnConfig& cfg, int input_dim, int output_dim) {
  std::vector<int> sizes;
  sizes.push_back(input_dim);
  for (int h : cfg.hidden_layers) sizes.push_back(h);
  sizes.push_back(output_dim);
  return sizes;
}

}  // namespace

double td_target(const Experience& exp, const ParamNet& online, const ParamNet& target,
                 double discount, const QFunction& q_lo) {
  if (exp.terminal) return exp.reward;
  VecD q_online = online.forward(exp.next_state);
  VecD q_target = target.forward(exp.next_state);
  if (q_lo) {
    const VecD lo = q_lo(exp.next_state);
    add_into(q_online, lo);
    add_into(q_target, lo);
  }
  const int best = argmax_lowest(q_online);
  return exp.reward + discount * q_target[best];
}

DqnTrainer::DqnTrainer(EnvModel& env, const DqnConfig& cfg, QFunction q_lo,
                       std::optional<ParamNet> initial_net)
    : env_(env),
      cfg_(cfg),
      q_lo_(std::move(q_lo)),
      net_(initial_net ? std::move(*initial_net) : ParamNet{}),
      target_(),
      adam_(),
      buffer_(cfg.buffer_capacity, cfg.replay_alpha, cfg.replay_beta),
      env_rng_(cfg.seed, 0),
      action_rng_(cfg.seed, 1),
      replay_rng_(cfg.seed, 2) {
  validate_config(cfg_);
  if (!initial_net) {
    Rng init_rng(cfg_.seed, 3);
    net_ = ParamNet::create(net_sizes(cfg_, env.observation_dim(), env.action_count()),
                            cfg_.dueling, init_rng);
  }
  if (net_.input_dim() != env.observation_dim() || net_.output_dim() != env.action_count()) {
    throw std::invalid_argument("DqnTrainer: network dims do not match environment");
  }
  target_ = net_;
  adam_ = AdamState::create(net_.param_count(), cfg_.learning_rate);
  qlo_cache_valid_.assign(q_lo_ ? cfg_.buffer_capacity : 0, 0);
  qlo_cache_.resize(q_lo_ ? cfg_.buffer_capacity : 0);
}

VecD DqnTrainer::q_lo_at(const VecD& state) const { return q_lo_(state); }

VecD DqnTrainer::corrected_values(const VecD& state) const {
  VecD q = net_.forward(state);
  if (q_lo_) add_into(q, q_lo_(state));
  return q;
}

Policy DqnTrainer::greedy_policy() const {
  ParamNet frozen = net_;
  QFunction lo = q_lo_;
  return [frozen = std::move(frozen), lo = std::move(lo)](const VecD& s) {
    VecD q = frozen.forward(s);
    if (lo) {
      const VecD l = lo(s);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += l[i];
    }
    return argmax_lowest(q);
  };
}

void DqnTrainer::set_eval_hook(long eval_every, EvalHook hook) {
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  eval_every_ = eval_every;
  eval_hook_ = std::move(hook);
}

void DqnTrainer::note_eval_index(int index) {
  if (!log_.empty()) log_.back().eval_index = index;
}

TrainRecord DqnTrainer::train_step() {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    throw std::logic_error("train_step: buffer holds less than one batch");
  }
  const ReplayBuffer::Batch batch = buffer_.sample(cfg_.batch_size, replay_rng_);
  const int n = cfg_.batch_size;

  VecD grad_acc(net_.param_count(), 0.0);
  VecD td_errors(n, 0.0);
  VecD cot(net_.output_dim(), 0.0);
  double loss = 0.0;
  for (int k = 0; k < n; ++k) {
    const std::size_t index = batch.indices[k];
    const Experience& exp = buffer_.at(index);
    double lo_s_a = 0.0;
    double target_value;
    if (q_lo_) {
      if (!qlo_cache_valid_[index]) {
        qlo_cache_[index] = {q_lo_at(exp.state), exp.terminal ? VecD{} : q_lo_at(exp.next_state)};
        qlo_cache_valid_[index] = 1;
      }
      const auto& [lo_s, lo_s2] = qlo_cache_[index];
      lo_s_a = lo_s[exp.action];
      if (exp.terminal) {
        target_value = exp.reward;
      } else {
        VecD q_online = net_.forward(exp.next_state);
        VecD q_target = target_.forward(exp.next_state);
        add_into(q_online, lo_s2);
        add_into(q_target, lo_s2);
        const int best = argmax_lowest(q_online);
        target_value = exp.reward + cfg_.discount * q_target[best];
      }
    } else {
      target_value = td_target(exp, net_, target_, cfg_.discount);
    }
    const VecD q_s = net_.forward(exp.state);
    const double td = target_value - (q_s[exp.action] + lo_s_a);
    td_errors[k] = td;
    const double w = batch.weights[k];
    loss += w * td * td;
    // d/dQ(s,a) of (1/n) sum w * td^2
    cot.assign(net_.output_dim(), 0.0);
    cot[exp.action] = -2.0 * w * td / n;
    add_into(grad_acc, net_.grad(exp.state, cot));
  }
  loss /= n;
  if (!std::isfinite(loss)) {
    throw numeric_error("training aborted: non-finite loss at step " +
                        std::to_string(env_step_));
  }

  VecD params = net_.flatten_params();
  adam_step(params, grad_acc, adam_);
  net_.unflatten_params(params);

  VecD abs_td(td_errors);
  for (double& t : abs_td) t = std::fabs(t);
  buffer_.update_priorities(batch.indices, abs_td);

  ++update_count_;
  if (update_count_ % cfg_.target_update_frequency == 0) target_ = net_;

  TrainRecord rec;
  rec.step = env_step_;
  rec.loss = loss;
  rec.epsilon = epsilon_schedule(env_step_, cfg_.total_train_steps,
                                 cfg_.exploration_fraction, cfg_.final_epsilon);
  return rec;
}

void DqnTrainer::maybe_train() {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
  TrainRecord rec = train_step();
  if (cfg_.log_every > 0 && (update_count_ - 1) % cfg_.log_every == 0) {
    log_.push_back(rec);
  }
}

void DqnTrainer::run() {
  while (env_step_ < cfg_.total_train_steps) {
    if (!episode_open_) {
      state_ = env_.reset(env_rng_);
      episode_open_ = true;
      episode_steps_ = 0;
    }
    const double eps = epsilon_schedule(env_step_, cfg_.total_train_steps,
                                        cfg_.exploration_fraction, cfg_.final_epsilon);
    int action;
    if (action_rng_.uniform() < eps) {
      action = action_rng_.uniform_int(env_.action_count());
    } else {
      action = argmax_lowest(corrected_values(state_));
    }
    StepResult sr = env_.step(action, env_rng_);
    const std::size_t slot = buffer_.push(Experience{
        state_, action, sr.reward, sr.next_state, sr.terminal && !sr.truncated});
    if (q_lo_ && slot < qlo_cache_valid_.size()) qlo_cache_valid_[slot] = 0;
    state_ = std::move(sr.next_state);
    ++episode_steps_;
    ++env_step_;
    if (sr.terminal ||
        (cfg_.max_episode_steps > 0 && episode_steps_ >= cfg_.max_episode_steps)) {
      episode_open_ = false;
    }
    maybe_train();
    if (eval_hook_ && env_step_ % eval_every_ == 0) eval_hook_(env_step_, greedy_policy());
  }
  if (eval_hook_) eval_hook_(env_step_, greedy_policy());
}

TrainResult train_dqn(EnvModel& env, const DqnConfig& cfg, QFunction q_lo) {
  DqnTrainer trainer(env, cfg, std::move(q_lo));
  trainer.run();
  return TrainResult{trainer.net(), trainer.log()};
}

DecomposedTrainer::DecomposedTrainer(EnvModel& env, const DqnConfig& cfg, int n_agents,
                                     int local_actions, std::vector<QFunction> q_lo)
    : env_(env),
      cfg_(cfg),
      n_agents_(n_agents),
      local_actions_(local_actions),
      q_lo_(std::move(q_lo)),
      buffer_(cfg.buffer_capacity, cfg.replay_alpha, cfg.replay_beta),
      env_rng_(cfg.seed, 0),
      action_rng_(cfg.seed, 1),
      replay_rng_(cfg.seed, 2) {
  validate_config(cfg_);
  if (n_agents_ <= 0) throw std::invalid_argument("DecomposedTrainer: need agents");
  if (!q_lo_.empty() && static_cast<int>(q_lo_.size()) != n_agents_) {
    throw std::invalid_argument("DecomposedTrainer: one q_lo per agent required");
  }
  long joint = 1;
  for (int i = 0; i < n_agents_; ++i) joint *= local_actions_;
  if (joint != env.action_count()) {
    throw std::invalid_argument("DecomposedTrainer: environment action space is not the joint encoding");
  }
  nets_.reserve(n_agents_);
  for (int i = 0; i < n_agents_; ++i) {
    Rng init_rng(cfg_.seed, 3 + static_cast<uint64_t>(i));
    nets_.push_back(ParamNet::create(net_sizes(cfg_, env.observation_dim(), local_actions_),
                                     cfg_.dueling, init_rng));
  }
  targets_ = nets_;
  adams_.reserve(n_agents_);
  for (int i = 0; i < n_agents_; ++i) {
    adams_.push_back(AdamState::create(nets_[i].param_count(), cfg_.learning_rate));
  }
}

std::vector<VecD> DecomposedTrainer::corrected_values(const VecD& state) const {
  std::vector<VecD> values(n_agents_);
  for (int i = 0; i < n_agents_; ++i) {
    values[i] = nets_[i].forward(state);
    if (!q_lo_.empty()) add_into(values[i], q_lo_[i](state));
  }
  return values;
}

Policy DecomposedTrainer::greedy_policy() const {
  std::vector<ParamNet> frozen = nets_;
  std::vector<QFunction> lo = q_lo_;
  const int local = local_actions_;
  return [frozen = std::move(frozen), lo = std::move(lo), local](const VecD& s) -> int {
    std::vector<VecD> values(frozen.size());
    for (std::size_t i = 0; i < frozen.size(); ++i) {
      values[i] = frozen[i].forward(s);
      if (!lo.empty()) {
        const VecD l = lo[i](s);
        for (std::size_t a = 0; a < values[i].size(); ++a) values[i][a] += l[a];
      }
    }
    const std::vector<int> joint = joint_argmax_sum(values);
    return static_cast<int>(encode_joint_action(joint, local));
  };
}

void DecomposedTrainer::set_eval_hook(long eval_every, EvalHook hook) {
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  eval_every_ = eval_every;
  eval_hook_ = std::move(hook);
}

TrainRecord DecomposedTrainer::train_step() {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    throw std::logic_error("train_step: buffer holds less than one batch");
  }
  const ReplayBuffer::Batch batch = buffer_.sample(cfg_.batch_size, replay_rng_);
  const int n = cfg_.batch_size;

  VecD mean_abs_td(n, 0.0);
  double loss = 0.0;
  VecD cot(local_actions_, 0.0);
  for (int i = 0; i < n_agents_; ++i) {
    ParamNet& net = nets_[i];
    ParamNet& target = targets_[i];
    VecD grad_acc(net.param_count(), 0.0);
    for (int k = 0; k < n; ++k) {
      const Experience& exp = buffer_.at(batch.indices[k]);
      const int a_i = decode_joint_action(exp.action, local_actions_, n_agents_)[i];
      double lo_s_a = 0.0;
      double target_value;
      if (exp.terminal) {
        target_value = exp.reward;
      } else {
        VecD q_online = net.forward(exp.next_state);
        VecD q_target = target.forward(exp.next_state);
        if (!q_lo_.empty()) {
          const VecD lo2 = q_lo_[i](exp.next_state);
          add_into(q_online, lo2);
          add_into(q_target, lo2);
        }
        const int best = argmax_lowest(q_online);
        target_value = exp.reward + cfg_.discount * q_target[best];
      }
      if (!q_lo_.empty()) lo_s_a = q_lo_[i](exp.state)[a_i];
      const VecD q_s = net.forward(exp.state);
      const double td = target_value - (q_s[a_i] + lo_s_a);
      mean_abs_td[k] += std::fabs(td) / n_agents_;
      const double w = batch.weights[k];
      loss += w * td * td;
      cot.assign(local_actions_, 0.0);
      cot[a_i] = -2.0 * w * td / n;
      add_into(grad_acc, net.grad(exp.state, cot));
    }
    VecD params = net.flatten_params();
    adam_step(params, grad_acc, adams_[i]);
    net.unflatten_params(params);
  }
  loss /= n * n_agents_;
  if (!std::isfinite(loss)) {
    throw numeric_error("training aborted: non-finite loss at step " +
                        std::to_string(env_step_));
  }
  buffer_.update_priorities(batch.indices, mean_abs_td);

  ++update_count_;
  if (update_count_ % cfg_.target_update_frequency == 0) targets_ = nets_;

  TrainRecord rec;
  rec.step = env_step_;
  rec.loss = loss;
  rec.epsilon = epsilon_schedule(env_step_, cfg_.total_train_steps,
                                 cfg_.exploration_fraction, cfg_.final_epsilon);
  return rec;
}

void DecomposedTrainer::maybe_train() {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return;
  TrainRecord rec = train_step();
  if (cfg_.log_every > 0 && (update_count_ - 1) % cfg_.log_every == 0) {
    log_.push_back(rec);
  }
}

void DecomposedTrainer::run() {
  while (env_step_ < cfg_.total_train_steps) {
    if (!episode_open_) {
      state_ = env_.reset(env_rng_);
      episode_open_ = true;
      episode_steps_ = 0;
    }
    const double eps = epsilon_schedule(env_step_, cfg_.total_train_steps,
                                        cfg_.exploration_fraction, cfg_.final_epsilon);
    int action;
    if (action_rng_.uniform() < eps) {
      action = action_rng_.uniform_int(env_.action_count());
    } else {
      const std::vector<int> joint = joint_argmax_sum(corrected_values(state_));
      action = static_cast<int>(encode_joint_action(joint, local_actions_));
    }
    StepResult sr = env_.step(action, env_rng_);
    buffer_.push(Experience{state_, action, sr.reward, sr.next_state,
                            sr.terminal && !sr.truncated});
    state_ = std::move(sr.next_state);
    ++episode_steps_;
    ++env_step_;
    if (sr.terminal ||
        (cfg_.max_episode_steps > 0 && episode_steps_ >= cfg_.max_episode_steps)) {
      episode_open_ = false;
    }
    maybe_train();
    if (eval_hook_ && env_step_ % eval_every_ == 0) eval_hook_(env_step_, greedy_policy());
  }
  if (eval_hook_) eval_hook_(env_step_, greedy_policy());
}

}  // namespace qcor
