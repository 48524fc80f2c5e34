#include "qcor/fisheries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcor/fusion.hpp"

namespace qcor {

namespace {

void validate_params(const FisheriesParams& p) {
  if (p.n_boats <= 0) throw std::invalid_argument("fisheries: n_boats must be positive");
  if (p.max_population <= 0 || p.initial_population <= 0) {
    throw std::invalid_argument("fisheries: populations must be positive");
  }
  if (p.local_actions.empty()) throw std::invalid_argument("fisheries: empty action set");
  for (double a : p.local_actions) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw std::invalid_argument("fisheries: action values must be in (0, 1]");
    }
  }
  if (p.discount <= 0.0 || p.discount > 1.0) {
    throw std::invalid_argument("fisheries: discount must be in (0, 1]");
  }
  if (p.horizon < 1) throw std::invalid_argument("fisheries: horizon must be >= 1");
}

bool is_local_action(double a, const FisheriesParams& p) {
  return std::find(p.local_actions.begin(), p.local_actions.end(), a) !=
         p.local_actions.end();
}

}  // namespace

double grow_population(double total_fish, const FisheriesParams& params) {
  if (total_fish < 0.0) throw std::invalid_argument("grow_population: negative stock");
  const double grown =
      total_fish * std::exp(params.growth_rate * (1.0 - total_fish / params.max_population));
  return std::min(grown, params.max_population);
}

FisheriesStepResult fisheries_step(const FisheriesState& state,
                                   std::span<const double> actions,
                                   const FisheriesParams& params, Rng& rng) {
  const int n = params.n_boats;
  if (static_cast<int>(state.fish.size()) != n) {
    throw std::invalid_argument("fisheries_step: state size mismatch");
  }
  if (static_cast<int>(actions.size()) != n) {
    throw std::invalid_argument("fisheries_step: one action per boat required");
  }
  for (double a : actions) {
    if (!is_local_action(a, params)) {
      throw std::invalid_argument("fisheries_step: action value not in the local action set");
    }
  }

  FisheriesStepResult result;
  result.boat_rewards.resize(n);
  VecD remaining(n);
  for (int i = 0; i < n; ++i) {
    const double stock = state.fish[i];
    const double mean_catch = params.boat_efficiency * actions[i] * stock;
    double caught = static_cast<double>(rng.poisson(mean_catch));
    caught = std::min(caught, std::floor(stock));  // integer catch, region never negative
    remaining[i] = stock - caught;
    result.boat_rewards[i] =
        (caught - params.fishing_cost * actions[i] * actions[i]) / params.max_population;
    result.reward += result.boat_rewards[i];
  }

  // mating season: reproduce on the surviving total, spread equally
  double total = 0.0;
  for (double f : remaining) total += f;
  const double grown = grow_population(total, params);
  result.state.fish.assign(n, grown / n);
  result.state.season = state.season + 1;

  if (grown < params.min_population) {
    result.terminal = true;
    result.outcome = kFisheriesCollapsed;
  } else if (result.state.season >= params.horizon) {
    result.terminal = true;
    result.outcome = kFisheriesSurvived;
  }
  return result;
}

FisheriesEnv::FisheriesEnv(FisheriesParams params) : params_(std::move(params)) {
  validate_params(params_);
  long joint = 1;
  for (int i = 0; i < params_.n_boats; ++i) {
    joint *= static_cast<long>(params_.local_actions.size());
    if (joint > (1L << 30)) {
      throw std::invalid_argument("FisheriesEnv: joint action space too large to enumerate");
    }
  }
  joint_actions_ = static_cast<int>(joint);
  obs_scale_ = params_.max_population / params_.n_boats;
}

VecD FisheriesEnv::observe() const {
  VecD obs(state_.fish.size());
  for (std::size_t i = 0; i < obs.size(); ++i) obs[i] = state_.fish[i] / obs_scale_;
  return obs;
}

VecD FisheriesEnv::reset(Rng&) {
  state_.fish.assign(params_.n_boats, params_.initial_population / params_.n_boats);
  state_.season = 0;
  return observe();
}

StepResult FisheriesEnv::step(int action, Rng& rng) {
  if (action < 0 || action >= joint_actions_) {
    throw std::invalid_argument("FisheriesEnv::step: action out of range");
  }
  if (state_.fish.empty()) throw std::logic_error("FisheriesEnv::step: reset() not called");
  const std::vector<int> locals = decode_joint_action(
      action, static_cast<int>(params_.local_actions.size()), params_.n_boats);
  VecD proportions(params_.n_boats);
  for (int i = 0; i < params_.n_boats; ++i) {
    proportions[i] = params_.local_actions[locals[i]];
  }
  FisheriesStepResult sr = fisheries_step(state_, proportions, params_, rng);
  state_ = std::move(sr.state);
  StepResult out;
  out.next_state = observe();
  out.reward = sr.reward;
  out.terminal = sr.terminal;
  out.outcome = sr.outcome;
  // the season horizon is a time limit; the season index is not observable,
  // so value targets must bootstrap through it
  out.truncated = sr.terminal && sr.outcome == kFisheriesSurvived;
  return out;
}

std::unique_ptr<EnvModel> FisheriesEnv::clone() const {
  return std::make_unique<FisheriesEnv>(*this);
}

std::string FisheriesEnv::outcome_name(int outcome) const {
  switch (outcome) {
    case kFisheriesSurvived: return "survived";
    case kFisheriesCollapsed: return "collapsed";
    default: return EnvModel::outcome_name(outcome);
  }
}

double FisheriesEnv::episode_time() const { return static_cast<double>(state_.season); }

FisheriesParams single_boat_params(const FisheriesParams& global) {
  FisheriesParams local = global;
  local.n_boats = 1;
  local.max_population = global.max_population / global.n_boats;
  local.initial_population = global.initial_population / global.n_boats;
  return local;
}

FisheriesEnv single_boat_env(const FisheriesParams& global) {
  return FisheriesEnv(single_boat_params(global));
}

}  // namespace qcor
