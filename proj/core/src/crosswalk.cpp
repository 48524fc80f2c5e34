#include "qcor/crosswalk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcor {

namespace {

void validate_params(const CrosswalkParams& p) {
  if (p.actions.empty()) throw std::invalid_argument("crosswalk: empty action set");
  if (p.n_pedestrians < 1) throw std::invalid_argument("crosswalk: need at least one slot");
  if (p.history_length < 1) throw std::invalid_argument("crosswalk: history_length must be >= 1");
  if (p.position_noise_sigma < 0 || p.velocity_noise_sigma < 0) {
    throw std::invalid_argument("crosswalk: noise sigmas must be >= 0");
  }
  for (double step : {p.sim_step_train, p.sim_step_eval}) {
    if (step <= 0) throw std::invalid_argument("crosswalk: sim step must be positive");
    const double ratio = p.decision_period / step;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9) {
      throw std::invalid_argument("crosswalk: sim step must divide the decision period");
    }
  }
  if (p.discount <= 0.0 || p.discount > 1.0) {
    throw std::invalid_argument("crosswalk: discount must be in (0, 1]");
  }
}

}  // namespace

bool segment_intersects_rect(double x0, double y0, double x1, double y1, double rx_min,
                             double ry_min, double rx_max, double ry_max) {
  // slab clipping of the parametric segment against the closed rectangle
  double tmin = 0.0, tmax = 1.0;
  const double d[2] = {x1 - x0, y1 - y0};
  const double p[2] = {x0, y0};
  const double lo[2] = {rx_min, ry_min};
  const double hi[2] = {rx_max, ry_max};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (p[axis] < lo[axis] || p[axis] > hi[axis]) return false;
      continue;
    }
    double t1 = (lo[axis] - p[axis]) / d[axis];
    double t2 = (hi[axis] - p[axis]) / d[axis];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  return true;
}

bool pedestrian_visible(double ego_x, double ped_y, const CrosswalkParams& params) {
  return !segment_intersects_rect(ego_x, 0.0, params.crosswalk_x, ped_y,
                                  params.obstacle_x_min, params.obstacle_y_min,
                                  params.obstacle_x_max, params.obstacle_y_max);
}

VecD observe(const CrosswalkState& state, const CrosswalkParams& params, Rng& rng) {
  VecD obs(2 + 2 * params.n_pedestrians, params.s_absent);
  obs[0] = rng.normal(state.ego_x, params.position_noise_sigma);
  obs[1] = rng.normal(state.ego_v, params.velocity_noise_sigma);
  for (int i = 0; i < params.n_pedestrians; ++i) {
    const PedestrianState& ped = state.peds[i];
    if (!ped.present || !pedestrian_visible(state.ego_x, ped.y, params)) continue;
    obs[2 + 2 * i] = rng.normal(ped.y, params.position_noise_sigma);
    obs[3 + 2 * i] = rng.normal(ped.speed, params.velocity_noise_sigma);
  }
  return obs;
}

VecD stack_observations(std::span<const VecD> history) {
  if (history.empty()) throw std::invalid_argument("stack_observations: empty history");
  VecD out;
  out.reserve(history.size() * history.front().size());
  for (const VecD& frame : history) {
    if (frame.size() != history.front().size()) {
      throw std::invalid_argument("stack_observations: frame sizes disagree");
    }
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

CrosswalkEnv::CrosswalkEnv(CrosswalkParams params, CrosswalkMode mode)
    : params_(std::move(params)), mode_(mode) {
  validate_params(params_);
}

int CrosswalkEnv::observation_dim() const {
  return params_.history_length * frame_dim();
}

double CrosswalkEnv::sim_step() const {
  return mode_ == CrosswalkMode::Training ? params_.sim_step_train : params_.sim_step_eval;
}

double CrosswalkEnv::draw_ped_speed(Rng& rng) const {
  const bool training = mode_ == CrosswalkMode::Training;
  const double mag = training ? params_.ped_noise_train : params_.ped_noise_eval;
  const PedNoiseKind kind =
      training ? params_.ped_noise_kind_train : params_.ped_noise_kind_eval;
  if (kind == PedNoiseKind::DiscreteSet) {
    return params_.ped_desired_speed + mag * (rng.uniform_int(3) - 1);
  }
  return params_.ped_desired_speed + rng.uniform(-mag, mag);
}

VecD CrosswalkEnv::stacked() const { return stack_observations(history_); }

VecD CrosswalkEnv::reset(Rng& rng) {
  state_.ego_x = params_.ego_start_x;
  state_.ego_v = rng.uniform(params_.ego_v_min, params_.ego_v_max);
  state_.time = 0.0;
  state_.peds.assign(params_.n_pedestrians, PedestrianState{});
  for (auto& ped : state_.peds) {
    ped.present = rng.uniform() < params_.initial_present_probability;
    if (ped.present) {
      ped.y = rng.uniform(params_.ped_y_min, params_.ped_y_max);
      ped.speed = draw_ped_speed(rng);
    }
  }
  const VecD frame = observe(state_, params_, rng);
  history_.assign(params_.history_length, frame);  // replicate at episode start
  return stacked();
}

StepResult CrosswalkEnv::step(int action, Rng& rng) {
  if (action < 0 || action >= action_count()) {
    throw std::invalid_argument("CrosswalkEnv::step: action out of range");
  }
  if (state_.peds.empty()) throw std::logic_error("CrosswalkEnv::step: reset() not called");

  const double accel = params_.actions[action];
  const double dt = sim_step();
  const int n_sub = static_cast<int>(std::round(params_.decision_period / dt));

  std::vector<char> was_present(state_.peds.size());
  for (std::size_t i = 0; i < state_.peds.size(); ++i) was_present[i] = state_.peds[i].present;

  StepResult out;
  for (int sub = 0; sub < n_sub && !out.terminal; ++sub) {
    // ego point mass; braking saturates at standstill
    if (accel < 0.0 && state_.ego_v + accel * dt < 0.0) {
      const double t_stop = -state_.ego_v / accel;
      state_.ego_x += state_.ego_v * t_stop + 0.5 * accel * t_stop * t_stop;
      state_.ego_v = 0.0;
    } else {
      state_.ego_x += state_.ego_v * dt + 0.5 * accel * dt * dt;
      state_.ego_v += accel * dt;
    }
    for (auto& ped : state_.peds) {
      if (ped.present) ped.y += ped.speed * dt;
    }
    state_.time += dt;

    for (const auto& ped : state_.peds) {
      if (ped.present && std::fabs(params_.crosswalk_x - state_.ego_x) <= params_.collision_dx &&
          std::fabs(ped.y) <= params_.collision_dy) {
        out.terminal = true;
        out.reward = -1.0;
        out.outcome = kCrosswalkCollision;
        break;
      }
    }
    if (!out.terminal && state_.ego_x >= params_.goal_x) {
      out.terminal = true;
      out.reward = 1.0;
      out.outcome = kCrosswalkSuccess;
    }
  }

  if (!out.terminal) {
    for (std::size_t i = 0; i < state_.peds.size(); ++i) {
      auto& ped = state_.peds[i];
      if (ped.present && ped.y > params_.ped_y_max) ped.present = false;
      if (was_present[i] && ped.present) ped.speed = draw_ped_speed(rng);
    }
    for (std::size_t i = 0; i < state_.peds.size(); ++i) {
      auto& ped = state_.peds[i];
      if (!was_present[i] && rng.uniform() < params_.appear_probability) {
        ped.present = true;
        ped.y = params_.ped_y_min;
        ped.speed = draw_ped_speed(rng);
      }
    }
    if (state_.time >= params_.timeout - 1e-9) {
      out.terminal = true;
      out.reward = 0.0;
      out.outcome = kCrosswalkTimeout;
    }
  }

  const VecD frame = observe(state_, params_, rng);
  history_.erase(history_.begin());
  history_.push_back(frame);
  out.next_state = stacked();
  return out;
}

std::unique_ptr<EnvModel> CrosswalkEnv::clone() const {
  return std::make_unique<CrosswalkEnv>(*this);
}

std::string CrosswalkEnv::outcome_name(int outcome) const {
  switch (outcome) {
    case kCrosswalkSuccess: return "success";
    case kCrosswalkCollision: return "collision";
    case kCrosswalkTimeout: return "timeout";
    default: return EnvModel::outcome_name(outcome);
  }
}

CrosswalkParams single_pedestrian_params(const CrosswalkParams& params) {
  CrosswalkParams local = params;
  local.n_pedestrians = 1;
  return local;
}

CrosswalkEnv single_pedestrian_env(const CrosswalkParams& params, CrosswalkMode mode) {
  return CrosswalkEnv(single_pedestrian_params(params), mode);
}

}  // namespace qcor
