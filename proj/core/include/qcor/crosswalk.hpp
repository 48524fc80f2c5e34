#pragma once

#include <span>
#include <vector>

#include "qcor/env.hpp"

namespace qcor {

/// Pedestrian speed perturbation style. Training uses a discrete set
/// {-mag, 0, +mag} around the desired speed; evaluation resamples uniformly
/// in [-mag, +mag].
enum class PedNoiseKind { DiscreteSet, UniformInterval };

enum class CrosswalkMode { Training, Evaluation };

/// Occluded-crosswalk scenario. The ego car drives along x on the lane
/// centerline y = 0; the crosswalk crosses the lane at x = crosswalk_x and
/// pedestrians walk along it from y_min toward +y at about the desired speed.
/// A rectangular obstacle south of the lane occludes the pedestrian approach
/// until the ego is close. The ego picks one of four accelerations every
/// decision period; kinematics and collision checks run at the mode's finer
/// simulation step.
struct CrosswalkParams {
  std::vector<double> actions = {-4.0, -2.0, 0.0, 2.0};  ///< m/s^2
  double decision_period = 0.5;                          ///< s
  double sim_step_train = 0.5;                           ///< s
  double sim_step_eval = 0.1;                            ///< s
  double position_noise_sigma = 0.5;                     ///< m
  double velocity_noise_sigma = 0.5;                     ///< m/s
  double ped_desired_speed = 1.0;                        ///< m/s
  double ped_noise_train = 1.0;                          ///< m/s
  double ped_noise_eval = 0.5;                           ///< m/s
  PedNoiseKind ped_noise_kind_train = PedNoiseKind::DiscreteSet;
  PedNoiseKind ped_noise_kind_eval = PedNoiseKind::UniformInterval;
  double appear_probability = 0.3;  ///< per decision step per absent pedestrian
  int n_pedestrians = 10;
  double timeout = 20.0;  ///< s
  double discount = 0.99;
  int history_length = 4;  ///< k-Markov observation stacking

  // geometry (m)
  double crosswalk_x = 25.0;
  double ped_y_min = -5.0;  ///< crosswalk start, where pedestrians appear
  double ped_y_max = 5.0;   ///< beyond this a pedestrian has left the scene
  double ego_start_x = 5.0;
  double ego_v_min = 6.0;
  double ego_v_max = 8.0;
  double goal_x = 34.0;
  double obstacle_x_min = 12.0;
  double obstacle_x_max = 22.0;
  double obstacle_y_min = -6.0;
  double obstacle_y_max = -2.0;
  double collision_dx = 2.5;  ///< half length of the ego footprint
  double collision_dy = 1.0;  ///< half width of the collision band
  double s_absent = -10.0;    ///< placeholder for occluded or absent pedestrians
  double initial_present_probability = 0.5;
};

struct PedestrianState {
  double y = 0.0;
  double speed = 0.0;
  bool present = false;
};

struct CrosswalkState {
  double ego_x = 0.0;
  double ego_v = 0.0;
  std::vector<PedestrianState> peds;
  double time = 0.0;  ///< s elapsed in the episode
};

enum CrosswalkOutcome : int {
  kCrosswalkSuccess = 1,
  kCrosswalkCollision = 2,
  kCrosswalkTimeout = 3,
};

/// True when the straight segment from the ego sensor at (ego_x, 0) to the
/// pedestrian at (crosswalk_x, ped_y) misses the obstacle rectangle.
bool pedestrian_visible(double ego_x, double ped_y, const CrosswalkParams& params);

bool segment_intersects_rect(double x0, double y0, double x1, double y1, double rx_min,
                             double ry_min, double rx_max, double ry_max);

/// One observation frame of dimension 2 + 2 * n_pedestrians: noisy ego
/// position and speed, then per slot the noisy pedestrian position and speed,
/// or s_absent in both slots when the pedestrian is absent or occluded.
VecD observe(const CrosswalkState& state, const CrosswalkParams& params, Rng& rng);

/// Concatenation, oldest frame first.
VecD stack_observations(std::span<const VecD> history);

class CrosswalkEnv : public EnvModel {
 public:
  CrosswalkEnv(CrosswalkParams params, CrosswalkMode mode);

  int action_count() const override { return static_cast<int>(params_.actions.size()); }
  int observation_dim() const override;
  double discount() const override { return params_.discount; }
  VecD reset(Rng& rng) override;
  StepResult step(int action, Rng& rng) override;
  std::unique_ptr<EnvModel> clone() const override;
  std::string outcome_name(int outcome) const override;
  double episode_time() const override { return state_.time; }

  const CrosswalkParams& params() const { return params_; }
  CrosswalkMode mode() const { return mode_; }
  const CrosswalkState& physical_state() const { return state_; }
  int frame_dim() const { return 2 + 2 * params_.n_pedestrians; }
  double sim_step() const;

 private:
  double draw_ped_speed(Rng& rng) const;
  VecD stacked() const;

  CrosswalkParams params_;
  CrosswalkMode mode_;
  CrosswalkState state_;
  std::vector<VecD> history_;
};

/// The single-pedestrian subproblem: identical dynamics and geometry with one
/// pedestrian slot, observation frame [ego x, ego v, ped pos, ped vel].
CrosswalkParams single_pedestrian_params(const CrosswalkParams& params);
CrosswalkEnv single_pedestrian_env(const CrosswalkParams& params, CrosswalkMode mode);

}  // namespace qcor
