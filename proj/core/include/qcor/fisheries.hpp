#pragma once

#include <span>
#include <vector>

#include "qcor/env.hpp"

namespace qcor {

/// Multi-agent fisheries management model. A commissioner assigns each boat a
/// proportion of its regional stock to catch every season. The observable
/// state is the stock available for catching in each region; within a step
/// the catches are drawn first, then the surviving population reproduces and
/// is spread equally across the regions to form the next state. Catches are
/// Poisson with mean efficiency * proportion * regional stock, clipped so a
/// region never goes negative.
struct FisheriesParams {
  int n_boats = 10;
  double initial_population = 1.5e5;  ///< total fish at season 0
  double max_population = 3e5;
  double min_population = 200.0;  ///< below this the fishery has collapsed
  double growth_rate = 0.5;
  double fishing_cost = 1e3;     ///< zeta, cost coefficient on proportion^2
  double boat_efficiency = 0.98;  ///< eta
  double discount = 0.99;
  int horizon = 100;  ///< seasons a surviving episode lasts
  std::vector<double> local_actions = {1.0, 0.5, 0.3, 0.1};
};

struct FisheriesState {
  VecD fish;  ///< stock available per region, count units (kept as reals)
  int season = 0;
};

/// Logistic reproduction: f * exp(G * (1 - f / f_max)), clipped to f_max.
double grow_population(double total_fish, const FisheriesParams& params);

struct FisheriesStepResult {
  FisheriesState state;
  VecD boat_rewards;
  double reward = 0.0;  ///< exactly the sum of boat_rewards
  bool terminal = false;
  int outcome = 0;
};

enum FisheriesOutcome : int { kFisheriesSurvived = 1, kFisheriesCollapsed = 2 };

/// One season: catch, reward, reproduce, spread. `actions` are the assigned
/// proportions, each of which must be a member of params.local_actions.
/// Per-boat reward is (catch_i - zeta * a_i^2) / f_max; the 1/f_max scale
/// reproduces the reported per-policy scores with the global reward defined
/// as the exact sum of the boat rewards.
FisheriesStepResult fisheries_step(const FisheriesState& state,
                                   std::span<const double> actions,
                                   const FisheriesParams& params, Rng& rng);

/// EnvModel over the joint action space (base-|A_local| encoded; agent 0 is
/// the least significant digit). Observations are regional stock divided by
/// the maximum regional share f_max / n, so network inputs live in [0, 1].
class FisheriesEnv : public EnvModel {
 public:
  explicit FisheriesEnv(FisheriesParams params = {});

  int action_count() const override { return joint_actions_; }
  int observation_dim() const override { return params_.n_boats; }
  double discount() const override { return params_.discount; }
  VecD reset(Rng& rng) override;
  StepResult step(int action, Rng& rng) override;
  std::unique_ptr<EnvModel> clone() const override;
  std::string outcome_name(int outcome) const override;
  double episode_time() const override;  ///< seasons elapsed

  const FisheriesParams& params() const { return params_; }
  const FisheriesState& state() const { return state_; }
  double observation_scale() const { return obs_scale_; }

 private:
  VecD observe() const;

  FisheriesParams params_;
  FisheriesState state_;
  int joint_actions_ = 0;
  double obs_scale_ = 1.0;
};

/// The single-boat local problem: one region with its share of the global
/// capacity (f_max / n) and of the initial population. Observation is the
/// one-dimensional available stock, same encoding as one slot of the global
/// observation.
FisheriesParams single_boat_params(const FisheriesParams& global);
FisheriesEnv single_boat_env(const FisheriesParams& global);

}  // namespace qcor
