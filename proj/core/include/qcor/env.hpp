#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcor/net.hpp"
#include "qcor/rng.hpp"

namespace qcor {

/// One environment transition, the unit stored in replay buffers.
struct Experience {
  VecD state;
  int action = 0;
  double reward = 0.0;
  VecD next_state;
  bool terminal = false;
};

struct StepResult {
  VecD next_state;
  double reward = 0.0;
  bool terminal = false;
  int outcome = 0;  ///< environment-specific label, meaningful when terminal
  /// True when the episode ended on a time limit that is not part of the
  /// observable state (the fisheries season horizon). Episode accounting
  /// treats it as an episode end; training targets bootstrap through it.
  bool truncated = false;
};

/// Episodes that end at max_steps without reaching a terminal state carry
/// this outcome code.
inline constexpr int kOutcomeTruncated = 0;

/// Generative environment model. Instances carry the episode in progress;
/// all stochasticity is drawn from the Rng passed at each call, so identical
/// seeds reproduce identical episodes. Parallel rollouts use one clone and
/// one stream each.
class EnvModel {
 public:
  virtual ~EnvModel() = default;

  virtual int action_count() const = 0;
  virtual int observation_dim() const = 0;
  virtual double discount() const = 0;

  /// Begin a new episode; returns the initial observable state.
  virtual VecD reset(Rng& rng) = 0;

  /// Advance one decision step. reset() must have been called first.
  virtual StepResult step(int action, Rng& rng) = 0;

  virtual std::unique_ptr<EnvModel> clone() const = 0;

  virtual std::string outcome_name(int outcome) const {
    return outcome == kOutcomeTruncated ? "truncated" : std::to_string(outcome);
  }

  /// Physical duration of the episode in progress, in environment units
  /// (seconds for the crosswalk, seasons for the fisheries). NaN if the
  /// environment has no notion of elapsed time.
  virtual double episode_time() const;
};

struct EpisodeResult {
  double discounted_return = 0.0;
  double undiscounted_return = 0.0;
  long step_count = 0;
  int outcome = kOutcomeTruncated;
};

using Policy = std::function<int(const VecD&)>;
using QFunction = std::function<VecD(const VecD&)>;

struct RolloutResult {
  EpisodeResult episode;
  std::vector<Experience> trace;
};

/// Run one episode to a terminal state or max_steps, whichever comes first.
/// Returns are accumulated exactly: discounted with the environment's gamma,
/// undiscounted as a plain sum. Throws std::invalid_argument if the policy
/// returns an out-of-range action.
RolloutResult rollout(EnvModel& env, const Policy& policy, Rng& rng, long max_steps);

/// Index of the largest element; ties broken by lowest index.
int argmax_lowest(std::span<const double> values);

/// Policy taking a uniformly random action with probability epsilon and the
/// greedy action otherwise. The rng is captured by reference and must outlive
/// the policy.
Policy epsilon_greedy(QFunction q, int action_count, double epsilon, Rng& rng);

/// Linear decay from 1.0 at step 0 to final_epsilon at
/// exploration_fraction * total_steps, constant afterward.
double epsilon_schedule(long step, long total_steps, double exploration_fraction,
                        double final_epsilon);

/// Episode trace as CSV: step, state components, action, reward, terminal.
void write_trace_csv(std::ostream& out, std::span<const Experience> trace);

}  // namespace qcor
