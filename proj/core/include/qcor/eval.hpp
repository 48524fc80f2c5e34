#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qcor/crosswalk.hpp"
#include "qcor/env.hpp"

namespace qcor {

/// Metrics over a batch of seeded simulations.
struct EvalReport {
  int n_sims = 0;
  double mean_return = 0.0;    ///< accumulated undiscounted reward
  double stderr_return = 0.0;  ///< sample standard error of the mean
  std::map<int, double> outcome_pct;  ///< outcome code -> percent of episodes
  double mean_success_time = 0.0;  ///< env time units, over successful episodes; NaN if none
  int success_outcome = 0;
  std::vector<uint64_t> seeds;

  double pct(int outcome) const;
};

struct EpisodeRow {
  uint64_t seed = 0;
  EpisodeResult episode;
  double time = 0.0;  ///< env time units at episode end
};

struct EvalResult {
  EvalReport report;
  std::vector<EpisodeRow> episodes;
};

std::vector<uint64_t> make_eval_seeds(uint64_t base, int n);

/// Runs one seeded rollout per entry of `seeds` on a clone of `env` and
/// aggregates. The policy is read-only; results are reproducible to the bit
/// for identical seed lists.
EvalResult evaluate(const EnvModel& env, const Policy& policy,
                    std::span<const uint64_t> seeds, long max_steps, int success_outcome);

void write_report_csv(std::ostream& out, const EvalReport& report, const EnvModel& env,
                      const std::string& config_hash);
void write_episodes_csv(std::ostream& out, const std::vector<EpisodeRow>& episodes,
                        const EnvModel& env, const std::string& config_hash);

/// One policy's objectives: minimize both time to cross and crash rate.
struct ParetoPoint {
  std::string policy_id;
  double time_s = 0.0;
  double crash_pct = 0.0;
};

bool pareto_dominates(const ParetoPoint& a, const ParetoPoint& b);

/// Nondominated subset, sorted by time (stable). Points with identical
/// objectives are all retained.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points,
                      const std::string& config_hash);

/// Greedy-action grid over ego position x pedestrian position, for a single
/// motionless pedestrian on the crosswalk, ego speed fixed, zero observation
/// noise, history filled with the current observation.
struct PolicyGrid {
  std::vector<double> xs;       ///< ego positions
  std::vector<double> ys;       ///< pedestrian positions
  std::vector<int> actions;     ///< row-major, actions[iy * xs.size() + ix]
};

PolicyGrid policy_slice(const Policy& policy, const CrosswalkParams& params, int nx, int ny,
                        double x_min = 5.0, double x_max = 37.0, double y_min = -5.0,
                        double y_max = 5.0, double ego_speed = 6.0);

void write_policy_grid_csv(std::ostream& out, const PolicyGrid& grid,
                           const CrosswalkParams& params, const std::string& config_hash);

/// Periodic frozen-weight evaluation during training.
struct ConvergencePoint {
  int index = 0;
  long step = 0;
  EvalReport report;
};

/// Attach to a trainer via set_eval_hook, run it, and collect the series.
/// Snapshot count is floor(budget / eval_every) + 1 (a final snapshot is
/// always taken). Evaluation draws from its own streams so training is
/// unaffected.
template <class Trainer>
std::vector<ConvergencePoint> convergence_track(Trainer& trainer, long eval_every,
                                                const EnvModel& eval_env, int n_sims,
                                                uint64_t seed_base, long max_steps,
                                                int success_outcome) {
  std::vector<ConvergencePoint> series;
  const std::vector<uint64_t> seeds = make_eval_seeds(seed_base, n_sims);
  trainer.set_eval_hook(eval_every, [&](long step, const Policy& frozen) {
    EvalResult res = evaluate(eval_env, frozen, seeds, max_steps, success_outcome);
    series.push_back(ConvergencePoint{static_cast<int>(series.size()), step,
                                      std::move(res.report)});
  });
  trainer.run();
  return series;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> series,
                           const EnvModel& env, const std::string& config_hash);

}  // namespace qcor
