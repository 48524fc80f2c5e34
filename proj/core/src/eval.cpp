#include "qcor/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qcor/util.hpp"

namespace qcor {

namespace {

std::vector<int> sorted_outcomes(const EnvModel& env, const std::map<int, double>& pct) {
  (void)env;
  std::vector<int> codes;
  for (const auto& [code, p] : pct) codes.push_back(code);
  return codes;
}

}  // namespace

double EvalReport::pct(int outcome) const {
  auto it = outcome_pct.find(outcome);
  return it == outcome_pct.end() ? 0.0 : it->second;
}

std::vector<uint64_t> make_eval_seeds(uint64_t base, int n) {
  std::vector<uint64_t> seeds(n);
  Rng derive(base, 0xE7A1);  // dedicated evaluation stream
  for (int i = 0; i < n; ++i) seeds[i] = derive.next_u64();
  return seeds;
}

EvalResult evaluate(const EnvModel& env, const Policy& policy,
                    std::span<const uint64_t> seeds, long max_steps, int success_outcome) {
  if (seeds.empty()) throw std::invalid_argument("evaluate: need at least one seed");
  EvalResult result;
  result.report.n_sims = static_cast<int>(seeds.size());
  result.report.success_outcome = success_outcome;
  result.report.seeds.assign(seeds.begin(), seeds.end());
  result.episodes.reserve(seeds.size());

  std::unique_ptr<EnvModel> sim = env.clone();
  std::map<int, long> outcome_counts;
  double sum = 0.0, sum_sq = 0.0;
  double success_time_sum = 0.0;
  long success_count = 0;
  for (uint64_t seed : seeds) {
    Rng rng(seed);
    RolloutResult rr = rollout(*sim, policy, rng, max_steps);
    EpisodeRow row;
    row.seed = seed;
    row.episode = rr.episode;
    row.time = sim->episode_time();
    const double ret = rr.episode.undiscounted_return;
    sum += ret;
    sum_sq += ret * ret;
    outcome_counts[rr.episode.outcome] += 1;
    if (rr.episode.outcome == success_outcome) {
      success_time_sum += row.time;
      ++success_count;
    }
    result.episodes.push_back(std::move(row));
  }
  const double n = static_cast<double>(seeds.size());
  result.report.mean_return = sum / n;
  if (seeds.size() > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    result.report.stderr_return = std::sqrt(var / n);
  }
  for (const auto& [code, count] : outcome_counts) {
    result.report.outcome_pct[code] = 100.0 * static_cast<double>(count) / n;
  }
  result.report.mean_success_time =
      success_count > 0 ? success_time_sum / static_cast<double>(success_count)
                        : std::numeric_limits<double>::quiet_NaN();
  return result;
}

namespace {

void write_csv_value(std::ostream& out, double v) {
  if (std::isnan(v)) return;  // empty field
  out << format_double(v);
}

}  // namespace

void write_report_csv(std::ostream& out, const EvalReport& report, const EnvModel& env,
                      const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  out << "n_sims,mean_return,stderr_return";
  const std::vector<int> codes = sorted_outcomes(env, report.outcome_pct);
  for (int c : codes) out << ",pct_" << env.outcome_name(c);
  out << ",mean_success_time\n";
  out << report.n_sims << ',' << format_double(report.mean_return) << ','
      << format_double(report.stderr_return);
  for (int c : codes) out << ',' << format_double(report.pct(c));
  out << ',';
  write_csv_value(out, report.mean_success_time);
  out << '\n';
}

void write_episodes_csv(std::ostream& out, const std::vector<EpisodeRow>& episodes,
                        const EnvModel& env, const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  out << "sim,seed,undiscounted_return,discounted_return,steps,outcome,time\n";
  int i = 0;
  for (const EpisodeRow& row : episodes) {
    out << i++ << ',' << row.seed << ',' << format_double(row.episode.undiscounted_return)
        << ',' << format_double(row.episode.discounted_return) << ',' << row.episode.step_count
        << ',' << env.outcome_name(row.episode.outcome) << ',';
    write_csv_value(out, row.time);
    out << '\n';
  }
}

bool pareto_dominates(const ParetoPoint& a, const ParetoPoint& b) {
  return a.time_s <= b.time_s && a.crash_pct <= b.crash_pct &&
         (a.time_s < b.time_s || a.crash_pct < b.crash_pct);
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
  if (points.empty()) throw std::invalid_argument("pareto_front: empty input");
  std::vector<ParetoPoint> front;
  for (const ParetoPoint& candidate : points) {
    bool dominated = false;
    for (const ParetoPoint& other : points) {
      if (pareto_dominates(other, candidate)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(candidate);
  }
  std::stable_sort(front.begin(), front.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return a.time_s < b.time_s; });
  return front;
}

void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points,
                      const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  out << "policy_id,time_to_cross_s,crash_pct\n";
  for (const ParetoPoint& p : points) {
    out << p.policy_id << ',' << format_double(p.time_s) << ',' << format_double(p.crash_pct)
        << '\n';
  }
}

PolicyGrid policy_slice(const Policy& policy, const CrosswalkParams& params, int nx, int ny,
                        double x_min, double x_max, double y_min, double y_max,
                        double ego_speed) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("policy_slice: resolution must be >= 2");
  CrosswalkParams noiseless = params;
  noiseless.position_noise_sigma = 0.0;
  noiseless.velocity_noise_sigma = 0.0;

  PolicyGrid grid;
  grid.xs.resize(nx);
  grid.ys.resize(ny);
  for (int i = 0; i < nx; ++i) grid.xs[i] = x_min + (x_max - x_min) * i / (nx - 1);
  for (int j = 0; j < ny; ++j) grid.ys[j] = y_min + (y_max - y_min) * j / (ny - 1);
  grid.actions.resize(static_cast<std::size_t>(nx) * ny);

  CrosswalkState state;
  state.peds.assign(noiseless.n_pedestrians, PedestrianState{});
  state.ego_v = ego_speed;
  Rng rng(0);  // draws are multiplied by zero sigma; values are exact
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      state.ego_x = grid.xs[i];
      state.peds[0] = PedestrianState{grid.ys[j], 0.0, true};
      const VecD frame = observe(state, noiseless, rng);
      std::vector<VecD> history(noiseless.history_length, frame);
      grid.actions[static_cast<std::size_t>(j) * nx + i] =
          policy(stack_observations(history));
    }
  }
  return grid;
}

void write_policy_grid_csv(std::ostream& out, const PolicyGrid& grid,
                           const CrosswalkParams& params, const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  out << "# action legend (m/s^2):";
  for (std::size_t a = 0; a < params.actions.size(); ++a) {
    out << ' ' << a << '=' << format_double(params.actions[a]);
  }
  out << '\n';
  out << "ego_x\\ped_y";
  for (double y : grid.ys) out << ',' << format_double(y);
  out << '\n';
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    out << format_double(grid.xs[i]);
    for (std::size_t j = 0; j < grid.ys.size(); ++j) {
      out << ',' << grid.actions[j * grid.xs.size() + i];
    }
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergencePoint> series,
                           const EnvModel& env, const std::string& config_hash) {
  out << "# config_hash " << config_hash << '\n';
  std::vector<int> codes;
  for (const ConvergencePoint& p : series) {
    for (const auto& [code, pct] : p.report.outcome_pct) {
      if (std::find(codes.begin(), codes.end(), code) == codes.end()) codes.push_back(code);
    }
  }
  std::sort(codes.begin(), codes.end());
  out << "snapshot,step,n_sims,mean_return,stderr_return";
  for (int c : codes) out << ",pct_" << env.outcome_name(c);
  out << ",mean_success_time\n";
  for (const ConvergencePoint& p : series) {
    out << p.index << ',' << p.step << ',' << p.report.n_sims << ','
        << format_double(p.report.mean_return) << ',' << format_double(p.report.stderr_return);
    for (int c : codes) out << ',' << format_double(p.report.pct(c));
    out << ',';
    write_csv_value(out, p.report.mean_success_time);
    out << '\n';
  }
}

}  // namespace qcor
