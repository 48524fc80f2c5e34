#include "qcor/env.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qcor/util.hpp"

namespace qcor {

double EnvModel::episode_time() const {
  return std::numeric_limits<double>::quiet_NaN();
}

RolloutResult rollout(EnvModel& env, const Policy& policy, Rng& rng, long max_steps) {
  if (max_steps < 1) throw std::invalid_argument("rollout: max_steps must be >= 1");
  RolloutResult result;
  const double gamma = env.discount();
  double gamma_t = 1.0;
  VecD state = env.reset(rng);
  for (long step = 0; step < max_steps; ++step) {
    const int action = policy(state);
    if (action < 0 || action >= env.action_count()) {
      throw std::invalid_argument("rollout: policy returned out-of-range action " +
                                  std::to_string(action));
    }
    StepResult sr = env.step(action, rng);
    result.episode.discounted_return += gamma_t * sr.reward;
    result.episode.undiscounted_return += sr.reward;
    gamma_t *= gamma;
    result.episode.step_count += 1;
    result.trace.push_back(Experience{std::move(state), action, sr.reward,
                                      sr.next_state, sr.terminal});
    state = std::move(sr.next_state);
    if (result.trace.back().terminal) {
      result.episode.outcome = sr.outcome;
      break;
    }
  }
  return result;
}

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_lowest: empty input");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Policy epsilon_greedy(QFunction q, int action_count, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("epsilon_greedy: epsilon must be in [0, 1]");
  }
  return [q = std::move(q), action_count, epsilon, &rng](const VecD& state) -> int {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(action_count);
    return argmax_lowest(q(state));
  };
}

double epsilon_schedule(long step, long total_steps, double exploration_fraction,
                        double final_epsilon) {
  const double decay_steps = exploration_fraction * static_cast<double>(total_steps);
  if (static_cast<double>(step) >= decay_steps || decay_steps <= 0.0) {
    return final_epsilon;
  }
  return 1.0 + (final_epsilon - 1.0) * static_cast<double>(step) / decay_steps;
}

void write_trace_csv(std::ostream& out, std::span<const Experience> trace) {
  if (trace.empty()) return;
  const std::size_t dim = trace.front().state.size();
  out << "step";
  for (std::size_t i = 0; i < dim; ++i) out << ",s" << i;
  out << ",action,reward,terminal\n";
  long step = 0;
  for (const Experience& exp : trace) {
    out << step++;
    for (double s : exp.state) out << ',' << format_double(s);
    out << ',' << exp.action << ',' << format_double(exp.reward) << ','
        << (exp.terminal ? 1 : 0) << '\n';
  }
}

}  // namespace qcor
