#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcor::test {

VecD finite_difference_grad(const ParamNet& net, const VecD& input, const VecD& cotangent,
                            double h) {
  ParamNet probe = net;
  VecD params = probe.flatten_params();
  VecD grad(params.size(), 0.0);
  auto objective = [&](const VecD& p) {
    probe.unflatten_params(p);
    const VecD out = probe.forward(input);
    double value = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) value += cotangent[i] * out[i];
    return value;
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double plus = objective(params);
    params[i] = saved - h;
    const double minus = objective(params);
    params[i] = saved;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const VecD& a, const VecD& b, double tiny) {
  if (a.size() != b.size()) throw std::invalid_argument("max_relative_error: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::fabs(a[i]), std::fabs(b[i]));
    const double diff = std::fabs(a[i] - b[i]);
    worst = std::max(worst, scale < tiny ? diff : diff / scale);
  }
  return worst;
}

std::vector<std::vector<double>> value_iteration(const TabularMdp& mdp, double tol,
                                                 int max_iters) {
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  std::vector<std::vector<double>> q(S, std::vector<double>(A, 0.0));
  for (int iter = 0; iter < max_iters; ++iter) {
    double delta = 0.0;
    std::vector<std::vector<double>> next = q;
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double value = mdp.rewards[s][a];
        for (int s2 = 0; s2 < S; ++s2) {
          double best = q[s2][0];
          for (int a2 = 1; a2 < A; ++a2) best = std::max(best, q[s2][a2]);
          value += mdp.gamma * mdp.transitions[s][a][s2] * best;
        }
        delta = std::max(delta, std::fabs(value - q[s][a]));
        next[s][a] = value;
      }
    }
    q.swap(next);
    if (delta < tol) break;
  }
  return q;
}

std::vector<int> greedy_policy_of(const std::vector<std::vector<double>>& q) {
  std::vector<int> policy(q.size());
  for (std::size_t s = 0; s < q.size(); ++s) {
    int best = 0;
    for (std::size_t a = 1; a < q[s].size(); ++a) {
      if (q[s][a] > q[s][best]) best = static_cast<int>(a);
    }
    policy[s] = best;
  }
  return policy;
}

double min_action_gap(const std::vector<std::vector<double>>& q) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& row : q) {
    std::vector<double> sorted = row;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    if (sorted.size() >= 2) gap = std::min(gap, sorted[0] - sorted[1]);
  }
  return gap;
}

}  // namespace qcor::test
