#pragma once

// Independent oracles for expected-value computation in tests. These stay on
// their own code paths: finite differences instead of backprop, dynamic
// programming instead of learned values.

#include <vector>

#include "qcor/net.hpp"

namespace qcor::test {

/// Central finite-difference gradient of cotangent . net(input) with respect
/// to the flattened parameters.
VecD finite_difference_grad(const ParamNet& net, const VecD& input, const VecD& cotangent,
                            double h = 1e-5);

/// Largest per-component relative error between two gradients. Components
/// where both magnitudes fall below `tiny` are compared absolutely.
double max_relative_error(const VecD& a, const VecD& b, double tiny = 1e-6);

struct TabularMdp {
  // transitions[s][a] is a distribution over next states; rewards[s][a] is
  // deterministic
  std::vector<std::vector<std::vector<double>>> transitions;
  std::vector<std::vector<double>> rewards;
  double gamma = 0.9;

  int n_states() const { return static_cast<int>(transitions.size()); }
  int n_actions() const { return static_cast<int>(transitions.front().size()); }
};

/// Q* by value iteration to the stated tolerance.
std::vector<std::vector<double>> value_iteration(const TabularMdp& mdp, double tol = 1e-12,
                                                 int max_iters = 100000);

/// Greedy policy from a Q table, lowest-index tie-breaking.
std::vector<int> greedy_policy_of(const std::vector<std::vector<double>>& q);

/// Smallest gap between the best and second-best action value over states.
double min_action_gap(const std::vector<std::vector<double>>& q);

}  // namespace qcor::test
