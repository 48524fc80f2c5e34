#pragma once

#include <vector>

#include "qcor/dqn.hpp"
#include "qcor/env.hpp"
#include "qcor/net.hpp"

namespace qcor {

/// An additive correction learned on top of a frozen low-fidelity value
/// function: Q(s, a) ~ q_lo(s, a) + delta(s, a). q_lo is never modified by
/// training; only delta is parameterized.
struct CorrectionSpec {
  QFunction q_lo;  ///< frozen; any state -> action-values function
  ParamNet delta;  ///< trainable correction network
  DqnConfig cfg;
};

/// q_lo(s, .) + delta(s, .).
VecD corrected_q(const CorrectionSpec& spec, const VecD& state);

struct CorrectionResult {
  CorrectionSpec spec;  ///< delta holds the trained parameters
  std::vector<TrainRecord> log;
};

/// Learn the correction with the DQN machinery: epsilon-greedy over the
/// corrected values, TD targets on q_lo + delta with gradients through delta
/// only, target network covering delta alone. Budget accounting matches
/// train_dqn exactly. With q_lo identically zero this produces the same
/// parameter trajectory as plain DQN under the same seed.
CorrectionResult train_correction(EnvModel& env, CorrectionSpec spec);

/// Multi-agent variant: one correction network per agent, each receiving the
/// full global state and predicting values for the local action set; the
/// joint action maximizes the sum of the corrected per-agent values. Every
/// network gets one parameter update per environment step.
struct DecomposedCorrectionSpec {
  std::vector<QFunction> q_lo;  ///< per agent, frozen
  int n_agents = 0;
  int local_actions = 0;
  DqnConfig cfg;
};

struct DecomposedCorrectionResult {
  std::vector<ParamNet> deltas;
  std::vector<TrainRecord> log;
};

DecomposedCorrectionResult train_decomposed_correction(EnvModel& env,
                                                       const DecomposedCorrectionSpec& spec);

}  // namespace qcor
