#include "qcor/correction.hpp"

#include <stdexcept>

namespace qcor {

VecD corrected_q(const CorrectionSpec& spec, const VecD& state) {
  VecD q = spec.q_lo ? spec.q_lo(state) : VecD(spec.delta.output_dim(), 0.0);
  const VecD d = spec.delta.forward(state);
  if (q.size() != d.size()) {
    throw std::invalid_argument("corrected_q: q_lo and delta output dims disagree");
  }
  for (std::size_t a = 0; a < q.size(); ++a) q[a] += d[a];
  return q;
}

CorrectionResult train_correction(EnvModel& env, CorrectionSpec spec) {
  DqnTrainer trainer(env, spec.cfg, spec.q_lo, std::move(spec.delta));
  trainer.run();
  CorrectionResult result;
  result.spec.q_lo = std::move(spec.q_lo);
  result.spec.delta = trainer.net();
  result.spec.cfg = spec.cfg;
  result.log = trainer.log();
  return result;
}

DecomposedCorrectionResult train_decomposed_correction(EnvModel& env,
                                                       const DecomposedCorrectionSpec& spec) {
  if (spec.n_agents <= 0 || static_cast<int>(spec.q_lo.size()) != spec.n_agents) {
    throw std::invalid_argument("train_decomposed_correction: one q_lo per agent required");
  }
  DecomposedTrainer trainer(env, spec.cfg, spec.n_agents, spec.local_actions, spec.q_lo);
  trainer.run();
  return DecomposedCorrectionResult{trainer.nets(), trainer.log()};
}

}  // namespace qcor
