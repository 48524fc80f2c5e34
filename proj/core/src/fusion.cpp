#include "qcor/fusion.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qcor {

const char* fusion_rule_name(FusionRule rule) {
  return rule == FusionRule::MaxSum ? "max-sum" : "max-min";
}

FusionRule fusion_rule_from_name(std::string_view name) {
  if (name == "max-sum") return FusionRule::MaxSum;
  if (name == "max-min") return FusionRule::MaxMin;
  throw std::invalid_argument("unknown fusion rule: " + std::string(name));
}

VecD StateSlicer::apply(std::span<const double> state) const {
  VecD out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int idx = indices[i];
    if (idx < 0 || idx >= static_cast<int>(state.size())) {
      throw std::invalid_argument("StateSlicer: index out of range");
    }
    out[i] = state[idx];
  }
  return out;
}

VecD FusedQ::fuse(std::span<const double> state) const {
  if (entities.empty()) throw std::logic_error("FusedQ: no entities");
  VecD fused;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const Entity& e = entities[i];
    VecD q = e.net->forward(e.slicer.apply(state));
    if (i == 0) {
      fused = std::move(q);
    } else {
      if (q.size() != fused.size()) {
        throw std::invalid_argument("FusedQ: entity output dims disagree");
      }
      if (rule == FusionRule::MaxSum) {
        for (std::size_t a = 0; a < fused.size(); ++a) fused[a] += q[a];
      } else {
        for (std::size_t a = 0; a < fused.size(); ++a) fused[a] = std::min(fused[a], q[a]);
      }
    }
  }
  if (correction) {
    VecD delta = correction->forward(state);
    if (delta.size() != fused.size()) {
      throw std::invalid_argument("FusedQ: correction output dim disagrees");
    }
    for (std::size_t a = 0; a < fused.size(); ++a) fused[a] += delta[a];
  }
  return fused;
}

QFunction FusedQ::as_qfunction() const {
  return [copy = *this](const VecD& state) { return copy.fuse(state); };
}

std::vector<int> joint_argmax_sum(std::span<const VecD> per_agent_q) {
  if (per_agent_q.empty()) throw std::invalid_argument("joint_argmax_sum: no agents");
  const std::size_t n_actions = per_agent_q.front().size();
  std::vector<int> joint;
  joint.reserve(per_agent_q.size());
  for (const VecD& q : per_agent_q) {
    if (q.empty() || q.size() != n_actions) {
      throw std::invalid_argument("joint_argmax_sum: action-value lengths disagree");
    }
    joint.push_back(argmax_lowest(q));
  }
  return joint;
}

long encode_joint_action(std::span<const int> locals, int local_actions) {
  long code = 0;
  long mult = 1;
  for (int a : locals) {
    if (a < 0 || a >= local_actions) {
      throw std::invalid_argument("encode_joint_action: local action out of range");
    }
    code += mult * a;
    mult *= local_actions;
  }
  return code;
}

std::vector<int> decode_joint_action(long code, int local_actions, int n_agents) {
  if (code < 0) throw std::invalid_argument("decode_joint_action: negative code");
  std::vector<int> locals(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    locals[i] = static_cast<int>(code % local_actions);
    code /= local_actions;
  }
  if (code != 0) throw std::invalid_argument("decode_joint_action: code out of range");
  return locals;
}

}  // namespace qcor
