#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qcor/env.hpp"
#include "qcor/net.hpp"

namespace qcor {

/// How per-entity action values are combined into a global value.
enum class FusionRule { MaxSum, MaxMin };

const char* fusion_rule_name(FusionRule rule);
FusionRule fusion_rule_from_name(std::string_view name);

/// Maps a global state to the substate one entity's value function consumes.
/// Pure data (index list) so configurations serialize.
struct StateSlicer {
  std::vector<int> indices;

  VecD apply(std::span<const double> state) const;
};

/// A composite value function: per-entity low-fidelity Q-networks combined by
/// a fusion rule, with an optional additive correction network evaluated on
/// the full state. Immutable after construction; safe to evaluate
/// concurrently.
struct FusedQ {
  struct Entity {
    StateSlicer slicer;
    std::shared_ptr<const ParamNet> net;
  };

  std::vector<Entity> entities;
  FusionRule rule = FusionRule::MaxSum;
  std::shared_ptr<const ParamNet> correction;  ///< optional

  /// Action values for the global state: componentwise sum (MaxSum) or
  /// minimum (MaxMin) of the entity values, plus the correction if attached.
  VecD fuse(std::span<const double> state) const;

  QFunction as_qfunction() const;
};

/// Joint action maximizing the sum of per-agent action values. The sum
/// separates over agents, so this is the per-agent argmax; it equals the
/// exhaustive joint-space argmax under lowest-index tie-breaking.
std::vector<int> joint_argmax_sum(std::span<const VecD> per_agent_q);

/// Base-|A_local| encoding of a joint action; agent 0 is the least
/// significant digit.
long encode_joint_action(std::span<const int> locals, int local_actions);
std::vector<int> decode_joint_action(long code, int local_actions, int n_agents);

}  // namespace qcor
