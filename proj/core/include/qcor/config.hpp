#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qcor/crosswalk.hpp"
#include "qcor/dqn.hpp"
#include "qcor/fisheries.hpp"
#include "qcor/fusion.hpp"

namespace qcor {

enum class EnvKind { Fisheries, FisheriesSingle, Crosswalk, CrosswalkSingle };
enum class MethodKind { BaselineFixed, BaselineRandom, Dqn, DecomposedDqn, Fusion, Correction };

const char* env_kind_name(EnvKind kind);
EnvKind env_kind_from_name(std::string_view name);
const char* method_kind_name(MethodKind kind);
MethodKind method_kind_from_name(std::string_view name);

struct BudgetConfig {
  long low_fidelity_steps = 0;  ///< experience samples for the per-entity network
  long correction_steps = 0;    ///< experience samples for the correction
};

struct EvalSettings {
  int n_sims = 100;
  uint64_t seed_base = 20180101;
  long eval_every = 0;  ///< env steps between frozen-weight evaluations; 0 disables
};

struct SweepSettings {
  std::vector<double> exploration_fractions;
  std::vector<double> final_epsilons;
};

/// One experiment: an environment, a method, and the training/evaluation
/// settings. Field defaults follow the per-problem hyperparameter tables;
/// a parsed config has every field resolved.
struct ExperimentConfig {
  EnvKind env_kind = EnvKind::Fisheries;
  FisheriesParams fisheries;
  CrosswalkParams crosswalk;

  MethodKind method = MethodKind::BaselineFixed;
  FusionRule rule = FusionRule::MaxSum;
  double fixed_action = 0.1;       ///< baseline-fixed: an action value of the environment
  std::string q_lo_checkpoint;     ///< optional path to a trained low-fidelity network

  DqnConfig dqn;
  BudgetConfig budget;
  EvalSettings evaluation;
  SweepSettings sweep;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = "out";
};

/// Parse and fully validate a config document. Unknown keys are rejected;
/// method-specific required fields are enforced. Throws config_error with a
/// diagnostic naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical serialization: every field explicit, keys sorted. parse of the
/// output reproduces the config exactly.
std::string serialize_config(const ExperimentConfig& config);

/// Hash of the canonical serialization, excluding output_dir so the same
/// experiment hashes identically wherever its outputs land.
std::string config_hash(const ExperimentConfig& config);

std::unique_ptr<EnvModel> make_env(const ExperimentConfig& config, CrosswalkMode mode);
long default_max_episode_steps(const ExperimentConfig& config);
int success_outcome_for(EnvKind kind);

/// Entity slicers for fused policies: per region (fisheries) or per
/// pedestrian slot across the stacked frames (crosswalk).
std::vector<StateSlicer> fisheries_entity_slicers(const FisheriesParams& params);
std::vector<StateSlicer> crosswalk_entity_slicers(const CrosswalkParams& params);

}  // namespace qcor
