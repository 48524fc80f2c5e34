#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "qcor/config.hpp"
#include "qcor/correction.hpp"
#include "qcor/eval.hpp"

namespace qcor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   ///< config or contract errors
inline constexpr int kExitNumeric = 3;  ///< non-finite values during training

/// A trained (or baseline) decision rule plus the networks needed to run it.
struct PolicyBundle {
  MethodKind method = MethodKind::BaselineFixed;
  FusionRule rule = FusionRule::MaxSum;
  double fixed_action = 0.0;
  std::shared_ptr<ParamNet> policy_net;  ///< dqn
  std::shared_ptr<ParamNet> q_lo_net;    ///< fusion/correction per-entity network
  std::shared_ptr<ParamNet> delta_net;   ///< crosswalk correction
  std::vector<std::shared_ptr<ParamNet>> agent_nets;  ///< decomposed nets or per-boat deltas
  std::string q_lo_origin;  ///< where the low-fidelity network came from
};

struct TrainOutputs {
  std::vector<TrainRecord> log;
  std::vector<ConvergencePoint> convergence;
};

/// Train the configured method for one seed. Baselines have nothing to train
/// and are rejected with config_error.
PolicyBundle train_bundle(const ExperimentConfig& config, uint64_t seed,
                          TrainOutputs* outputs = nullptr);

PolicyBundle baseline_bundle(const ExperimentConfig& config);

/// Greedy decision rule for the bundle on the configured environment.
/// Validates network dimensions against the environment.
Policy make_policy(const PolicyBundle& bundle, const ExperimentConfig& config);

void save_bundle(const std::filesystem::path& dir, const PolicyBundle& bundle,
                 const ExperimentConfig& config, uint64_t seed, const TrainOutputs& outputs);
PolicyBundle load_bundle(const std::filesystem::path& dir, const ExperimentConfig& config);

std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const std::string& out_override);

/// Command entry points; print diagnostics to stderr and return an exit code.
int cmd_train(const std::filesystem::path& config_path, const std::string& out_override = "");
int cmd_evaluate(const std::filesystem::path& config_path, const std::string& checkpoint_dir,
                 const std::string& out_override = "");
int cmd_slice(const std::filesystem::path& config_path, const std::string& checkpoint_dir,
              const std::string& out_override = "", int nx = 65, int ny = 41);
int cmd_sweep(const std::filesystem::path& config_path, const std::string& out_override = "");

}  // namespace qcor
