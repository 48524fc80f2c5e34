// Command line driver: train, evaluate, slice, and sweep experiments
// described by a JSON config. Exit codes: 0 success, 2 config/contract
// errors, 3 numeric failures.

#include <string>

#include <CLI11.hpp>

#include "qcor/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"utility-decomposition and deep-correction RL toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint;
  std::string out_override;
  int nx = 65;
  int ny = 41;

  CLI::App* train = app.add_subcommand("train", "train the configured method, one run per seed");
  train->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  train->add_option("-o,--out", out_override, "output directory (overrides config)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "run seeded evaluation episodes and write reports");
  evaluate->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  evaluate->add_option("-k,--checkpoint", checkpoint,
                       "trained run directory (not needed for baselines)");
  evaluate->add_option("-o,--out", out_override, "output directory (overrides config)");

  CLI::App* slice = app.add_subcommand("slice", "export the policy over an ego x pedestrian grid");
  slice->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  slice->add_option("-k,--checkpoint", checkpoint, "trained run directory");
  slice->add_option("-o,--out", out_override, "output directory (overrides config)");
  slice->add_option("--nx", nx, "grid resolution along ego position");
  slice->add_option("--ny", ny, "grid resolution along pedestrian position");

  CLI::App* sweep =
      app.add_subcommand("sweep", "train and evaluate a seed x exploration-schedule grid");
  sweep->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  sweep->add_option("-o,--out", out_override, "output directory (overrides config)");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return qcor::cmd_train(config_path, out_override);
  if (evaluate->parsed()) return qcor::cmd_evaluate(config_path, checkpoint, out_override);
  if (slice->parsed()) return qcor::cmd_slice(config_path, checkpoint, out_override, nx, ny);
  if (sweep->parsed()) return qcor::cmd_sweep(config_path, out_override);
  return qcor::kExitConfig;
}
