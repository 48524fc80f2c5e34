#include "qcor/commands.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcor/util.hpp"

namespace qcor {

using json = nlohmann::ordered_json;

namespace {

bool is_fisheries(EnvKind kind) {
  return kind == EnvKind::Fisheries || kind == EnvKind::FisheriesSingle;
}

ExperimentConfig single_entity_config(const ExperimentConfig& cfg) {
  ExperimentConfig sub = cfg;
  sub.env_kind = is_fisheries(cfg.env_kind) ? EnvKind::FisheriesSingle : EnvKind::CrosswalkSingle;
  return sub;
}

DqnConfig dqn_for_run(const ExperimentConfig& cfg, uint64_t seed, long steps) {
  DqnConfig dqn = cfg.dqn;
  dqn.seed = seed;
  dqn.total_train_steps = steps;
  if (dqn.max_episode_steps == 0) dqn.max_episode_steps = default_max_episode_steps(cfg);
  return dqn;
}

/// Load a network referenced by path: either a .net file or a run directory
/// whose manifest exposes a "policy" or "q_lo" artifact.
std::pair<ParamNet, std::string> resolve_net_reference(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path file = path;
  if (fs::is_directory(path)) {
    const fs::path manifest_path = path / "manifest.json";
    json manifest = json::parse(read_text_file(manifest_path));
    const json& artifacts = manifest.at("artifacts");
    const char* role = artifacts.contains("policy") ? "policy" : "q_lo";
    if (!artifacts.contains(role)) {
      throw config_error("checkpoint at " + path.string() + " exposes no usable network");
    }
    file = path / artifacts.at(role).at("file").get<std::string>();
  }
  ParamNet net = load_net_file(file);
  return {std::move(net), hash_file_hex(file)};
}

std::pair<std::shared_ptr<ParamNet>, std::string> obtain_q_lo(const ExperimentConfig& cfg,
                                                              uint64_t seed,
                                                              std::string& origin) {
  if (!cfg.q_lo_checkpoint.empty()) {
    auto [net, hash] = resolve_net_reference(cfg.q_lo_checkpoint);
    origin = cfg.q_lo_checkpoint;
    return {std::make_shared<ParamNet>(std::move(net)), hash};
  }
  // train the per-entity network on the single-entity problem
  ExperimentConfig sub = single_entity_config(cfg);
  std::unique_ptr<EnvModel> env = make_env(sub, CrosswalkMode::Training);
  DqnConfig dqn = dqn_for_run(sub, seed, cfg.budget.low_fidelity_steps);
  DqnTrainer trainer(*env, dqn);
  trainer.run();
  origin = "trained:" + std::string(env_kind_name(sub.env_kind));
  std::ostringstream ss;
  trainer.net().save(ss);
  return {std::make_shared<ParamNet>(trainer.net()), fnv1a64_hex(ss.str())};
}

FusedQ build_fused(const ExperimentConfig& cfg, std::shared_ptr<const ParamNet> q_lo,
                   std::shared_ptr<const ParamNet> correction) {
  FusedQ fused;
  fused.rule = cfg.rule;
  fused.correction = std::move(correction);
  const std::vector<StateSlicer> slicers = is_fisheries(cfg.env_kind)
                                               ? fisheries_entity_slicers(cfg.fisheries)
                                               : crosswalk_entity_slicers(cfg.crosswalk);
  for (const StateSlicer& s : slicers) fused.entities.push_back(FusedQ::Entity{s, q_lo});
  return fused;
}

void check_net_dims(const ParamNet& net, int input_dim, int output_dim, const char* role) {
  if (net.input_dim() != input_dim || net.output_dim() != output_dim) {
    throw config_error(std::string(role) + " network dims (" +
                       std::to_string(net.input_dim()) + " -> " +
                       std::to_string(net.output_dim()) +
                       ") do not match the configured environment (" +
                       std::to_string(input_dim) + " -> " + std::to_string(output_dim) + ")");
  }
}

int find_action_index(const std::vector<double>& values, double value, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return static_cast<int>(i);
  }
  throw config_error(std::string(what) + ": value not in the action set");
}

}  // namespace

PolicyBundle baseline_bundle(const ExperimentConfig& cfg) {
  PolicyBundle bundle;
  bundle.method = cfg.method;
  bundle.rule = cfg.rule;
  bundle.fixed_action = cfg.fixed_action;
  return bundle;
}

PolicyBundle train_bundle(const ExperimentConfig& cfg, uint64_t seed, TrainOutputs* outputs) {
  PolicyBundle bundle;
  bundle.method = cfg.method;
  bundle.rule = cfg.rule;
  bundle.fixed_action = cfg.fixed_action;

  const int success = success_outcome_for(cfg.env_kind);
  const long max_steps = default_max_episode_steps(cfg);

  switch (cfg.method) {
    case MethodKind::BaselineFixed:
    case MethodKind::BaselineRandom:
      throw config_error("baseline methods require no training");

    case MethodKind::Dqn: {
      std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Training);
      DqnConfig dqn = dqn_for_run(cfg, seed, cfg.dqn.total_train_steps);
      DqnTrainer trainer(*env, dqn);
      if (outputs && cfg.evaluation.eval_every > 0) {
        std::unique_ptr<EnvModel> eval_env = make_env(cfg, CrosswalkMode::Evaluation);
        outputs->convergence = convergence_track(trainer, cfg.evaluation.eval_every, *eval_env,
                                                 cfg.evaluation.n_sims,
                                                 cfg.evaluation.seed_base, max_steps, success);
      } else {
        trainer.run();
      }
      bundle.policy_net = std::make_shared<ParamNet>(trainer.net());
      if (outputs) outputs->log = trainer.log();
      break;
    }

    case MethodKind::DecomposedDqn: {
      std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Training);
      DqnConfig dqn = dqn_for_run(cfg, seed, cfg.dqn.total_train_steps);
      DecomposedTrainer trainer(*env, dqn, cfg.fisheries.n_boats,
                                static_cast<int>(cfg.fisheries.local_actions.size()));
      if (outputs && cfg.evaluation.eval_every > 0) {
        std::unique_ptr<EnvModel> eval_env = make_env(cfg, CrosswalkMode::Evaluation);
        outputs->convergence = convergence_track(trainer, cfg.evaluation.eval_every, *eval_env,
                                                 cfg.evaluation.n_sims,
                                                 cfg.evaluation.seed_base, max_steps, success);
      } else {
        trainer.run();
      }
      for (const ParamNet& net : trainer.nets()) {
        bundle.agent_nets.push_back(std::make_shared<ParamNet>(net));
      }
      if (outputs) outputs->log = trainer.log();
      break;
    }

    case MethodKind::Fusion: {
      auto [net, hash] = obtain_q_lo(cfg, seed, bundle.q_lo_origin);
      (void)hash;
      bundle.q_lo_net = std::move(net);
      break;
    }

    case MethodKind::Correction: {
      auto [q_lo_net, hash] = obtain_q_lo(cfg, seed, bundle.q_lo_origin);
      (void)hash;
      bundle.q_lo_net = q_lo_net;
      std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Training);
      DqnConfig dqn = dqn_for_run(cfg, seed, cfg.budget.correction_steps);

      if (is_fisheries(cfg.env_kind)) {
        // one correction network per boat, each over the global state
        const std::vector<StateSlicer> slicers = fisheries_entity_slicers(cfg.fisheries);
        std::vector<QFunction> q_lo;
        for (const StateSlicer& slicer : slicers) {
          q_lo.push_back([net = std::shared_ptr<const ParamNet>(q_lo_net),
                          slicer](const VecD& s) { return net->forward(slicer.apply(s)); });
        }
        DecomposedTrainer trainer(*env, dqn, cfg.fisheries.n_boats,
                                  static_cast<int>(cfg.fisheries.local_actions.size()), q_lo);
        if (outputs && cfg.evaluation.eval_every > 0) {
          std::unique_ptr<EnvModel> eval_env = make_env(cfg, CrosswalkMode::Evaluation);
          outputs->convergence =
              convergence_track(trainer, cfg.evaluation.eval_every, *eval_env,
                                cfg.evaluation.n_sims, cfg.evaluation.seed_base, max_steps,
                                success);
        } else {
          trainer.run();
        }
        for (const ParamNet& net : trainer.nets()) {
          bundle.agent_nets.push_back(std::make_shared<ParamNet>(net));
        }
        if (outputs) outputs->log = trainer.log();
      } else {
        const FusedQ fused = build_fused(cfg, q_lo_net, nullptr);
        DqnTrainer trainer(*env, dqn, fused.as_qfunction());
        if (outputs && cfg.evaluation.eval_every > 0) {
          std::unique_ptr<EnvModel> eval_env = make_env(cfg, CrosswalkMode::Evaluation);
          outputs->convergence =
              convergence_track(trainer, cfg.evaluation.eval_every, *eval_env,
                                cfg.evaluation.n_sims, cfg.evaluation.seed_base, max_steps,
                                success);
        } else {
          trainer.run();
        }
        bundle.delta_net = std::make_shared<ParamNet>(trainer.net());
        if (outputs) outputs->log = trainer.log();
      }
      break;
    }
  }
  return bundle;
}

Policy make_policy(const PolicyBundle& bundle, const ExperimentConfig& cfg) {
  std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Evaluation);
  const int obs_dim = env->observation_dim();
  const int n_actions = env->action_count();

  switch (bundle.method) {
    case MethodKind::BaselineFixed: {
      if (is_fisheries(cfg.env_kind)) {
        const int local = find_action_index(cfg.fisheries.local_actions, bundle.fixed_action,
                                            "baseline-fixed");
        const std::vector<int> joint(cfg.fisheries.n_boats, local);
        const int action = static_cast<int>(encode_joint_action(
            joint, static_cast<int>(cfg.fisheries.local_actions.size())));
        return [action](const VecD&) { return action; };
      }
      const int action =
          find_action_index(cfg.crosswalk.actions, bundle.fixed_action, "baseline-fixed");
      return [action](const VecD&) { return action; };
    }

    case MethodKind::BaselineRandom: {
      return [rng = Rng(cfg.evaluation.seed_base, 0xBA5E), n_actions](const VecD&) mutable {
        return rng.uniform_int(n_actions);
      };
    }

    case MethodKind::Dqn: {
      if (!bundle.policy_net) throw config_error("dqn bundle has no policy network");
      check_net_dims(*bundle.policy_net, obs_dim, n_actions, "policy");
      return [net = bundle.policy_net](const VecD& s) {
        return argmax_lowest(net->forward(s));
      };
    }

    case MethodKind::DecomposedDqn: {
      if (bundle.agent_nets.empty()) throw config_error("decomposed bundle has no networks");
      const int local = static_cast<int>(cfg.fisheries.local_actions.size());
      for (const auto& net : bundle.agent_nets) check_net_dims(*net, obs_dim, local, "agent");
      return [nets = bundle.agent_nets, local](const VecD& s) {
        std::vector<VecD> values;
        values.reserve(nets.size());
        for (const auto& net : nets) values.push_back(net->forward(s));
        return static_cast<int>(encode_joint_action(joint_argmax_sum(values), local));
      };
    }

    case MethodKind::Fusion:
    case MethodKind::Correction: {
      if (!bundle.q_lo_net) throw config_error("fusion bundle has no low-fidelity network");
      if (is_fisheries(cfg.env_kind)) {
        const int local = static_cast<int>(cfg.fisheries.local_actions.size());
        check_net_dims(*bundle.q_lo_net, 1, local, "q_lo");
        const std::vector<StateSlicer> slicers = fisheries_entity_slicers(cfg.fisheries);
        if (bundle.method == MethodKind::Correction) {
          if (bundle.agent_nets.size() != slicers.size()) {
            throw config_error("fisheries correction bundle needs one delta per boat");
          }
          for (const auto& net : bundle.agent_nets) check_net_dims(*net, obs_dim, local, "delta");
        }
        return [q_lo = std::shared_ptr<const ParamNet>(bundle.q_lo_net), slicers,
                deltas = bundle.agent_nets, local](const VecD& s) {
          std::vector<VecD> values(slicers.size());
          for (std::size_t i = 0; i < slicers.size(); ++i) {
            values[i] = q_lo->forward(slicers[i].apply(s));
            if (!deltas.empty()) {
              const VecD d = deltas[i]->forward(s);
              for (std::size_t a = 0; a < values[i].size(); ++a) values[i][a] += d[a];
            }
          }
          return static_cast<int>(encode_joint_action(joint_argmax_sum(values), local));
        };
      }
      check_net_dims(*bundle.q_lo_net, 4 * cfg.crosswalk.history_length, n_actions, "q_lo");
      std::shared_ptr<const ParamNet> correction;
      if (bundle.method == MethodKind::Correction) {
        if (!bundle.delta_net) throw config_error("correction bundle has no delta network");
        check_net_dims(*bundle.delta_net, obs_dim, n_actions, "delta");
        correction = bundle.delta_net;
      }
      FusedQ fused = build_fused(cfg, bundle.q_lo_net, correction);
      return [fused = std::move(fused)](const VecD& s) { return argmax_lowest(fused.fuse(s)); };
    }
  }
  throw config_error("unreachable method kind");
}

namespace {

void add_artifact(json& manifest, const std::filesystem::path& dir, const std::string& role,
                  const std::string& file, const ParamNet& net) {
  save_net_file(net, dir / file);
  manifest["artifacts"][role] = json{{"file", file}, {"hash", hash_file_hex(dir / file)}};
}

void write_log_csv(const std::filesystem::path& path, const std::vector<TrainRecord>& log,
                   const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash " << hash << '\n';
  out << "step,loss,epsilon,eval_index\n";
  for (const TrainRecord& r : log) {
    out << r.step << ',' << format_double(r.loss) << ',' << format_double(r.epsilon) << ',';
    if (r.eval_index >= 0) out << r.eval_index;
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const PolicyBundle& bundle,
                 const ExperimentConfig& cfg, uint64_t seed, const TrainOutputs& outputs) {
  std::filesystem::create_directories(dir);
  const std::string hash = config_hash(cfg);

  json manifest;
  manifest["format"] = "qcor-run";
  manifest["version"] = 1;
  manifest["config_hash"] = hash;
  manifest["environment"] = env_kind_name(cfg.env_kind);
  manifest["method"] = method_kind_name(bundle.method);
  manifest["rule"] = fusion_rule_name(bundle.rule);
  manifest["seed"] = seed;
  manifest["artifacts"] = json::object();

  if (bundle.policy_net) add_artifact(manifest, dir, "policy", "policy.net", *bundle.policy_net);
  if (bundle.q_lo_net) {
    add_artifact(manifest, dir, "q_lo", "q_lo.net", *bundle.q_lo_net);
    manifest["q_lo_reference"] =
        json{{"origin", bundle.q_lo_origin},
             {"file", "q_lo.net"},
             {"hash", manifest["artifacts"]["q_lo"]["hash"]}};
  }
  if (bundle.delta_net) add_artifact(manifest, dir, "delta", "delta.net", *bundle.delta_net);
  for (std::size_t i = 0; i < bundle.agent_nets.size(); ++i) {
    const std::string role = bundle.method == MethodKind::Correction
                                 ? "delta_" + std::to_string(i)
                                 : "agent_" + std::to_string(i);
    add_artifact(manifest, dir, role, role + ".net", *bundle.agent_nets[i]);
  }

  write_text_file(dir / "config.json", serialize_config(cfg));
  write_log_csv(dir / "train_log.csv", outputs.log, hash);
  if (!outputs.convergence.empty()) {
    std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Evaluation);
    std::ostringstream out;
    write_convergence_csv(out, outputs.convergence, *env, hash);
    write_text_file(dir / "convergence.csv", out.str());
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

PolicyBundle load_bundle(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const std::exception& e) {
    throw config_error("cannot read checkpoint manifest at " + manifest_path.string() + ": " +
                       e.what());
  }
  if (manifest.value("format", "") != "qcor-run") {
    throw config_error("not a qcor run directory: " + dir.string());
  }
  if (manifest.at("method").get<std::string>() != method_kind_name(cfg.method)) {
    throw config_error("checkpoint was trained with method '" +
                       manifest.at("method").get<std::string>() +
                       "' but the config requests '" + method_kind_name(cfg.method) + "'");
  }
  if (manifest.at("environment").get<std::string>() != env_kind_name(cfg.env_kind)) {
    throw config_error("checkpoint environment does not match the config");
  }

  PolicyBundle bundle;
  bundle.method = cfg.method;
  bundle.rule = fusion_rule_from_name(manifest.at("rule").get<std::string>());
  bundle.fixed_action = cfg.fixed_action;

  auto load_role = [&](const std::string& role) -> std::shared_ptr<ParamNet> {
    const json& artifacts = manifest.at("artifacts");
    if (!artifacts.contains(role)) return nullptr;
    const std::string file = artifacts.at(role).at("file").get<std::string>();
    const std::string expected = artifacts.at(role).at("hash").get<std::string>();
    const std::filesystem::path path = dir / file;
    if (hash_file_hex(path) != expected) {
      throw config_error("checkpoint file " + path.string() +
                         " does not match the hash recorded in the manifest");
    }
    return std::make_shared<ParamNet>(load_net_file(path));
  };

  bundle.policy_net = load_role("policy");
  bundle.q_lo_net = load_role("q_lo");
  bundle.delta_net = load_role("delta");
  for (int i = 0;; ++i) {
    std::shared_ptr<ParamNet> net = load_role("agent_" + std::to_string(i));
    if (!net) net = load_role("delta_" + std::to_string(i));
    if (!net) break;
    bundle.agent_nets.push_back(std::move(net));
  }
  return bundle;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::string& out_override) {
  std::filesystem::path dir = out_override.empty() ? cfg.output_dir : out_override;
  if (dir.is_relative()) {
    if (const char* root = std::getenv("QCOR_OUTPUT_ROOT")) dir = std::filesystem::path(root) / dir;
  }
  return dir;
}

namespace {

int run_command(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

void evaluate_to_files(const ExperimentConfig& cfg, const PolicyBundle& bundle,
                       const std::filesystem::path& out_dir) {
  std::unique_ptr<EnvModel> env = make_env(cfg, CrosswalkMode::Evaluation);
  const Policy policy = make_policy(bundle, cfg);
  const std::vector<uint64_t> seeds =
      make_eval_seeds(cfg.evaluation.seed_base, cfg.evaluation.n_sims);
  const EvalResult result = evaluate(*env, policy, seeds, default_max_episode_steps(cfg),
                                     success_outcome_for(cfg.env_kind));
  const std::string hash = config_hash(cfg);
  std::ostringstream report;
  write_report_csv(report, result.report, *env, hash);
  write_text_file(out_dir / "eval_report.csv", report.str());
  std::ostringstream episodes;
  write_episodes_csv(episodes, result.episodes, *env, hash);
  write_text_file(out_dir / "eval_episodes.csv", episodes.str());
}

}  // namespace

int cmd_train(const std::filesystem::path& config_path, const std::string& out_override) {
  return run_command([&] {
    const ExperimentConfig cfg = load_config_file(config_path);
    if (cfg.method == MethodKind::BaselineFixed || cfg.method == MethodKind::BaselineRandom) {
      throw config_error("method '" + std::string(method_kind_name(cfg.method)) +
                         "' requires no training; run evaluate instead");
    }
    const std::filesystem::path root = resolve_output_dir(cfg, out_override);
    for (uint64_t seed : cfg.seeds) {
      TrainOutputs outputs;
      const PolicyBundle bundle = train_bundle(cfg, seed, &outputs);
      save_bundle(root / ("seed_" + std::to_string(seed)), bundle, cfg, seed, outputs);
    }
  });
}

int cmd_evaluate(const std::filesystem::path& config_path, const std::string& checkpoint_dir,
                 const std::string& out_override) {
  return run_command([&] {
    const ExperimentConfig cfg = load_config_file(config_path);
    PolicyBundle bundle;
    if (cfg.method == MethodKind::BaselineFixed || cfg.method == MethodKind::BaselineRandom) {
      bundle = baseline_bundle(cfg);
    } else if (!checkpoint_dir.empty()) {
      bundle = load_bundle(checkpoint_dir, cfg);
    } else if ((cfg.method == MethodKind::Fusion || cfg.method == MethodKind::Correction) &&
               !cfg.q_lo_checkpoint.empty() && cfg.method == MethodKind::Fusion) {
      auto [net, hash] = resolve_net_reference(cfg.q_lo_checkpoint);
      (void)hash;
      bundle = baseline_bundle(cfg);
      bundle.q_lo_net = std::make_shared<ParamNet>(std::move(net));
      bundle.q_lo_origin = cfg.q_lo_checkpoint;
    } else {
      throw config_error("method '" + std::string(method_kind_name(cfg.method)) +
                         "' needs a trained checkpoint directory (--checkpoint)");
    }
    evaluate_to_files(cfg, bundle, resolve_output_dir(cfg, out_override));
  });
}

int cmd_slice(const std::filesystem::path& config_path, const std::string& checkpoint_dir,
              const std::string& out_override, int nx, int ny) {
  return run_command([&] {
    const ExperimentConfig cfg = load_config_file(config_path);
    if (cfg.env_kind != EnvKind::Crosswalk && cfg.env_kind != EnvKind::CrosswalkSingle) {
      throw config_error("slice requires a crosswalk environment");
    }
    PolicyBundle bundle;
    if (cfg.method == MethodKind::BaselineFixed || cfg.method == MethodKind::BaselineRandom) {
      bundle = baseline_bundle(cfg);
    } else {
      if (checkpoint_dir.empty()) throw config_error("slice needs --checkpoint");
      bundle = load_bundle(checkpoint_dir, cfg);
    }
    const Policy policy = make_policy(bundle, cfg);
    const CrosswalkParams params = cfg.env_kind == EnvKind::CrosswalkSingle
                                       ? single_pedestrian_params(cfg.crosswalk)
                                       : cfg.crosswalk;
    const PolicyGrid grid = policy_slice(policy, params, nx, ny);
    std::ostringstream out;
    write_policy_grid_csv(out, grid, params, config_hash(cfg));
    write_text_file(resolve_output_dir(cfg, out_override) / "slice.csv", out.str());
  });
}

int cmd_sweep(const std::filesystem::path& config_path, const std::string& out_override) {
  return run_command([&] {
    const ExperimentConfig cfg = load_config_file(config_path);
    if (cfg.method == MethodKind::BaselineFixed || cfg.method == MethodKind::BaselineRandom) {
      throw config_error("sweep requires a trainable method");
    }
    std::vector<double> fractions = cfg.sweep.exploration_fractions;
    if (fractions.empty()) fractions = {cfg.dqn.exploration_fraction};
    std::vector<double> finals = cfg.sweep.final_epsilons;
    if (finals.empty()) finals = {cfg.dqn.final_epsilon};

    const std::filesystem::path root = resolve_output_dir(cfg, out_override);
    const bool crosswalk = !is_fisheries(cfg.env_kind);

    std::ostringstream results;
    results << "# config_hash " << config_hash(cfg) << '\n';
    results << "policy_id,exploration_fraction,final_epsilon,seed,mean_return,stderr_return,"
               "crash_pct,success_pct,timeout_pct,mean_success_time\n";
    std::vector<ParetoPoint> points;
    for (double ef : fractions) {
      for (double fe : finals) {
        for (uint64_t seed : cfg.seeds) {
          ExperimentConfig sub = cfg;
          sub.dqn.exploration_fraction = ef;
          sub.dqn.final_epsilon = fe;
          std::ostringstream id;
          id << "ef" << format_double(ef) << "_fe" << format_double(fe) << "_seed" << seed;
          TrainOutputs outputs;
          const PolicyBundle bundle = train_bundle(sub, seed, &outputs);
          save_bundle(root / "runs" / id.str(), bundle, sub, seed, outputs);

          std::unique_ptr<EnvModel> env = make_env(sub, CrosswalkMode::Evaluation);
          const Policy policy = make_policy(bundle, sub);
          const std::vector<uint64_t> seeds =
              make_eval_seeds(sub.evaluation.seed_base, sub.evaluation.n_sims);
          const EvalResult res = evaluate(*env, policy, seeds, default_max_episode_steps(sub),
                                          success_outcome_for(sub.env_kind));
          const double crash = res.report.pct(kCrosswalkCollision);
          const double success_pct = res.report.pct(res.report.success_outcome);
          const double timeout_pct = res.report.pct(kCrosswalkTimeout);
          results << id.str() << ',' << format_double(ef) << ',' << format_double(fe) << ','
                  << seed << ',' << format_double(res.report.mean_return) << ','
                  << format_double(res.report.stderr_return) << ','
                  << format_double(crosswalk ? crash : 0.0) << ','
                  << format_double(success_pct) << ','
                  << format_double(crosswalk ? timeout_pct : 0.0) << ',';
          if (!std::isnan(res.report.mean_success_time)) {
            results << format_double(res.report.mean_success_time);
          }
          results << '\n';
          if (crosswalk) {
            // policies that never cross get the timeout as their time objective
            const double time = std::isnan(res.report.mean_success_time)
                                    ? sub.crosswalk.timeout
                                    : res.report.mean_success_time;
            points.push_back(ParetoPoint{id.str(), time, crash});
          }
        }
      }
    }
    write_text_file(root / "sweep_results.csv", results.str());
    if (crosswalk && !points.empty()) {
      std::ostringstream all;
      write_pareto_csv(all, points, config_hash(cfg));
      write_text_file(root / "pareto_points.csv", all.str());
      const std::vector<ParetoPoint> front = pareto_front(points);
      std::ostringstream front_out;
      write_pareto_csv(front_out, front, config_hash(cfg));
      write_text_file(root / "pareto_front.csv", front_out.str());
    }
  });
}

}  // namespace qcor
