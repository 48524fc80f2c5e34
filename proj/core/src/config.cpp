#include "qcor/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qcor/util.hpp"

namespace qcor {

using json = nlohmann::ordered_json;

const char* env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::Fisheries: return "fisheries";
    case EnvKind::FisheriesSingle: return "fisheries-single";
    case EnvKind::Crosswalk: return "crosswalk";
    case EnvKind::CrosswalkSingle: return "crosswalk-single";
  }
  return "?";
}

EnvKind env_kind_from_name(std::string_view name) {
  if (name == "fisheries") return EnvKind::Fisheries;
  if (name == "fisheries-single") return EnvKind::FisheriesSingle;
  if (name == "crosswalk") return EnvKind::Crosswalk;
  if (name == "crosswalk-single") return EnvKind::CrosswalkSingle;
  throw config_error("unknown environment name: " + std::string(name));
}

const char* method_kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::BaselineFixed: return "baseline-fixed";
    case MethodKind::BaselineRandom: return "baseline-random";
    case MethodKind::Dqn: return "dqn";
    case MethodKind::DecomposedDqn: return "decomposed-dqn";
    case MethodKind::Fusion: return "fusion";
    case MethodKind::Correction: return "correction";
  }
  return "?";
}

MethodKind method_kind_from_name(std::string_view name) {
  if (name == "baseline-fixed") return MethodKind::BaselineFixed;
  if (name == "baseline-random") return MethodKind::BaselineRandom;
  if (name == "dqn") return MethodKind::Dqn;
  if (name == "decomposed-dqn") return MethodKind::DecomposedDqn;
  if (name == "fusion") return MethodKind::Fusion;
  if (name == "correction") return MethodKind::Correction;
  throw config_error("unknown method name: " + std::string(name));
}

namespace {

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw config_error("expected an object at " + path);
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw config_error("unknown key '" + path + "." + item.key() + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw config_error("bad value for '" + path + "." + key + "': " + e.what());
  }
}

void parse_fisheries_params(const json& obj, const std::string& path, FisheriesParams& p) {
  check_keys(obj, path,
             {"n_boats", "initial_population", "max_population", "min_population",
              "growth_rate", "fishing_cost", "boat_efficiency", "discount", "horizon",
              "local_actions"});
  read_field(obj, path, "n_boats", p.n_boats);
  read_field(obj, path, "initial_population", p.initial_population);
  read_field(obj, path, "max_population", p.max_population);
  read_field(obj, path, "min_population", p.min_population);
  read_field(obj, path, "growth_rate", p.growth_rate);
  read_field(obj, path, "fishing_cost", p.fishing_cost);
  read_field(obj, path, "boat_efficiency", p.boat_efficiency);
  read_field(obj, path, "discount", p.discount);
  read_field(obj, path, "horizon", p.horizon);
  read_field(obj, path, "local_actions", p.local_actions);
}

void parse_crosswalk_params(const json& obj, const std::string& path, CrosswalkParams& p) {
  check_keys(obj, path,
             {"actions", "decision_period", "sim_step_train", "sim_step_eval",
              "position_noise_sigma", "velocity_noise_sigma", "ped_desired_speed",
              "ped_noise_train", "ped_noise_eval", "appear_probability", "n_pedestrians",
              "timeout", "discount", "history_length", "crosswalk_x", "ped_y_min",
              "ped_y_max", "ego_start_x", "ego_v_min", "ego_v_max", "goal_x",
              "obstacle_x_min", "obstacle_x_max", "obstacle_y_min", "obstacle_y_max",
              "collision_dx", "collision_dy", "s_absent", "initial_present_probability"});
  read_field(obj, path, "actions", p.actions);
  read_field(obj, path, "decision_period", p.decision_period);
  read_field(obj, path, "sim_step_train", p.sim_step_train);
  read_field(obj, path, "sim_step_eval", p.sim_step_eval);
  read_field(obj, path, "position_noise_sigma", p.position_noise_sigma);
  read_field(obj, path, "velocity_noise_sigma", p.velocity_noise_sigma);
  read_field(obj, path, "ped_desired_speed", p.ped_desired_speed);
  read_field(obj, path, "ped_noise_train", p.ped_noise_train);
  read_field(obj, path, "ped_noise_eval", p.ped_noise_eval);
  read_field(obj, path, "appear_probability", p.appear_probability);
  read_field(obj, path, "n_pedestrians", p.n_pedestrians);
  read_field(obj, path, "timeout", p.timeout);
  read_field(obj, path, "discount", p.discount);
  read_field(obj, path, "history_length", p.history_length);
  read_field(obj, path, "crosswalk_x", p.crosswalk_x);
  read_field(obj, path, "ped_y_min", p.ped_y_min);
  read_field(obj, path, "ped_y_max", p.ped_y_max);
  read_field(obj, path, "ego_start_x", p.ego_start_x);
  read_field(obj, path, "ego_v_min", p.ego_v_min);
  read_field(obj, path, "ego_v_max", p.ego_v_max);
  read_field(obj, path, "goal_x", p.goal_x);
  read_field(obj, path, "obstacle_x_min", p.obstacle_x_min);
  read_field(obj, path, "obstacle_x_max", p.obstacle_x_max);
  read_field(obj, path, "obstacle_y_min", p.obstacle_y_min);
  read_field(obj, path, "obstacle_y_max", p.obstacle_y_max);
  read_field(obj, path, "collision_dx", p.collision_dx);
  read_field(obj, path, "collision_dy", p.collision_dy);
  read_field(obj, path, "s_absent", p.s_absent);
  read_field(obj, path, "initial_present_probability", p.initial_present_probability);
}

bool is_fisheries(EnvKind kind) {
  return kind == EnvKind::Fisheries || kind == EnvKind::FisheriesSingle;
}

// the per-problem hyperparameter tables, then the per-method best
// exploration schedules for the crosswalk
void apply_env_defaults(ExperimentConfig& cfg) {
  if (is_fisheries(cfg.env_kind)) {
    cfg.dqn.hidden_layers = {16};
    cfg.dqn.buffer_capacity = 500'000;
    cfg.dqn.target_update_frequency = 2000;
    cfg.dqn.total_train_steps = 160'000;
    cfg.dqn.exploration_fraction = 0.2;
    cfg.dqn.final_epsilon = 0.05;
    cfg.dqn.discount = cfg.fisheries.discount;
    cfg.budget.low_fidelity_steps = 100'000;
    cfg.budget.correction_steps = 60'000;
  } else {
    cfg.dqn.hidden_layers = {32, 32, 32, 32, 32};
    cfg.dqn.buffer_capacity = 400'000;
    cfg.dqn.target_update_frequency = 5000;
    cfg.dqn.total_train_steps = 1'000'000;
    cfg.dqn.exploration_fraction = 0.5;
    cfg.dqn.final_epsilon = 0.01;
    cfg.dqn.discount = cfg.crosswalk.discount;
    cfg.budget.low_fidelity_steps = 500'000;
    cfg.budget.correction_steps = 500'000;
  }
}

void apply_method_defaults(ExperimentConfig& cfg) {
  if (!is_fisheries(cfg.env_kind) && cfg.method == MethodKind::Correction) {
    if (cfg.rule == FusionRule::MaxMin) {
      cfg.dqn.exploration_fraction = 0.0;
      cfg.dqn.final_epsilon = 0.01;
    } else {
      cfg.dqn.exploration_fraction = 0.2;
      cfg.dqn.final_epsilon = 0.0;
    }
  }
}

void parse_dqn(const json& obj, DqnConfig& dqn) {
  const std::string path = "dqn";
  check_keys(obj, path,
             {"total_train_steps", "buffer_capacity", "target_update_frequency", "discount",
              "learning_rate", "batch_size", "exploration_fraction", "final_epsilon",
              "replay_alpha", "replay_beta", "hidden_layers", "dueling",
              "max_episode_steps", "log_every"});
  read_field(obj, path, "total_train_steps", dqn.total_train_steps);
  read_field(obj, path, "buffer_capacity", dqn.buffer_capacity);
  read_field(obj, path, "target_update_frequency", dqn.target_update_frequency);
  read_field(obj, path, "discount", dqn.discount);
  read_field(obj, path, "learning_rate", dqn.learning_rate);
  read_field(obj, path, "batch_size", dqn.batch_size);
  read_field(obj, path, "exploration_fraction", dqn.exploration_fraction);
  read_field(obj, path, "final_epsilon", dqn.final_epsilon);
  read_field(obj, path, "replay_alpha", dqn.replay_alpha);
  read_field(obj, path, "replay_beta", dqn.replay_beta);
  read_field(obj, path, "hidden_layers", dqn.hidden_layers);
  read_field(obj, path, "dueling", dqn.dueling);
  read_field(obj, path, "max_episode_steps", dqn.max_episode_steps);
  read_field(obj, path, "log_every", dqn.log_every);
}

void validate_semantics(const ExperimentConfig& cfg) {
  const bool fisheries = is_fisheries(cfg.env_kind);
  if (cfg.method == MethodKind::BaselineFixed) {
    const auto& values = fisheries ? cfg.fisheries.local_actions : cfg.crosswalk.actions;
    if (std::find(values.begin(), values.end(), cfg.fixed_action) == values.end()) {
      throw config_error("method.fixed_action is not a member of the environment action set");
    }
  }
  if (cfg.method == MethodKind::Dqn && cfg.env_kind == EnvKind::Fisheries) {
    throw config_error(
        "method dqn cannot enumerate the joint fisheries action space; use decomposed-dqn");
  }
  if (cfg.method == MethodKind::DecomposedDqn && cfg.env_kind != EnvKind::Fisheries) {
    throw config_error("method decomposed-dqn requires environment fisheries");
  }
  if (cfg.method == MethodKind::Fusion || cfg.method == MethodKind::Correction) {
    if (cfg.env_kind != EnvKind::Fisheries && cfg.env_kind != EnvKind::Crosswalk) {
      throw config_error("utility fusion requires a multi-entity environment");
    }
    if (cfg.q_lo_checkpoint.empty() && cfg.budget.low_fidelity_steps <= 0) {
      throw config_error(
          "method '" + std::string(method_kind_name(cfg.method)) +
          "' needs a low-fidelity value function: set method.q_lo_checkpoint or a positive "
          "budget.low_fidelity_steps");
    }
    if (cfg.env_kind == EnvKind::Fisheries && cfg.rule != FusionRule::MaxSum) {
      throw config_error("fisheries fusion combines per-boat values with max-sum");
    }
  }
  if (cfg.method == MethodKind::Correction && cfg.budget.correction_steps <= 0) {
    throw config_error("method correction requires a positive budget.correction_steps");
  }
  if (cfg.seeds.empty()) throw config_error("seeds must not be empty");
  if (cfg.evaluation.n_sims < 1) throw config_error("evaluation.n_sims must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  check_keys(root, "config",
             {"environment", "method", "dqn", "budget", "evaluation", "sweep", "seeds",
              "output_dir"});

  ExperimentConfig cfg;

  if (!root.contains("environment") || !root.at("environment").contains("name")) {
    throw config_error("missing required key 'environment.name'");
  }
  const json& env = root.at("environment");
  check_keys(env, "environment", {"name", "params"});
  cfg.env_kind = env_kind_from_name(env.at("name").get<std::string>());

  if (!root.contains("method") || !root.at("method").contains("name")) {
    throw config_error("missing required key 'method.name'");
  }
  const json& method = root.at("method");
  check_keys(method, "method", {"name", "rule", "fixed_action", "q_lo_checkpoint"});
  cfg.method = method_kind_from_name(method.at("name").get<std::string>());
  if (method.contains("rule")) {
    cfg.rule = fusion_rule_from_name(method.at("rule").get<std::string>());
  }
  read_field(method, "method", "fixed_action", cfg.fixed_action);
  read_field(method, "method", "q_lo_checkpoint", cfg.q_lo_checkpoint);

  if (env.contains("params")) {
    if (is_fisheries(cfg.env_kind)) {
      parse_fisheries_params(env.at("params"), "environment.params", cfg.fisheries);
    } else {
      parse_crosswalk_params(env.at("params"), "environment.params", cfg.crosswalk);
    }
  }

  apply_env_defaults(cfg);
  apply_method_defaults(cfg);

  if (root.contains("dqn")) parse_dqn(root.at("dqn"), cfg.dqn);
  if (root.contains("budget")) {
    check_keys(root.at("budget"), "budget", {"low_fidelity_steps", "correction_steps"});
    read_field(root.at("budget"), "budget", "low_fidelity_steps", cfg.budget.low_fidelity_steps);
    read_field(root.at("budget"), "budget", "correction_steps", cfg.budget.correction_steps);
  }
  if (root.contains("evaluation")) {
    check_keys(root.at("evaluation"), "evaluation", {"n_sims", "seed_base", "eval_every"});
    read_field(root.at("evaluation"), "evaluation", "n_sims", cfg.evaluation.n_sims);
    read_field(root.at("evaluation"), "evaluation", "seed_base", cfg.evaluation.seed_base);
    read_field(root.at("evaluation"), "evaluation", "eval_every", cfg.evaluation.eval_every);
  }
  if (root.contains("sweep")) {
    check_keys(root.at("sweep"), "sweep", {"exploration_fractions", "final_epsilons"});
    read_field(root.at("sweep"), "sweep", "exploration_fractions",
               cfg.sweep.exploration_fractions);
    read_field(root.at("sweep"), "sweep", "final_epsilons", cfg.sweep.final_epsilons);
  }
  read_field(root, "config", "seeds", cfg.seeds);
  read_field(root, "config", "output_dir", cfg.output_dir);

  validate_semantics(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

namespace {

json fisheries_to_json(const FisheriesParams& p) {
  return json{{"n_boats", p.n_boats},
              {"initial_population", p.initial_population},
              {"max_population", p.max_population},
              {"min_population", p.min_population},
              {"growth_rate", p.growth_rate},
              {"fishing_cost", p.fishing_cost},
              {"boat_efficiency", p.boat_efficiency},
              {"discount", p.discount},
              {"horizon", p.horizon},
              {"local_actions", p.local_actions}};
}

json crosswalk_to_json(const CrosswalkParams& p) {
  return json{{"actions", p.actions},
              {"decision_period", p.decision_period},
              {"sim_step_train", p.sim_step_train},
              {"sim_step_eval", p.sim_step_eval},
              {"position_noise_sigma", p.position_noise_sigma},
              {"velocity_noise_sigma", p.velocity_noise_sigma},
              {"ped_desired_speed", p.ped_desired_speed},
              {"ped_noise_train", p.ped_noise_train},
              {"ped_noise_eval", p.ped_noise_eval},
              {"appear_probability", p.appear_probability},
              {"n_pedestrians", p.n_pedestrians},
              {"timeout", p.timeout},
              {"discount", p.discount},
              {"history_length", p.history_length},
              {"crosswalk_x", p.crosswalk_x},
              {"ped_y_min", p.ped_y_min},
              {"ped_y_max", p.ped_y_max},
              {"ego_start_x", p.ego_start_x},
              {"ego_v_min", p.ego_v_min},
              {"ego_v_max", p.ego_v_max},
              {"goal_x", p.goal_x},
              {"obstacle_x_min", p.obstacle_x_min},
              {"obstacle_x_max", p.obstacle_x_max},
              {"obstacle_y_min", p.obstacle_y_min},
              {"obstacle_y_max", p.obstacle_y_max},
              {"collision_dx", p.collision_dx},
              {"collision_dy", p.collision_dy},
              {"s_absent", p.s_absent},
              {"initial_present_probability", p.initial_present_probability}};
}

json config_to_json(const ExperimentConfig& cfg, bool include_output_dir) {
  json root;
  root["environment"] = json{{"name", env_kind_name(cfg.env_kind)},
                             {"params", is_fisheries(cfg.env_kind)
                                            ? fisheries_to_json(cfg.fisheries)
                                            : crosswalk_to_json(cfg.crosswalk)}};
  root["method"] = json{{"name", method_kind_name(cfg.method)},
                        {"rule", fusion_rule_name(cfg.rule)},
                        {"fixed_action", cfg.fixed_action},
                        {"q_lo_checkpoint", cfg.q_lo_checkpoint}};
  root["dqn"] = json{{"total_train_steps", cfg.dqn.total_train_steps},
                     {"buffer_capacity", cfg.dqn.buffer_capacity},
                     {"target_update_frequency", cfg.dqn.target_update_frequency},
                     {"discount", cfg.dqn.discount},
                     {"learning_rate", cfg.dqn.learning_rate},
                     {"batch_size", cfg.dqn.batch_size},
                     {"exploration_fraction", cfg.dqn.exploration_fraction},
                     {"final_epsilon", cfg.dqn.final_epsilon},
                     {"replay_alpha", cfg.dqn.replay_alpha},
                     {"replay_beta", cfg.dqn.replay_beta},
                     {"hidden_layers", cfg.dqn.hidden_layers},
                     {"dueling", cfg.dqn.dueling},
                     {"max_episode_steps", cfg.dqn.max_episode_steps},
                     {"log_every", cfg.dqn.log_every}};
  root["budget"] = json{{"low_fidelity_steps", cfg.budget.low_fidelity_steps},
                        {"correction_steps", cfg.budget.correction_steps}};
  root["evaluation"] = json{{"n_sims", cfg.evaluation.n_sims},
                            {"seed_base", cfg.evaluation.seed_base},
                            {"eval_every", cfg.evaluation.eval_every}};
  root["sweep"] = json{{"exploration_fractions", cfg.sweep.exploration_fractions},
                       {"final_epsilons", cfg.sweep.final_epsilons}};
  root["seeds"] = cfg.seeds;
  if (include_output_dir) root["output_dir"] = cfg.output_dir;
  return root;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg, true).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  return fnv1a64_hex(config_to_json(cfg, false).dump());
}

std::unique_ptr<EnvModel> make_env(const ExperimentConfig& cfg, CrosswalkMode mode) {
  switch (cfg.env_kind) {
    case EnvKind::Fisheries:
      return std::make_unique<FisheriesEnv>(cfg.fisheries);
    case EnvKind::FisheriesSingle:
      return std::make_unique<FisheriesEnv>(single_boat_params(cfg.fisheries));
    case EnvKind::Crosswalk:
      return std::make_unique<CrosswalkEnv>(cfg.crosswalk, mode);
    case EnvKind::CrosswalkSingle:
      return std::make_unique<CrosswalkEnv>(single_pedestrian_params(cfg.crosswalk), mode);
  }
  throw config_error("unreachable environment kind");
}

long default_max_episode_steps(const ExperimentConfig& cfg) {
  if (cfg.env_kind == EnvKind::Fisheries || cfg.env_kind == EnvKind::FisheriesSingle) {
    return cfg.fisheries.horizon + 1;
  }
  return static_cast<long>(std::ceil(cfg.crosswalk.timeout / cfg.crosswalk.decision_period)) + 1;
}

int success_outcome_for(EnvKind kind) {
  switch (kind) {
    case EnvKind::Fisheries:
    case EnvKind::FisheriesSingle:
      return kFisheriesSurvived;
    default:
      return kCrosswalkSuccess;
  }
}

std::vector<StateSlicer> fisheries_entity_slicers(const FisheriesParams& params) {
  std::vector<StateSlicer> slicers(params.n_boats);
  for (int i = 0; i < params.n_boats; ++i) slicers[i].indices = {i};
  return slicers;
}

std::vector<StateSlicer> crosswalk_entity_slicers(const CrosswalkParams& params) {
  // each frame of the stacked observation contributes the ego slots plus the
  // entity's own slots, in the single-pedestrian frame order
  const int frame = 2 + 2 * params.n_pedestrians;
  std::vector<StateSlicer> slicers(params.n_pedestrians);
  for (int i = 0; i < params.n_pedestrians; ++i) {
    for (int f = 0; f < params.history_length; ++f) {
      const int base = f * frame;
      slicers[i].indices.push_back(base + 0);
      slicers[i].indices.push_back(base + 1);
      slicers[i].indices.push_back(base + 2 + 2 * i);
      slicers[i].indices.push_back(base + 3 + 2 * i);
    }
  }
  return slicers;
}

}  // namespace qcor
