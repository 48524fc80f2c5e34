#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qcor/commands.hpp"
#include "qcor/config.hpp"
#include "qcor/util.hpp"

using namespace qcor;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qcor_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path path = dir / name;
  write_text_file(path, text);
  return path;
}

// tiny but complete fisheries-single training config
std::string tiny_dqn_config(const std::string& out) {
  return R"({
  "environment": {"name": "fisheries-single"},
  "method": {"name": "dqn"},
  "dqn": {"total_train_steps": 600, "buffer_capacity": 2000, "batch_size": 16,
          "learning_rate": 0.001, "target_update_frequency": 100, "hidden_layers": [8]},
  "evaluation": {"n_sims": 5, "seed_base": 77},
  "seeds": [3],
  "output_dir": ")" + out + R"("
})";
}

bool same_file_bytes(const fs::path& a, const fs::path& b) {
  return read_text_file(a) == read_text_file(b);
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), root));
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("config round-trip: parse, serialize, parse is the identity") {
  const std::string text = R"({
    "environment": {"name": "crosswalk", "params": {"n_pedestrians": 6, "timeout": 14.0}},
    "method": {"name": "correction", "rule": "max-min"},
    "dqn": {"total_train_steps": 1234, "hidden_layers": [8, 8], "final_epsilon": 0.02},
    "budget": {"low_fidelity_steps": 500, "correction_steps": 700},
    "seeds": [1, 2],
    "output_dir": "somewhere"
  })";
  const ExperimentConfig parsed = parse_config(text);
  const std::string canonical = serialize_config(parsed);
  const ExperimentConfig reparsed = parse_config(canonical);
  CHECK(serialize_config(reparsed) == canonical);
  CHECK(config_hash(reparsed) == config_hash(parsed));
  CHECK(parsed.crosswalk.n_pedestrians == 6);
  CHECK(parsed.dqn.final_epsilon == 0.02);
  CHECK(parsed.rule == FusionRule::MaxMin);
}

TEST_CASE("unknown keys are rejected with the offending path") {
  const std::string text = R"({
    "environment": {"name": "fisheries", "params": {"n_boats": 4, "wrong_key": 1}},
    "method": {"name": "baseline-random"}
  })";
  CHECK_THROWS_WITH_AS(parse_config(text),
                       doctest::Contains("environment.params.wrong_key"), config_error);
}

TEST_CASE("method defaults depend on the environment tables") {
  const ExperimentConfig fish = parse_config(
      R"({"environment": {"name": "fisheries"}, "method": {"name": "decomposed-dqn"}})");
  CHECK(fish.dqn.hidden_layers == std::vector<int>{16});
  CHECK(fish.dqn.buffer_capacity == 500'000);
  CHECK(fish.dqn.target_update_frequency == 2000);
  CHECK(fish.dqn.learning_rate == 1e-4);
  CHECK(fish.dqn.replay_alpha == 0.7);
  CHECK(fish.dqn.replay_beta == 1e-3);

  const ExperimentConfig cross = parse_config(
      R"({"environment": {"name": "crosswalk"}, "method": {"name": "dqn"}})");
  CHECK(cross.dqn.hidden_layers == std::vector<int>{32, 32, 32, 32, 32});
  CHECK(cross.dqn.buffer_capacity == 400'000);
  CHECK(cross.dqn.target_update_frequency == 5000);

  const ExperimentConfig corr = parse_config(
      R"({"environment": {"name": "crosswalk"},
          "method": {"name": "correction", "rule": "max-min"}})");
  CHECK(corr.dqn.exploration_fraction == 0.0);
  CHECK(corr.dqn.final_epsilon == 0.01);
}

TEST_CASE("correction without any q_lo source names the missing keys") {
  const std::string text = R"({
    "environment": {"name": "crosswalk"},
    "method": {"name": "correction", "rule": "max-min"},
    "budget": {"low_fidelity_steps": 0, "correction_steps": 100}
  })";
  CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("q_lo_checkpoint"), config_error);
}

TEST_CASE("config hash ignores the output directory") {
  ExperimentConfig a = parse_config(tiny_dqn_config("one"));
  ExperimentConfig b = parse_config(tiny_dqn_config("two"));
  CHECK(config_hash(a) == config_hash(b));
  b.dqn.learning_rate = 0.5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("training a baseline is a config error (exit 2)") {
  const fs::path dir = fresh_dir("baseline_train");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "fisheries"},
    "method": {"name": "baseline-fixed", "fixed_action": 0.1},
    "output_dir": "out"
  })");
  CHECK(cmd_train(cfg, (dir / "out").string()) == kExitConfig);
}

TEST_CASE("malformed config file gives exit 2") {
  const fs::path dir = fresh_dir("malformed");
  const fs::path cfg = write_config(dir, "cfg.json", "{ not json");
  CHECK(cmd_train(cfg, (dir / "out").string()) == kExitConfig);
}

TEST_CASE("train then evaluate produces reports; rerun is byte-identical") {
  const fs::path dir = fresh_dir("train_eval");
  const fs::path cfg = write_config(dir, "cfg.json", tiny_dqn_config("unused"));

  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  REQUIRE(cmd_train(cfg, out_a.string()) == kExitOk);
  REQUIRE(cmd_train(cfg, out_b.string()) == kExitOk);

  const auto files_a = files_under(out_a);
  const auto files_b = files_under(out_b);
  REQUIRE(files_a == files_b);
  REQUIRE(!files_a.empty());
  for (const fs::path& rel : files_a) {
    CHECK_MESSAGE(same_file_bytes(out_a / rel, out_b / rel), rel.string());
  }

  // evaluation against the trained checkpoint, twice
  const fs::path eval_a = dir / "eval_a";
  const fs::path eval_b = dir / "eval_b";
  REQUIRE(cmd_evaluate(cfg, (out_a / "seed_3").string(), eval_a.string()) == kExitOk);
  REQUIRE(cmd_evaluate(cfg, (out_b / "seed_3").string(), eval_b.string()) == kExitOk);
  CHECK(same_file_bytes(eval_a / "eval_report.csv", eval_b / "eval_report.csv"));
  CHECK(same_file_bytes(eval_a / "eval_episodes.csv", eval_b / "eval_episodes.csv"));
  CHECK(fs::exists(out_a / "seed_3" / "manifest.json"));
  CHECK(fs::exists(out_a / "seed_3" / "policy.net"));
  CHECK(fs::exists(out_a / "seed_3" / "train_log.csv"));
}

TEST_CASE("baseline evaluation needs no checkpoint") {
  const fs::path dir = fresh_dir("baseline_eval");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "fisheries"},
    "method": {"name": "baseline-fixed", "fixed_action": 0.1},
    "evaluation": {"n_sims": 8, "seed_base": 5},
    "output_dir": "out"
  })");
  const fs::path out = dir / "out";
  REQUIRE(cmd_evaluate(cfg, "", out.string()) == kExitOk);
  const std::string report = read_text_file(out / "eval_report.csv");
  CHECK(report.find("pct_survived") != std::string::npos);
}

TEST_CASE("evaluating a mismatched checkpoint is a config error") {
  const fs::path dir = fresh_dir("mismatch");
  const fs::path cfg = write_config(dir, "cfg.json", tiny_dqn_config("unused"));
  const fs::path out = dir / "out";
  REQUIRE(cmd_train(cfg, out.string()) == kExitOk);

  // same checkpoint, but the config now asks for the 10-boat environment
  const fs::path cfg2 = write_config(dir, "cfg2.json", R"({
    "environment": {"name": "fisheries"},
    "method": {"name": "decomposed-dqn"},
    "evaluation": {"n_sims": 4},
    "output_dir": "out2"
  })");
  CHECK(cmd_evaluate(cfg2, (out / "seed_3").string(), (dir / "out2").string()) == kExitConfig);
}

TEST_CASE("slice requires a crosswalk environment") {
  const fs::path dir = fresh_dir("slice_env");
  const fs::path cfg = write_config(dir, "cfg.json", tiny_dqn_config("unused"));
  CHECK(cmd_slice(cfg, "", (dir / "out").string()) == kExitConfig);
}

TEST_CASE("slice of a baseline policy writes the grid with the action legend") {
  const fs::path dir = fresh_dir("slice_baseline");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "crosswalk-single"},
    "method": {"name": "baseline-fixed", "fixed_action": 2.0},
    "output_dir": "out"
  })");
  const fs::path out = dir / "out";
  REQUIRE(cmd_slice(cfg, "", out.string(), 9, 5) == kExitOk);
  const std::string grid = read_text_file(out / "slice.csv");
  CHECK(grid.find("# action legend (m/s^2): 0=-4 1=-2 2=0 3=2") != std::string::npos);
  CHECK(grid.find("ego_x\\ped_y") != std::string::npos);
}

TEST_CASE("fisheries correction trains a delta per boat end to end") {
  const fs::path dir = fresh_dir("fish_corr");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "fisheries",
                    "params": {"n_boats": 3, "horizon": 12, "initial_population": 45000,
                               "max_population": 90000}},
    "method": {"name": "correction", "rule": "max-sum"},
    "dqn": {"buffer_capacity": 4000, "batch_size": 8, "learning_rate": 0.001,
            "target_update_frequency": 50, "hidden_layers": [8]},
    "budget": {"low_fidelity_steps": 300, "correction_steps": 300},
    "evaluation": {"n_sims": 4, "seed_base": 9},
    "seeds": [1],
    "output_dir": "out"
  })");
  const fs::path out = dir / "out";
  REQUIRE(cmd_train(cfg, out.string()) == kExitOk);
  CHECK(fs::exists(out / "seed_1" / "q_lo.net"));
  CHECK(fs::exists(out / "seed_1" / "delta_0.net"));
  CHECK(fs::exists(out / "seed_1" / "delta_2.net"));
  REQUIRE(cmd_evaluate(cfg, (out / "seed_1").string(), (dir / "eval").string()) == kExitOk);
}

TEST_CASE("crosswalk fusion and correction train end to end at toy scale") {
  const fs::path dir = fresh_dir("cross_corr");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "crosswalk", "params": {"n_pedestrians": 2, "timeout": 6.0}},
    "method": {"name": "correction", "rule": "max-min"},
    "dqn": {"buffer_capacity": 2000, "batch_size": 8, "learning_rate": 0.001,
            "target_update_frequency": 50, "hidden_layers": [8]},
    "budget": {"low_fidelity_steps": 250, "correction_steps": 250},
    "evaluation": {"n_sims": 4, "seed_base": 11},
    "seeds": [2],
    "output_dir": "out"
  })");
  const fs::path out = dir / "out";
  REQUIRE(cmd_train(cfg, out.string()) == kExitOk);
  CHECK(fs::exists(out / "seed_2" / "q_lo.net"));
  CHECK(fs::exists(out / "seed_2" / "delta.net"));
  REQUIRE(cmd_evaluate(cfg, (out / "seed_2").string(), (dir / "eval").string()) == kExitOk);
  REQUIRE(cmd_slice(cfg, (out / "seed_2").string(), (dir / "slice").string(), 7, 5) == kExitOk);
  CHECK(fs::exists(dir / "slice" / "slice.csv"));
}

TEST_CASE("manifest records the q_lo reference with its content hash") {
  const fs::path dir = fresh_dir("manifest");
  const fs::path cfg = write_config(dir, "cfg.json", R"({
    "environment": {"name": "crosswalk", "params": {"n_pedestrians": 2, "timeout": 5.0}},
    "method": {"name": "fusion", "rule": "max-min"},
    "dqn": {"buffer_capacity": 1000, "batch_size": 8, "learning_rate": 0.001,
            "target_update_frequency": 50, "hidden_layers": [8]},
    "budget": {"low_fidelity_steps": 200},
    "evaluation": {"n_sims": 3, "seed_base": 13},
    "seeds": [4],
    "output_dir": "out"
  })");
  const fs::path out = dir / "out";
  REQUIRE(cmd_train(cfg, out.string()) == kExitOk);
  const std::string manifest = read_text_file(out / "seed_4" / "manifest.json");
  CHECK(manifest.find("q_lo_reference") != std::string::npos);
  const std::string expected_hash = hash_file_hex(out / "seed_4" / "q_lo.net");
  CHECK(manifest.find(expected_hash) != std::string::npos);

  // tampering with the checkpoint file breaks the load
  write_text_file(out / "seed_4" / "q_lo.net", "tampered");
  CHECK(cmd_evaluate(cfg, (out / "seed_4").string(), (dir / "eval").string()) == kExitConfig);
}
