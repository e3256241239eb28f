#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qflab/errors.hpp"
#include "qflab/experiments.hpp"

using namespace qflab;
using namespace qflab::exp;
using nlohmann::json;

namespace {

ExperimentConfig resolve(const std::string& sub, const std::string& text, CliOverrides cli = {}) {
  return resolve_config(sub, json::parse(text), cli);
}

}  // namespace

TEST(Config, DefaultsPerExperiment) {
  for (const auto& e : experiment_names()) {
    const auto c = resolve_config(e, std::nullopt, {});
    EXPECT_EQ(c.experiment, e);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.output_dir, "qflab-out/" + e);
    EXPECT_EQ(c.resolved.at("experiment"), e);
  }
  EXPECT_THROW(default_config("nope", "", false), ConfigError);
}

TEST(Config, PresetsResolve) {
  for (const auto& [preset, experiment] : preset_names()) {
    CliOverrides cli;
    cli.preset = preset;
    cli.quick = true;
    const auto c = resolve_config(experiment, std::nullopt, cli);
    EXPECT_EQ(c.preset, preset);
    EXPECT_TRUE(c.quick);
    EXPECT_EQ(c.output_dir, "qflab-out/" + preset + "-quick");
  }
  CliOverrides cli;
  cli.preset = "fig3";
  const auto a = resolve_config("attack", std::nullopt, cli);
  EXPECT_EQ(a.model.m, 3);
  EXPECT_EQ(a.attack.attack.experiments, 100);
  EXPECT_EQ(a.attack.attack.attempts, 10);
  cli.preset = "fig3-m1";
  EXPECT_EQ(resolve_config("attack", std::nullopt, cli).model.m, 1);
  cli.preset = "fig10";
  const auto t = resolve_config("train", std::nullopt, cli);
  EXPECT_EQ(t.model.m, 4);
  EXPECT_EQ(t.train.epochs, 400);
  EXPECT_DOUBLE_EQ(t.train.check_min_nc_ratio, 0.5);
}

TEST(Config, PresetMismatch) {
  CliOverrides cli;
  cli.preset = "fig4";
  EXPECT_THROW(resolve_config("attack", std::nullopt, cli), ConfigError);
  cli.preset = "fig99";
  EXPECT_THROW(resolve_config("attack", std::nullopt, cli), ConfigError);
}

TEST(Config, FileMustNameExperiment) {
  EXPECT_THROW(resolve("attack", R"({"seed": 1})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"({"experiment": "train"})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"([1, 2])"), ConfigError);
  EXPECT_NO_THROW(resolve("attack", R"({"experiment": "attack"})"));
}

TEST(Config, UnknownFieldRejected) {
  try {
    resolve("attack", R"({"experiment": "attack", "attack": {"iterationz": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("attack.iterationz"), std::string::npos);
  }
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "landscape": {}})"), ConfigError);
}

TEST(Config, TypeMismatchRejected) {
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "attack": {"iterations": "60"}})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "attack": {"iterations": 2.5}})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "model": 3})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "seed": -1})"), ConfigError);
  // Integers are accepted where a real number is expected.
  EXPECT_NO_THROW(resolve("attack", R"({"experiment": "attack", "attack": {"learning_rate": 1}})"));
}

TEST(Config, RangeValidation) {
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "attack": {"iterations": 0}})"), ConfigError);
  EXPECT_THROW(resolve("attack", R"({"experiment": "attack", "model": {"n": 3, "m": 3}})"), ConfigError);
  EXPECT_THROW(resolve("landscape", R"({"experiment": "landscape", "landscape": {"resolution_multiplier": 5.0}})"),
               ConfigError);
  EXPECT_THROW(resolve("spectrum", R"({"experiment": "spectrum", "spectrum": {"m_values": [4]}})"), ConfigError);
  EXPECT_THROW(resolve("classical", R"({"experiment": "classical", "classical": {"classes": 1}})"), ConfigError);
  EXPECT_THROW(resolve("train", R"({"experiment": "train", "train": {"batch_size": 26}})"), ConfigError);
  EXPECT_THROW(resolve("train", R"({"experiment": "train", "train": {"epochs": -1}})"), ConfigError);
}

TEST(Config, CliOverridesWin) {
  CliOverrides cli;
  cli.seed = 7;
  cli.out = "elsewhere";
  const auto c = resolve("bounds", R"({"experiment": "bounds", "seed": 3, "output_dir": "x"})", cli);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.resolved.at("seed"), 7);
  const auto f = resolve("bounds", R"({"experiment": "bounds", "seed": 3})");
  EXPECT_EQ(f.seed, 3u);
}

TEST(Config, QuickFromFile) {
  const auto c = resolve("attack", R"({"experiment": "attack", "quick": true})");
  EXPECT_TRUE(c.quick);
  EXPECT_EQ(c.attack.attack.experiments, 10);
  const auto o = resolve("attack", R"({"experiment": "attack", "quick": true, "attack": {"experiments": 3}})");
  EXPECT_EQ(o.attack.attack.experiments, 3);
}

TEST(Config, SnapshotEpochRules) {
  const auto c = resolve("train", R"({"experiment": "train", "train": {"epochs": 30, "snapshot_epochs": [50, 10, 10]}})");
  EXPECT_EQ(c.train.snapshot_epochs, (std::vector<int>{0, 10, 30}));
  EXPECT_THROW(resolve("train", R"({"experiment": "train", "train": {"snapshot_epochs": [-2]}})"), ConfigError);
}

TEST(Config, Targets) {
  auto c = resolve_config("train", std::nullopt, {});
  const double g = c.model.gamma;
  c.train.target = "cosine_0p7";
  EXPECT_NEAR(target_value(c.train, 0.25, g), 0.7 * std::cos(g * 0.25), 1e-15);
  c.train.target = "line";
  EXPECT_NEAR(target_value(c.train, 0.5, g), 0.0, 1e-15);
  const auto t = resolve("train", R"({"experiment": "train", "train": {"target": "custom", "batch_size": 1, "table": [[0.0, 0.1], [0.5, -0.2]]}})");
  EXPECT_EQ(t.train.table.size(), 2u);
  EXPECT_THROW(resolve("train", R"({"experiment": "train", "train": {"target": "sine"}})"), ConfigError);
}
