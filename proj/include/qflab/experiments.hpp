#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qflab/attack.hpp"
#include "qflab/fedsim.hpp"
#include "qflab/qmodel.hpp"

namespace qflab::exp {

inline constexpr int kArtifactVersion = 1;

struct ModelFields {
  int n = 1;
  int m = 3;
  int layers = 0;  // 0: smallest overparameterized depth
  double gamma = 2.0 * std::numbers::pi;
  Topology topology = Topology::Ring;

  ModelSpec spec() const { return make_model(n, m, layers, topology, gamma); }
};

struct AttackFields {
  AttackConfig attack;
  int histogram_bins = 20;
};

struct LandscapeFields {
  std::vector<int> m_values;
  int seeds = 10;
  double resolution_multiplier = 10.0;
  int bins = 20;
};

struct TrainFields {
  int clients = 2;
  int grid_points = 50;
  int batch_size = 10;
  double learning_rate = 0.01;
  int epochs = 400;
  ServerOptimizer optimizer = ServerOptimizer::Adam;
  std::string target = "cosine_0p7";
  std::vector<Sample> table;  // used when target == "custom"
  std::vector<int> snapshot_epochs;
  bool track_landscape = true;
  double tracked_angle = 1.6371;  // gamma * x of the tracked client sample
  int gradient_index = -1;        // -1: seeded random index
  bool write_rounds = false;
  int prediction_points = 200;
  double check_mse = 1e-2;
  double check_min_nc_ratio = 0.0;  // 0 disables the landscape check
};

struct SpectrumFields {
  int n = 1;
  std::vector<int> m_values;
  int seeds = 10;
};

struct BoundsFields {
  std::vector<int> n_values;
  std::vector<int> m_values;
};

struct ClassicalFields {
  int n = 10;
  int classes = 5;
  int instances = 100;
};

struct ExperimentConfig {
  std::string experiment;
  std::string preset;
  bool quick = false;
  std::uint64_t seed = 42;
  std::string output_dir;
  ModelFields model;
  AttackFields attack;
  LandscapeFields landscape;
  TrainFields train;
  SpectrumFields spectrum;
  BoundsFields bounds;
  ClassicalFields classical;
  nlohmann::ordered_json resolved;  // echoed into the manifest
};

struct CliOverrides {
  std::optional<std::string> preset;
  bool quick = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

// Experiments accepted on the command line.
const std::vector<std::string>& experiment_names();
// Named presets and the experiment each belongs to.
const std::vector<std::pair<std::string, std::string>>& preset_names();

// Defaults for an experiment, optionally specialised by a preset and --quick.
nlohmann::ordered_json default_config(const std::string& experiment, const std::string& preset, bool quick);

// Merges the user file over the defaults, rejecting unknown fields and type
// mismatches, then applies command-line overrides. Throws ConfigError.
ExperimentConfig resolve_config(const std::string& subcommand, const std::optional<nlohmann::json>& file,
                                const CliOverrides& cli);

// Target function used for training data.
double target_value(const TrainFields& t, double x, double gamma);

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", "<=", ">", ">=", "in"
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct RunResult {
  std::string status = "ok";
  std::vector<Check> checks;
  std::vector<std::string> files;
  std::vector<std::string> log;  // human-readable summary lines

  bool all_pass() const;
};

// Runs the configured experiment and writes its artifacts plus manifest.json
// into cfg.output_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace qflab::exp
