#include <algorithm>
#include <cmath>
#include <numbers>

#include "qflab/errors.hpp"
#include "qflab/experiments.hpp"
#include "qflab/spectral.hpp"

namespace qflab::exp {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"attack", "landscape", "train", "spectrum", "bounds", "classical"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& preset_names() {
  static const std::vector<std::pair<std::string, std::string>> p{
      {"fig3", "attack"}, {"fig3-m1", "attack"}, {"fig4", "landscape"}, {"fig7", "landscape"},
      {"fig8", "train"},  {"fig9", "train"},     {"fig10", "train"}};
  return p;
}

namespace {

ordered_json model_defaults(int m) {
  ordered_json j;
  j["n"] = 1;
  j["m"] = m;
  j["layers"] = 0;
  j["gamma"] = 2.0 * std::numbers::pi;
  j["topology"] = "ring";
  return j;
}

std::string preset_experiment(const std::string& preset) {
  for (const auto& [name, e] : preset_names()) {
    if (name == preset) return e;
  }
  throw ConfigError("unknown preset '" + preset + "'");
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Overlays `user` on `base`. Every user key must exist in `base` with a
// compatible JSON type.
void merge_strict(ordered_json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("'" + (path.empty() ? "config" : path) + "' must be a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string here = join_path(path, it.key());
    if (!base.contains(it.key())) throw ConfigError("unknown field '" + here + "'");
    ordered_json& slot = base[it.key()];
    const json& v = it.value();
    if (slot.is_object()) {
      merge_strict(slot, v, here);
      continue;
    }
    bool ok = false;
    if (slot.is_boolean()) ok = v.is_boolean();
    else if (slot.is_number_integer()) ok = v.is_number_integer();
    else if (slot.is_number()) ok = v.is_number();
    else if (slot.is_string()) ok = v.is_string();
    else if (slot.is_array()) ok = v.is_array();
    if (!ok) {
      throw ConfigError("field '" + here + "' has type " + std::string(v.type_name()) + ", expected " +
                        std::string(slot.type_name()));
    }
    slot = v;
  }
}

const ordered_json& at(const ordered_json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError("missing field '" + join_path(path, key) + "'");
  return j.at(key);
}

int get_int(const ordered_json& j, const std::string& key, const std::string& path, long lo, long hi) {
  const auto& v = at(j, key, path);
  if (!v.is_number_integer()) throw ConfigError("field '" + join_path(path, key) + "' must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) {
    throw ConfigError("field '" + join_path(path, key) + "' = " + std::to_string(x) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

double get_double(const ordered_json& j, const std::string& key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_number()) throw ConfigError("field '" + join_path(path, key) + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("field '" + join_path(path, key) + "' must be finite");
  return x;
}

std::vector<int> get_int_list(const ordered_json& j, const std::string& key, const std::string& path, int lo,
                              int hi) {
  const auto& v = at(j, key, path);
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError("field '" + join_path(path, key) + "' must hold integers");
    const long x = e.get<long>();
    if (x < lo || x > hi) {
      throw ConfigError("entry " + std::to_string(x) + " of '" + join_path(path, key) + "' outside [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    out.push_back(static_cast<int>(x));
  }
  if (out.empty()) throw ConfigError("field '" + join_path(path, key) + "' must not be empty");
  return out;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError("field '" + name + "' must be positive");
}

ModelFields parse_model(const ordered_json& j) {
  ModelFields m;
  m.n = get_int(j, "n", "model", 1, 4);
  m.m = get_int(j, "m", "model", 1, 6);
  m.layers = get_int(j, "layers", "model", 0, 100000);
  m.gamma = get_double(j, "gamma", "model");
  require_positive(m.gamma, "model.gamma");
  const std::string topo = at(j, "topology", "model").get<std::string>();
  if (topo == "ring") m.topology = Topology::Ring;
  else if (topo == "chain") m.topology = Topology::Chain;
  else throw ConfigError("field 'model.topology' must be \"ring\" or \"chain\"");
  if (m.n * m.m > 6) throw ConfigError("model has n * m = " + std::to_string(m.n * m.m) + " qubits; at most 6 supported");
  m.spec().validate();
  return m;
}

}  // namespace

ordered_json default_config(const std::string& experiment, const std::string& preset, bool quick) {
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) == experiment_names().end()) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  if (!preset.empty() && preset_experiment(preset) != experiment) {
    throw ConfigError("preset '" + preset + "' belongs to experiment '" + preset_experiment(preset) + "'");
  }
  ordered_json j;
  j["experiment"] = experiment;
  j["preset"] = preset;
  j["quick"] = quick;
  j["seed"] = 42;
  j["output_dir"] = "qflab-out/" + (preset.empty() ? experiment : preset) + (quick ? "-quick" : "");

  if (experiment == "attack") {
    j["model"] = model_defaults(preset == "fig3-m1" ? 1 : 3);
    ordered_json a;
    a["experiments"] = quick ? 10 : 100;
    a["attempts"] = quick ? 5 : 10;
    a["iterations"] = 60;
    a["learning_rate"] = 0.01;
    a["beta1"] = 0.9;
    a["beta2"] = 0.999;
    a["epsilon"] = 1e-8;
    a["epsilon_points"] = 64;
    a["histogram_bins"] = 20;
    j["attack"] = a;
  } else if (experiment == "landscape") {
    ordered_json l;
    l["m_values"] = quick ? std::vector<int>{1, 2, 3} : std::vector<int>{1, 2, 3, 4};
    l["seeds"] = quick ? 3 : 10;
    l["resolution_multiplier"] = 10.0;
    l["bins"] = 20;
    l["topology"] = "ring";
    j["landscape"] = l;
  } else if (experiment == "train") {
    const int m = (preset == "fig8" || preset == "fig10") ? 4 : 2;
    j["model"] = model_defaults(m);
    ordered_json t;
    t["clients"] = 2;
    t["grid_points"] = 50;
    t["batch_size"] = 10;
    t["learning_rate"] = 0.01;
    t["epochs"] = quick ? (m == 4 ? 50 : 100) : 400;
    t["optimizer"] = "adam";
    t["target"] = preset == "fig8" ? "line" : "cosine_0p7";
    t["table"] = json::array();
    t["snapshot_epochs"] = quick ? std::vector<int>{0, 20} : std::vector<int>{0, 20, 100, 400};
    t["track_landscape"] = true;
    t["tracked_angle"] = 1.6371;
    t["gradient_index"] = -1;
    t["write_rounds"] = false;
    t["prediction_points"] = 200;
    t["check_mse"] = m == 4 ? 5e-2 : 1e-2;
    t["check_min_nc_ratio"] = preset == "fig10" ? 0.5 : 0.0;
    j["train"] = t;
  } else if (experiment == "spectrum") {
    ordered_json s;
    s["n"] = 1;
    s["m_values"] = quick ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3};
    s["seeds"] = quick ? 3 : 10;
    j["spectrum"] = s;
  } else if (experiment == "bounds") {
    ordered_json b;
    b["n_values"] = std::vector<int>{1, 2};
    b["m_values"] = std::vector<int>{1, 2, 3, 4, 5, 6};
    j["bounds"] = b;
  } else {
    ordered_json c;
    c["n"] = 10;
    c["classes"] = 5;
    c["instances"] = quick ? 10 : 100;
    j["classical"] = c;
  }
  return j;
}

ExperimentConfig resolve_config(const std::string& subcommand, const std::optional<json>& file,
                                const CliOverrides& cli) {
  std::string preset = cli.preset.value_or("");
  bool quick = cli.quick;
  if (file) {
    if (!file->is_object()) throw ConfigError("config must be a JSON object");
    if (!file->contains("experiment")) throw ConfigError("missing required field 'experiment'");
    const auto& e = file->at("experiment");
    if (!e.is_string()) throw ConfigError("field 'experiment' must be a string");
    if (e.get<std::string>() != subcommand) {
      throw ConfigError("config is for experiment '" + e.get<std::string>() + "', not '" + subcommand + "'");
    }
    if (!cli.preset && file->contains("preset")) {
      if (!file->at("preset").is_string()) throw ConfigError("field 'preset' must be a string");
      preset = file->at("preset").get<std::string>();
    }
    if (file->contains("quick")) {
      if (!file->at("quick").is_boolean()) throw ConfigError("field 'quick' must be a boolean");
      quick = quick || file->at("quick").get<bool>();
    }
  }

  ordered_json r = default_config(subcommand, preset, quick);
  if (file) merge_strict(r, *file, "");
  r["preset"] = preset;
  r["quick"] = quick;
  if (cli.seed) r["seed"] = *cli.seed;
  if (cli.out) r["output_dir"] = *cli.out;

  ExperimentConfig c;
  c.experiment = subcommand;
  c.preset = preset;
  c.quick = quick;
  const auto& seed = r.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ConfigError("field 'seed' must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.output_dir = r.at("output_dir").get<std::string>();
  if (c.output_dir.empty()) throw ConfigError("field 'output_dir' must not be empty");

  if (subcommand == "attack") {
    c.model = parse_model(r.at("model"));
    const auto& a = r.at("attack");
    auto& ac = c.attack.attack;
    ac.experiments = get_int(a, "experiments", "attack", 1, 1000000);
    ac.attempts = get_int(a, "attempts", "attack", 1, 1000000);
    ac.iterations = get_int(a, "iterations", "attack", 1, 1000000);
    ac.adam.learning_rate = get_double(a, "learning_rate", "attack");
    ac.adam.beta1 = get_double(a, "beta1", "attack");
    ac.adam.beta2 = get_double(a, "beta2", "attack");
    ac.adam.epsilon = get_double(a, "epsilon", "attack");
    if (!(ac.adam.beta1 >= 0.0 && ac.adam.beta1 < 1.0 && ac.adam.beta2 >= 0.0 && ac.adam.beta2 < 1.0)) {
      throw ConfigError("attack betas must lie in [0, 1)");
    }
    require_positive(ac.adam.epsilon, "attack.epsilon");
    const int pts = get_int(a, "epsilon_points", "attack", 2, 100000);
    ac.epsilons.clear();
    for (int i = 1; i <= pts; ++i) ac.epsilons.push_back(std::numbers::pi * i / pts);
    c.attack.histogram_bins = get_int(a, "histogram_bins", "attack", 1, 100000);
    ac.validate();
  } else if (subcommand == "landscape") {
    const auto& l = r.at("landscape");
    c.landscape.m_values = get_int_list(l, "m_values", "landscape", 1, 5);
    c.landscape.seeds = get_int(l, "seeds", "landscape", 1, 100000);
    c.landscape.resolution_multiplier = get_double(l, "resolution_multiplier", "landscape");
    if (c.landscape.resolution_multiplier < 10.0) {
      throw ConfigError("field 'landscape.resolution_multiplier' must be >= 10");
    }
    c.landscape.bins = get_int(l, "bins", "landscape", 1, 100000);
    const std::string topo = at(l, "topology", "landscape").get<std::string>();
    if (topo != "ring" && topo != "chain") throw ConfigError("field 'landscape.topology' must be \"ring\" or \"chain\"");
    c.model.topology = topo == "ring" ? Topology::Ring : Topology::Chain;
  } else if (subcommand == "train") {
    c.model = parse_model(r.at("model"));
    if (c.model.n != 1) throw ConfigError("training targets are univariate; model.n must be 1");
    const auto& t = r.at("train");
    auto& tf = c.train;
    tf.clients = get_int(t, "clients", "train", 1, 1000);
    tf.grid_points = get_int(t, "grid_points", "train", 1, 1000000);
    tf.batch_size = get_int(t, "batch_size", "train", 1, 1000000);
    tf.learning_rate = get_double(t, "learning_rate", "train");
    require_positive(tf.learning_rate, "train.learning_rate");
    tf.epochs = get_int(t, "epochs", "train", 0, 1000000);
    const std::string opt = at(t, "optimizer", "train").get<std::string>();
    if (opt == "adam") tf.optimizer = ServerOptimizer::Adam;
    else if (opt == "sgd") tf.optimizer = ServerOptimizer::Sgd;
    else throw ConfigError("field 'train.optimizer' must be \"adam\" or \"sgd\"");
    tf.target = at(t, "target", "train").get<std::string>();
    if (tf.target != "line" && tf.target != "cosine_0p7" && tf.target != "custom") {
      throw ConfigError("field 'train.target' must be \"line\", \"cosine_0p7\" or \"custom\"");
    }
    for (const auto& row : at(t, "table", "train")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        throw ConfigError("field 'train.table' must hold [x, y] number pairs");
      }
      tf.table.push_back(Sample{{row[0].get<double>()}, row[1].get<double>()});
    }
    if (tf.target == "custom") {
      if (tf.table.size() < static_cast<std::size_t>(tf.clients)) {
        throw ConfigError("custom target table needs at least one sample per client");
      }
    } else if (!tf.table.empty()) {
      throw ConfigError("field 'train.table' is only used with target \"custom\"");
    } else if (tf.grid_points < tf.clients) {
      throw ConfigError("train.grid_points must be >= train.clients");
    }
    const std::size_t total = tf.target == "custom" ? tf.table.size() : static_cast<std::size_t>(tf.grid_points);
    const std::size_t smallest = total / static_cast<std::size_t>(tf.clients);
    if (static_cast<std::size_t>(tf.batch_size) > smallest) {
      throw ConfigError("train.batch_size exceeds the smallest client dataset (" + std::to_string(smallest) + ")");
    }
    std::vector<int> snaps;
    for (const auto& e : at(t, "snapshot_epochs", "train")) {
      if (!e.is_number_integer() || e.get<long>() < 0) throw ConfigError("train.snapshot_epochs must hold non-negative integers");
      snaps.push_back(e.get<int>());
    }
    // Entries beyond the run are ignored; the start and end are always kept.
    snaps.push_back(0);
    snaps.push_back(tf.epochs);
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    snaps.erase(std::remove_if(snaps.begin(), snaps.end(), [&](int e) { return e > tf.epochs; }), snaps.end());
    tf.snapshot_epochs = snaps;
    tf.track_landscape = at(t, "track_landscape", "train").get<bool>();
    tf.tracked_angle = get_double(t, "tracked_angle", "train");
    tf.gradient_index = get_int(t, "gradient_index", "train", -1, 10000000);
    if (tf.gradient_index >= static_cast<int>(c.model.spec().param_count())) {
      throw ConfigError("train.gradient_index exceeds the parameter count");
    }
    tf.write_rounds = at(t, "write_rounds", "train").get<bool>();
    tf.prediction_points = get_int(t, "prediction_points", "train", 2, 1000000);
    tf.check_mse = get_double(t, "check_mse", "train");
    tf.check_min_nc_ratio = get_double(t, "check_min_nc_ratio", "train");
  } else if (subcommand == "spectrum") {
    const auto& s = r.at("spectrum");
    c.spectrum.n = get_int(s, "n", "spectrum", 1, 2);
    c.spectrum.m_values = get_int_list(s, "m_values", "spectrum", 1, c.spectrum.n == 1 ? 3 : 2);
    c.spectrum.seeds = get_int(s, "seeds", "spectrum", 1, 100000);
  } else if (subcommand == "bounds") {
    const auto& b = r.at("bounds");
    c.bounds.n_values = get_int_list(b, "n_values", "bounds", 1, 4);
    c.bounds.m_values = get_int_list(b, "m_values", "bounds", 1, 12);
    for (int n : c.bounds.n_values) {
      for (int m : c.bounds.m_values) bounds_row(n, m);  // surfaces overflow before any output exists
    }
  } else {
    const auto& cl = r.at("classical");
    c.classical.n = get_int(cl, "n", "classical", 1, 100000);
    c.classical.classes = get_int(cl, "classes", "classical", 2, 100000);
    c.classical.instances = get_int(cl, "instances", "classical", 1, 10000000);
  }
  c.resolved = std::move(r);
  return c;
}

double target_value(const TrainFields& t, double x, double gamma) {
  if (t.target == "cosine_0p7") return 0.7 * std::cos(gamma * x);
  if (t.target == "line") return 1.4 * x - 0.7;
  throw ConfigError("target '" + t.target + "' has no closed form");
}

}  // namespace qflab::exp
