// qflab: experiment runner.
//
//   qflab <attack|landscape|train|spectrum|bounds|classical>
//         [--config file.json] [--preset name] [--quick] [--check] [--out dir] [--seed N]
//
// Exit codes: 0 success, 1 runtime failure or divergence, 2 configuration
// error, 3 a --check threshold failed.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qflab/errors.hpp"
#include "qflab/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  bool quick = false;
  bool check = false;
  std::string out;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Options& o, CLI::Option*& seed_opt) {
  sub->add_option("--config", o.config, "JSON experiment config");
  sub->add_option("--preset", o.preset, "named preset (fig3, fig3-m1, fig4, fig7, fig8, fig9, fig10)");
  sub->add_flag("--quick", o.quick, "scaled-down variant of the preset");
  sub->add_flag("--check", o.check, "exit 3 when an acceptance threshold fails");
  sub->add_option("--out", o.out, "output directory");
  seed_opt = sub->add_option("--seed", o.seed, "master seed");
}

int run(const std::string& subcommand, const Options& o, bool seed_given) {
  using namespace qflab;
  std::optional<nlohmann::json> file;
  exp::CliOverrides cli;
  exp::ExperimentConfig cfg;
  try {
    if (!o.config.empty()) {
      std::ifstream in(o.config);
      if (!in) throw ConfigError("cannot open config file '" + o.config + "'");
      try {
        file = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    if (!o.preset.empty()) cli.preset = o.preset;
    cli.quick = o.quick;
    if (seed_given) cli.seed = o.seed;
    if (!o.out.empty()) cli.out = o.out;
    cfg = exp::resolve_config(subcommand, file, cli);
  } catch (const ConfigError& e) {
    std::cerr << "qflab: config error: " << e.what() << "\n";
    return 2;
  }

  exp::RunResult res;
  try {
    res = exp::run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "qflab: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qflab: " << e.what() << "\n";
    return 1;
  }
  for (const auto& l : res.log) std::cout << l << "\n";
  for (const auto& c : res.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << "\n";
  }
  std::cout << "artifacts: " << cfg.output_dir << " (" << res.files.size() << " files)\n";
  if (res.status != "ok") {
    std::cerr << "qflab: run " << res.status << "; artifacts are partial\n";
    return 1;
  }
  if (o.check && !res.all_pass()) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qflab: privacy experiments for federated variational quantum models"};
  app.require_subcommand(1);
  Options opts;
  std::vector<std::pair<CLI::App*, CLI::Option*>> subs;
  for (const auto& name : qflab::exp::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    CLI::Option* seed_opt = nullptr;
    add_common(sub, opts, seed_opt);
    subs.emplace_back(sub, seed_opt);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (const auto& [sub, seed_opt] : subs) {
    if (sub->parsed()) return run(sub->get_name(), opts, seed_opt->count() > 0);
  }
  return 2;
}
