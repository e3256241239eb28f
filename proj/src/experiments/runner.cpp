#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qflab/artifacts.hpp"
#include "qflab/classical.hpp"
#include "qflab/errors.hpp"
#include "qflab/experiments.hpp"
#include "qflab/gradient_engine.hpp"
#include "qflab/landscape.hpp"
#include "qflab/parallel.hpp"
#include "qflab/spectral.hpp"

namespace qflab::exp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

bool RunResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

constexpr double kPi = std::numbers::pi;

Check check_less(std::string name, double v, double hi) { return {std::move(name), v, "<", 0.0, hi, v < hi}; }
Check check_greater(std::string name, double v, double lo) { return {std::move(name), v, ">", lo, 0.0, v > lo}; }
Check check_at_least(std::string name, double v, double lo) { return {std::move(name), v, ">=", lo, 0.0, v >= lo}; }
Check check_range(std::string name, double v, double lo, double hi) {
  return {std::move(name), v, "in", lo, hi, v >= lo && v <= hi};
}

// JSON numbers must be finite; NaN and infinities become null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json fit_json(const LinearFit& f) {
  ordered_json j;
  j["slope"] = num(f.slope);
  j["intercept"] = num(f.intercept);
  j["prefactor"] = num(std::exp(f.intercept));
  j["r_squared"] = num(f.r_squared);
  return j;
}

ordered_json scaling_json(const ScalingFit& s) {
  ordered_json j = fit_json(s.fit);
  j["m_values"] = s.m_values;
  ordered_json mean = ordered_json::array(), mlog = ordered_json::array(), sd = ordered_json::array();
  for (std::size_t i = 0; i < s.m_values.size(); ++i) {
    mean.push_back(num(s.mean[i]));
    mlog.push_back(num(s.mean_log[i]));
    sd.push_back(num(s.stddev_log[i]));
  }
  j["mean"] = mean;
  j["mean_log"] = mlog;
  j["stddev_log"] = sd;
  return j;
}

std::string profile_csv(const LandscapeProfile& p, double gamma) {
  std::vector<bool> is_min(p.values.size(), false), is_max(p.values.size(), false);
  for (auto f : p.minima) is_min[f] = true;
  for (auto f : p.maxima) is_max[f] = true;
  std::vector<std::string> header{"index"};
  for (int k = 0; k < p.n; ++k) header.push_back("x" + std::to_string(k));
  for (int k = 0; k < p.n; ++k) header.push_back("angle" + std::to_string(k));
  for (const char* h : {"loss", "is_minimum", "is_maximum"}) header.emplace_back(h);
  CsvTable t(header);
  for (std::size_t f = 0; f < p.values.size(); ++f) {
    const auto c = p.coordinates(f);
    t.cell(static_cast<std::uint64_t>(f));
    for (double v : c) t.cell(v);
    for (double v : c) t.cell(gamma * v);
    t.cell(p.values[f]).cell(bool(is_min[f])).cell(bool(is_max[f]));
    t.end_row();
  }
  return t.str();
}

ordered_json profile_summary(const LandscapeProfile& p, double gamma) {
  ordered_json j;
  j["m"] = p.m;
  j["n"] = p.n;
  j["j"] = p.gradient_index;
  j["resolution"] = p.resolution;
  j["N_c"] = p.minima_count();
  j["N_max"] = p.maxima.size();
  j["r"] = num(p.valley_width);
  j["r_angle"] = num(p.valley_width_angle);
  const auto loc = p.coordinates(p.global_min);
  j["global_min_location"] = loc;
  std::vector<double> ang;
  for (double v : loc) ang.push_back(gamma * v);
  j["global_min_angle"] = ang;
  j["global_min_value"] = p.values[p.global_min];
  j["plateau"] = p.plateau;
  return j;
}

// Removes the artifacts of a previous run listed in its manifest. Anything
// else in the directory is left alone and makes the run refuse to start.
void prepare_output(const fs::path& root) {
  if (!fs::exists(root)) return;
  if (!fs::is_directory(root)) throw ConfigError("output path '" + root.string() + "' is not a directory");
  const fs::path manifest = root / "manifest.json";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    nlohmann::json old;
    try {
      in >> old;
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("existing manifest in '" + root.string() + "' is unreadable");
    }
    if (old.contains("files") && old["files"].is_array()) {
      for (const auto& f : old["files"]) {
        if (f.is_string()) fs::remove(root / f.get<std::string>());
      }
    }
    fs::remove(manifest);
    // Drop directories the old run created and left empty.
    std::vector<fs::path> dirs;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.rbegin(), dirs.rend());
    for (const auto& d : dirs) {
      if (fs::is_empty(d)) fs::remove(d);
    }
  }
  if (!fs::is_empty(root)) {
    throw ConfigError("output directory '" + root.string() + "' contains files not produced by qflab");
  }
}

void run_attack_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  const ModelSpec spec = cfg.model.spec();
  const AttackConfig& ac = cfg.attack.attack;
  const int n = spec.encoding.n;
  const auto E = static_cast<std::size_t>(ac.experiments);
  const auto A = static_cast<std::size_t>(ac.attempts);

  std::vector<std::string> lines(E);
  std::vector<std::vector<AttackTrace>> per(E);
  parallel_for(E, [&](std::size_t e) {
    Rng rng(derive_seed(cfg.seed, {tag("attack-experiment"), e}));
    const ParameterVector theta = random_parameters(spec.ansatz, rng);
    Sample s;
    for (int k = 0; k < n; ++k) s.x.push_back(rng.uniform());
    s.y = rng.sign();

    // One honest client holding a single sample (B = 1) and one server round.
    ClientState client(0, {s}, 1, derive_seed(cfg.seed, {tag("attack-client"), e}));
    ServerState server{spec, theta, 0.01, {1.0}};
    auto up = client_round(client, spec, theta);
    std::vector<GradientVector> grads{up.gradient};
    RoundRecord rec = server_aggregate_update(server, grads);
    rec.t = e;
    rec.client_ids = {0};
    rec.batches = {up.batch};
    GradientMessage msg = messages_from_round(rec, server).front();
    msg.y = s.y;  // labels are assumed leaked
    lines[e] = to_json_line(msg);

    // The attacker works from the serialized record only.
    const GradientMessage seen = parse_json_line(lines[e]);
    const GradientEngine engine(spec, seen.theta);
    for (std::size_t a = 0; a < A; ++a) {
      Rng arng(derive_seed(cfg.seed, {tag("attack-attempt"), e, a}));
      AttackTrace tr = run_attack(engine, seen, ac, arng, s.x);
      tr.experiment = static_cast<int>(e);
      tr.attempt = static_cast<int>(a);
      per[e].push_back(std::move(tr));
    }
  });

  std::vector<AttackTrace> traces;
  for (auto& v : per) {
    for (auto& t : v) traces.push_back(std::move(t));
  }

  std::string rounds;
  for (const auto& l : lines) rounds += l + "\n";
  out.write("rounds.jsonl", rounds);

  std::vector<std::string> th{"experiment", "attempt", "iteration"};
  for (int k = 0; k < n; ++k) th.push_back("x_prime" + std::to_string(k));
  th.emplace_back("loss");
  CsvTable tt(th);
  std::vector<std::string> sh{"experiment", "attempt"};
  for (const char* p : {"target_x", "initial_x", "final_x"}) {
    for (int k = 0; k < n; ++k) sh.push_back(p + std::to_string(k));
  }
  for (const char* h : {"final_error", "final_loss", "diverged"}) sh.emplace_back(h);
  CsvTable st(sh);
  std::vector<double> errors;
  std::size_t diverged = 0;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.x_path.size(); ++i) {
      tt.cell(t.experiment).cell(t.attempt).cell(static_cast<std::uint64_t>(i));
      for (double v : t.x_path[i]) tt.cell(v);
      tt.cell(t.loss[i]);
      tt.end_row();
    }
    st.cell(t.experiment).cell(t.attempt);
    for (double v : t.target_x) st.cell(v);
    for (double v : t.initial_x) st.cell(v);
    for (double v : t.x_path.back()) st.cell(v);
    st.cell(t.final_error).cell(t.final_loss).cell(t.diverged);
    st.end_row();
    if (t.diverged) ++diverged;
    else errors.push_back(t.final_error);
  }
  out.write("traces.csv", tt.str());
  out.write("summary.csv", st.str());

  const SuccessCurve curve = success_probability_curve(traces, ac.epsilons);
  CsvTable sc({"epsilon", "probability"});
  for (const auto& p : curve.points) sc.cell(p.epsilon).cell(p.probability).end_row();
  out.write("success.csv", sc.str());

  const auto bins = static_cast<std::size_t>(cfg.attack.histogram_bins);
  const auto counts = histogram(errors, bins, 0.0, kPi);
  CsvTable hc({"bin_lo", "bin_hi", "count"});
  for (std::size_t b = 0; b < bins; ++b) {
    hc.cell(kPi * static_cast<double>(b) / static_cast<double>(bins))
        .cell(kPi * static_cast<double>(b + 1) / static_cast<double>(bins))
        .cell(static_cast<std::uint64_t>(counts[b]));
    hc.end_row();
  }
  out.write("histogram.csv", hc.str());

  const double ks = ks_uniform(errors, 0.0, kPi);
  const double rate = success_rate(traces, 0.1);
  ordered_json fit = fit_json(curve.fit);
  fit["n"] = n;
  fit["m"] = spec.encoding.m;
  fit["layers"] = spec.ansatz.layers;
  fit["parameters"] = spec.param_count();
  fit["experiments"] = ac.experiments;
  fit["attempts"] = ac.attempts;
  fit["iterations"] = ac.iterations;
  fit["ks_statistic"] = num(ks);
  fit["success_rate_eps_0.1"] = rate;
  fit["uniform_baseline_eps_0.1"] = 0.1 / kPi;
  fit["diverged_traces"] = diverged;
  out.write("fit.json", dump(fit));

  res.log.push_back("attack m=" + std::to_string(spec.encoding.m) + ": P(0.1)=" + format_double(rate) +
                    " KS=" + format_double(ks) + " R2=" + format_double(curve.fit.r_squared));
  if (spec.encoding.m >= 3) {
    res.checks.push_back(check_at_least("p_eps_fit_r_squared", curve.fit.r_squared, 0.95));
    res.checks.push_back(check_less("final_error_ks_vs_uniform", ks, 0.1));
  } else {
    res.checks.push_back(check_greater("success_rate_eps_0.1_vs_uniform_guess", rate, 0.1 / kPi));
    if (spec.encoding.m == 1) res.checks.push_back(check_greater("success_rate_eps_0.1", rate, 0.5));
  }
}

void run_landscape_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  const auto& lf = cfg.landscape;
  const double gamma = 2.0 * kPi;
  const auto runs = landscape_study(lf.m_values, lf.seeds, cfg.seed, lf.resolution_multiplier, cfg.model.topology);

  ordered_json summary = ordered_json::array();
  CsvTable dist({"m", "seed", "distance"});
  for (const auto& r : runs) {
    out.write("profiles/m" + std::to_string(r.m) + "_seed" + std::to_string(r.seed) + ".csv",
              profile_csv(r.profile, gamma));
    ordered_json s = profile_summary(r.profile, gamma);
    s["seed"] = r.seed;
    summary.push_back(s);
    for (double d : r.profile.minima_distances) dist.cell(r.m).cell(r.seed).cell(d).end_row();
  }
  out.write("landscape_summary.json", dump(summary));
  out.write("minima_distances.csv", dist.str());

  CsvTable hist({"m", "bin_lo", "bin_hi", "count"});
  ordered_json ks = ordered_json::object();
  std::vector<int> ms = lf.m_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  for (int m : ms) {
    std::vector<LandscapeProfile> group;
    for (const auto& r : runs) {
      if (r.m == m) group.push_back(r.profile);
    }
    const auto md = minima_distance_distribution(group, static_cast<std::size_t>(lf.bins));
    for (std::size_t b = 0; b < md.counts.size(); ++b) {
      hist.cell(m).cell(md.bin_edges[b]).cell(md.bin_edges[b + 1]).cell(static_cast<std::uint64_t>(md.counts[b]));
      hist.end_row();
    }
    ks[std::to_string(m)] = num(md.ks_statistic);
  }
  out.write("minima_histogram.csv", hist.str());

  const ScalingFit nc = minima_scaling_fit(runs);
  const ScalingFit r = valley_width_fit(runs);
  ordered_json fits;
  fits["minima_count"] = scaling_json(nc);
  fits["valley_width"] = scaling_json(r);
  fits["valley_width"]["units"] = "radians";
  fits["minima_distance_ks_vs_uniform"] = ks;
  fits["seeds"] = lf.seeds;
  fits["resolution_multiplier"] = lf.resolution_multiplier;
  out.write("fits.json", dump(fits));

  res.log.push_back("landscape: ln N_c slope=" + format_double(nc.fit.slope) +
                    " ln r slope=" + format_double(r.fit.slope));
  if (ms.size() >= 2) {
    res.checks.push_back(check_range("minima_count_slope", nc.fit.slope, 1.2, 1.8));
    res.checks.push_back(check_range("valley_width_slope", r.fit.slope, -1.8, -1.2));
  }
}

void run_train_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  const auto& tf = cfg.train;
  const ModelSpec spec = cfg.model.spec();
  const double gamma = spec.encoding.gamma;
  const bool closed_form = tf.target != "custom";

  std::vector<Sample> data;
  if (closed_form) {
    for (int i = 0; i < tf.grid_points; ++i) {
      const double x = static_cast<double>(i) / tf.grid_points;
      data.push_back(Sample{{x}, target_value(tf, x, gamma)});
    }
  } else {
    data = tf.table;
  }
  std::vector<ClientState> clients;
  for (int c = 0; c < tf.clients; ++c) {
    std::vector<Sample> mine;
    for (std::size_t i = static_cast<std::size_t>(c); i < data.size(); i += static_cast<std::size_t>(tf.clients)) {
      mine.push_back(data[i]);
    }
    clients.emplace_back(c, std::move(mine), static_cast<std::size_t>(tf.batch_size),
                         derive_seed(cfg.seed, {tag("train-client"), static_cast<std::uint64_t>(c)}));
  }
  Rng theta_rng(derive_seed(cfg.seed, {tag("train-theta")}));
  ServerState server{spec, random_parameters(spec.ansatz, theta_rng), tf.learning_rate, dataset_weights(clients)};

  TrainingConfig tc;
  tc.epochs = tf.epochs;
  tc.optimizer = tf.optimizer;
  tc.snapshot_epochs = tf.snapshot_epochs;
  std::string rounds;
  std::function<void(const RoundRecord&)> hook;
  if (tf.write_rounds) {
    hook = [&](const RoundRecord& rec) {
      for (const auto& m : messages_from_round(rec, server)) rounds += to_json_line(m) + "\n";
    };
  }
  const TrainingHistory h = run_training(server, clients, tc, data, hook);
  if (tf.write_rounds) out.write("rounds.jsonl", rounds);

  CsvTable hist({"epoch", "mse"});
  for (std::size_t e = 0; e < h.mse.size(); ++e) hist.cell(static_cast<std::uint64_t>(e)).cell(h.mse[e]).end_row();
  out.write("history.csv", hist.str());

  CsvTable snap({"epoch", "index", "theta"});
  CsvTable pred({"epoch", "x", "target", "output"});
  for (const auto& s : h.snapshots) {
    for (std::size_t k = 0; k < s.theta.size(); ++k) snap.cell(s.epoch).cell(static_cast<std::uint64_t>(k)).cell(s.theta[k]).end_row();
    const GradientEngine eng(spec, s.theta);
    for (int i = 0; i < tf.prediction_points; ++i) {
      const double x = static_cast<double>(i) / tf.prediction_points;
      const double xv[1] = {x};
      pred.cell(s.epoch).cell(x).cell(closed_form ? target_value(tf, x, gamma) : std::nan(""))
          .cell(eng.output(xv));
      pred.end_row();
    }
  }
  out.write("snapshots.csv", snap.str());
  out.write("predictions.csv", pred.str());

  ordered_json summary;
  summary["m"] = spec.encoding.m;
  summary["layers"] = spec.ansatz.layers;
  summary["parameters"] = spec.param_count();
  summary["clients"] = tf.clients;
  summary["epochs"] = tf.epochs;
  summary["rounds"] = h.rounds;
  summary["initial_mse"] = num(h.mse.front());
  summary["final_mse"] = num(h.mse.back());
  summary["diverged"] = h.diverged;
  summary["diagnostic"] = h.diagnostic;

  const double final_mse = h.mse.back();
  res.checks.push_back(check_less("final_mse", final_mse, tf.check_mse));
  res.log.push_back("train m=" + std::to_string(spec.encoding.m) + ": final MSE=" + format_double(final_mse));

  if (tf.track_landscape && !h.diverged) {
    Sample tracked;
    tracked.x = {tf.tracked_angle / gamma};
    if (closed_form) {
      tracked.y = target_value(tf, tracked.x[0], gamma);
    } else {
      // Nearest table entry supplies the label.
      const auto it = std::min_element(data.begin(), data.end(), [&](const Sample& a, const Sample& b) {
        return std::abs(a.x[0] - tracked.x[0]) < std::abs(b.x[0] - tracked.x[0]);
      });
      tracked.y = it->y;
    }
    std::size_t j;
    if (tf.gradient_index >= 0) {
      j = static_cast<std::size_t>(tf.gradient_index);
    } else {
      Rng jr(derive_seed(cfg.seed, {tag("train-gradient-index")}));
      j = random_gradient_index(spec.ansatz, jr);
    }
    const auto profiles = landscape_during_training(spec, h.snapshots, tracked, j);
    ordered_json ls = ordered_json::array();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const int epoch = h.snapshots[i].epoch;
      out.write("landscape/epoch" + std::to_string(epoch) + ".csv", profile_csv(profiles[i], gamma));
      ordered_json s = profile_summary(profiles[i], gamma);
      s["epoch"] = epoch;
      ls.push_back(s);
    }
    out.write("landscape_summary.json", dump(ls));
    const double nc0 = static_cast<double>(profiles.front().minima_count());
    const double nc1 = static_cast<double>(profiles.back().minima_count());
    summary["tracked_x"] = tracked.x[0];
    summary["tracked_y"] = tracked.y;
    summary["gradient_index"] = j;
    summary["N_c_initial"] = profiles.front().minima_count();
    summary["N_c_final"] = profiles.back().minima_count();
    res.log.push_back("train landscape j=" + std::to_string(j) + ": N_c " + format_double(nc0) + " -> " +
                      format_double(nc1));
    if (tf.check_min_nc_ratio > 0.0) {
      res.checks.push_back(check_at_least("final_to_initial_minima_ratio", nc1 / nc0, tf.check_min_nc_ratio));
    }
  }
  out.write("train_summary.json", dump(summary));
  if (h.diverged) {
    res.status = "diverged";
    res.log.push_back("training diverged: " + h.diagnostic);
  }
}

void run_spectrum_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  const auto& sf = cfg.spectrum;
  struct Row {
    int m = 0, seed = 0;
    std::size_t j = 0;
    std::int64_t observed = 0, predicted = 0;
    double beyond = 0.0, residual = 0.0, high = 0.0;
    bool pass = false;
    std::string csv;
  };
  const std::size_t per_m = static_cast<std::size_t>(sf.seeds);
  std::vector<Row> rows(sf.m_values.size() * per_m);
  parallel_for(rows.size(), [&](std::size_t i) {
    Row& r = rows[i];
    r.m = sf.m_values[i / per_m];
    r.seed = static_cast<int>(i % per_m);
    Rng rng(derive_seed(cfg.seed, {tag("spectrum"), static_cast<std::uint64_t>(sf.n), static_cast<std::uint64_t>(r.m),
                                   static_cast<std::uint64_t>(r.seed)}));
    const ModelSpec spec = make_model(sf.n, r.m);
    const ParameterVector theta = random_parameters(spec.ansatz, rng);
    Sample s;
    for (int k = 0; k < sf.n; ++k) s.x.push_back(rng.uniform());
    s.y = rng.sign();
    r.j = static_cast<std::size_t>(rng.index(spec.param_count()));
    if (sf.n == 1) {
      const auto rep = verify_gradient_support(spec, theta, s, r.j);
      r.observed = rep.observed_max_frequency;
      r.predicted = rep.predicted;
      r.beyond = rep.max_beyond_predicted;
      r.residual = rep.spectrum.max_abs_residual;
      r.pass = rep.pass;
      CsvTable t({"frequency", "real", "imag", "magnitude"});
      for (std::size_t k = 0; k < rep.spectrum.frequencies.size(); ++k) {
        const auto w = rep.spectrum.frequencies[k];
        const cplx c = rep.spectrum.coefficients[k];
        t.cell(w).cell(c.real()).cell(c.imag()).cell(std::abs(c)).end_row();
        if (std::abs(w) > 4) r.high = std::max(r.high, std::abs(c));
      }
      r.csv = t.str();
    } else {
      const auto rep = verify_gradient_support_2d(spec, theta, s, r.j);
      r.observed = rep.observed_max_frequency;
      r.predicted = rep.predicted;
      r.beyond = rep.max_beyond_predicted;
      r.residual = rep.spectrum.max_abs_residual;
      r.pass = rep.pass;
      CsvTable t({"frequency0", "frequency1", "real", "imag", "magnitude"});
      const auto d = rep.spectrum.d_f;
      for (std::int64_t a = -d; a <= d; ++a) {
        for (std::int64_t b = -d; b <= d; ++b) {
          const cplx c = rep.spectrum.coefficient(a, b);
          t.cell(a).cell(b).cell(c.real()).cell(c.imag()).cell(std::abs(c)).end_row();
          if (std::max(std::abs(a), std::abs(b)) > 4) r.high = std::max(r.high, std::abs(c));
        }
      }
      r.csv = t.str();
    }
  });

  CsvTable sup({"n", "m", "seed", "j", "observed_max_frequency", "predicted_max_frequency",
                "max_coefficient_beyond_predicted", "max_coefficient_above_4", "max_abs_residual", "pass"});
  std::size_t passed = 0, high_m2 = 0;
  for (const auto& r : rows) {
    out.write("spectra/m" + std::to_string(r.m) + "_seed" + std::to_string(r.seed) + ".csv", r.csv);
    sup.cell(sf.n).cell(r.m).cell(r.seed).cell(static_cast<std::uint64_t>(r.j)).cell(r.observed).cell(r.predicted)
        .cell(r.beyond).cell(r.high).cell(r.residual).cell(r.pass);
    sup.end_row();
    if (r.pass) ++passed;
    if (r.m == 2 && r.high > kCoefficientThreshold) ++high_m2;
    res.log.push_back("spectrum m=" + std::to_string(r.m) + " seed=" + std::to_string(r.seed) +
                      ": observed max frequency " + std::to_string(r.observed) + " (bound " +
                      std::to_string(r.predicted) + ")" + (r.pass ? "" : " FAIL"));
  }
  out.write("support.csv", sup.str());
  res.checks.push_back(check_at_least("support_pass_fraction", static_cast<double>(passed) / rows.size(), 1.0));
  if (std::find(sf.m_values.begin(), sf.m_values.end(), 2) != sf.m_values.end()) {
    res.checks.push_back(check_at_least("m2_runs_with_frequency_above_4", static_cast<double>(high_m2), 1.0));
  }
}

void run_bounds_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  CsvTable t({"n", "m", "d_f", "k_g", "gradient_frequency_count", "chebyshev_degree", "bezout", "buchberger",
              "buchberger_log2", "nyquist_samples"});
  ordered_json rows = ordered_json::array();
  for (int n : cfg.bounds.n_values) {
    for (int m : cfg.bounds.m_values) {
      const BoundsRow b = bounds_row(n, m);
      t.cell(n).cell(m).cell(b.d_f).cell(b.k_g).cell(gradient_frequency_count(n, m)).cell(b.chebyshev)
          .cell(b.bezout).cell(b.buchberger.decimal).cell(b.buchberger.log2).cell(b.nyquist);
      t.end_row();
      ordered_json r;
      r["n"] = n;
      r["m"] = m;
      r["d_f"] = b.d_f;
      r["k_g"] = b.k_g;
      r["chebyshev_degree"] = b.chebyshev;
      r["bezout"] = b.bezout;
      r["buchberger"] = b.buchberger.decimal;
      r["buchberger_log2"] = b.buchberger.log2;
      r["nyquist_samples"] = b.nyquist;
      rows.push_back(r);
      res.log.push_back("bounds n=" + std::to_string(n) + " m=" + std::to_string(m) + ": d_F=" +
                        std::to_string(b.d_f) + " bezout=" + std::to_string(b.bezout) + " buchberger=" +
                        b.buchberger.decimal);
    }
  }
  out.write("bounds.csv", t.str());
  out.write("bounds.json", dump(rows));
}

void run_classical_experiment(const ExperimentConfig& cfg, ArtifactSet& out, RunResult& res) {
  const auto& c = cfg.classical;
  const ClassicalDemo d = classical_demo(static_cast<std::size_t>(c.n), static_cast<std::size_t>(c.classes),
                                         static_cast<std::size_t>(c.instances), derive_seed(cfg.seed, {tag("classical")}));
  ordered_json j;
  j["n"] = c.n;
  j["classes"] = c.classes;
  j["instances"] = c.instances;
  j["max_recovery_error"] = d.max_recovery_error;
  j["max_finite_difference_error"] = d.max_fd_error;
  j["batch2_equations"] = d.batch2.equations;
  j["batch2_unknowns"] = d.batch2.unknowns;
  j["batch2_underdetermined"] = d.batch2.underdetermined;
  out.write("classical.json", dump(j));
  res.log.push_back("classical: max recovery error " + format_double(d.max_recovery_error) +
                    ", finite-difference error " + format_double(d.max_fd_error));
  res.log.push_back("classical B=2: " + std::to_string(d.batch2.equations) + " equations vs " +
                    std::to_string(d.batch2.unknowns) + " unknowns");
  res.checks.push_back(check_less("max_recovery_error", d.max_recovery_error, 1e-9));
  res.checks.push_back(check_less("max_finite_difference_error", d.max_fd_error, 1e-6));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  const fs::path root(cfg.output_dir);
  prepare_output(root);
  fs::create_directories(root);
  ArtifactSet out(root);
  RunResult res;
  if (cfg.experiment == "attack") run_attack_experiment(cfg, out, res);
  else if (cfg.experiment == "landscape") run_landscape_experiment(cfg, out, res);
  else if (cfg.experiment == "train") run_train_experiment(cfg, out, res);
  else if (cfg.experiment == "spectrum") run_spectrum_experiment(cfg, out, res);
  else if (cfg.experiment == "bounds") run_bounds_experiment(cfg, out, res);
  else if (cfg.experiment == "classical") run_classical_experiment(cfg, out, res);
  else throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  res.files = out.files();
  std::sort(res.files.begin(), res.files.end());
  ordered_json m;
  m["artifact_version"] = kArtifactVersion;
  m["experiment"] = cfg.experiment;
  m["status"] = res.status;
  m["config"] = cfg.resolved;
  ordered_json checks = ordered_json::array();
  for (const auto& c : res.checks) {
    ordered_json j;
    j["name"] = c.name;
    j["value"] = num(c.value);
    j["relation"] = c.relation;
    if (c.relation == "in") j["bounds"] = {c.lo, c.hi};
    else j["threshold"] = (c.relation == "<" || c.relation == "<=") ? c.hi : c.lo;
    j["pass"] = c.pass;
    checks.push_back(j);
  }
  m["checks"] = checks;
  m["files"] = res.files;
  ArtifactSet(root).write("manifest.json", dump(m));
  return res;
}

}  // namespace qflab::exp
