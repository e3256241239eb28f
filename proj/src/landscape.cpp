#include "qflab/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qflab/attack.hpp"
#include "qflab/errors.hpp"
#include "qflab/parallel.hpp"

namespace qflab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Circular grid-step distance between indices along one axis.
std::size_t ring_steps(std::size_t a, std::size_t b, std::size_t res) {
  const std::size_t d = a > b ? a - b : b - a;
  return std::min(d, res - d);
}

}  // namespace

std::vector<double> LandscapeProfile::coordinates(std::size_t flat) const {
  const double step = period / static_cast<double>(resolution);
  if (n == 1) return {static_cast<double>(flat) * step};
  return {static_cast<double>(flat / resolution) * step, static_cast<double>(flat % resolution) * step};
}

std::size_t required_resolution(int m, double multiplier) {
  const double nyquist = 2.0 * static_cast<double>(max_gradient_frequency(m)) + 1.0;
  return static_cast<std::size_t>(std::ceil(multiplier * nyquist));
}

LandscapeProfile profile_from_grid(std::vector<double> values, int n, std::size_t resolution,
                                   double period) {
  if (n != 1 && n != 2) throw ConfigError("landscape grids support n = 1 or n = 2");
  if (resolution < 3) throw ConfigError("landscape grid needs at least 3 points per dimension");
  const std::size_t total = n == 1 ? resolution : resolution * resolution;
  if (values.size() != total) throw ConfigError("landscape grid size does not match resolution");

  LandscapeProfile p;
  p.n = n;
  p.resolution = resolution;
  p.period = period;
  p.values = std::move(values);
  const auto& v = p.values;
  const std::size_t res = resolution;

  auto neighbours = [&](std::size_t f, std::size_t out[4]) -> int {
    if (n == 1) {
      out[0] = (f + res - 1) % res;
      out[1] = (f + 1) % res;
      return 2;
    }
    const std::size_t r = f / res, c = f % res;
    out[0] = ((r + res - 1) % res) * res + c;
    out[1] = ((r + 1) % res) * res + c;
    out[2] = r * res + (c + res - 1) % res;
    out[3] = r * res + (c + 1) % res;
    return 4;
  };

  std::size_t nb[4];
  for (std::size_t f = 0; f < total; ++f) {
    const int k = neighbours(f, nb);
    bool is_min = true, is_max = true;
    for (int i = 0; i < k; ++i) {
      const double w = v[nb[i]];
      if (w == v[f]) p.plateau = true;
      if (!(v[f] < w)) is_min = false;
      if (!(v[f] > w)) is_max = false;
    }
    if (is_min) p.minima.push_back(f);
    if (is_max) p.maxima.push_back(f);
  }
  p.global_min = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());

  const double step = period / static_cast<double>(res);
  const double angle_step = kTwoPi / static_cast<double>(res);
  auto steps_between = [&](std::size_t a, std::size_t b, bool euclid) -> double {
    if (n == 1) return static_cast<double>(ring_steps(a, b, res));
    const double dr = static_cast<double>(ring_steps(a / res, b / res, res));
    const double dc = static_cast<double>(ring_steps(a % res, b % res, res));
    return euclid ? std::hypot(dr, dc) : std::max(dr, dc);
  };

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f : p.maxima) best = std::min(best, steps_between(p.global_min, f, true));
  if (std::isfinite(best)) {
    p.valley_width = best * step;
    p.valley_width_angle = best * angle_step;
  } else {
    p.valley_width = p.valley_width_angle = std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t f : p.minima) {
    // Half a turn can round just above pi.
    p.minima_distances.push_back(std::min(steps_between(p.global_min, f, false) * angle_step, std::numbers::pi));
  }
  return p;
}

LandscapeProfile scan_signal(const std::function<double(double)>& f, std::size_t resolution,
                             double period) {
  std::vector<double> v(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    v[i] = f(period * static_cast<double>(i) / static_cast<double>(resolution));
  }
  return profile_from_grid(std::move(v), 1, resolution, period);
}

LandscapeProfile scan_landscape(const GradientEngine& engine, const Sample& sample, std::size_t j,
                                std::size_t resolution) {
  const ModelSpec& spec = engine.spec();
  const int n = spec.encoding.n;
  const int m = spec.encoding.m;
  if (n != 1 && n != 2) throw ConfigError("landscape scans support n = 1 or n = 2");
  if (resolution < required_resolution(m)) {
    throw ConfigError("landscape resolution " + std::to_string(resolution) + " below 10x Nyquist (" +
                      std::to_string(required_resolution(m)) + ") for m = " + std::to_string(m));
  }
  if (j >= spec.param_count()) throw IndexError("gradient index out of range");
  const double target = engine.cost_gradient_entry(sample, j);
  const double period = spec.encoding.period();
  const std::size_t total = n == 1 ? resolution : resolution * resolution;
  std::vector<double> values(total);
  const double step = period / static_cast<double>(resolution);
  std::vector<double> x(n);
  for (std::size_t f = 0; f < total; ++f) {
    if (n == 1) {
      x[0] = static_cast<double>(f) * step;
    } else {
      x[0] = static_cast<double>(f / resolution) * step;
      x[1] = static_cast<double>(f % resolution) * step;
    }
    const auto o = engine.outputs_single(x, j);
    const double c = -(sample.y - o.value) * (o.plus - o.minus);
    values[f] = (c - target) * (c - target);
  }
  LandscapeProfile p = profile_from_grid(std::move(values), n, resolution, period);
  p.m = m;
  p.gradient_index = j;
  return p;
}

LandscapeProfile scan_landscape(const ModelSpec& spec, const ParameterVector& theta,
                                const Sample& sample, std::size_t j, std::size_t resolution) {
  return scan_landscape(GradientEngine(spec, theta), sample, j, resolution);
}

std::size_t random_gradient_index(const AnsatzSpec& spec, Rng& rng) {
  std::size_t pool = spec.param_count();
  if (spec.layers > 1) pool -= 2 * static_cast<std::size_t>(spec.num_qubits);
  return static_cast<std::size_t>(rng.index(pool));
}

std::vector<LandscapeRun> landscape_study(std::span<const int> m_values, int seeds,
                                          std::uint64_t master_seed, double resolution_multiplier,
                                          Topology topology) {
  if (seeds < 1) throw ConfigError("landscape study needs at least one seed");
  std::vector<LandscapeRun> runs(m_values.size() * static_cast<std::size_t>(seeds));
  for (int m : m_values) {
    if (m < 1 || m > 5) throw ConfigError("univariate landscape study supports 1 <= m <= 5");
  }
  parallel_for(runs.size(), [&](std::size_t i) {
    const int m = m_values[i / seeds];
    const int seed = static_cast<int>(i % seeds);
    Rng rng(derive_seed(master_seed, {tag("landscape"), static_cast<std::uint64_t>(m),
                                      static_cast<std::uint64_t>(seed)}));
    const ModelSpec spec = make_model(1, m, 0, topology);
    const ParameterVector theta = random_parameters(spec.ansatz, rng);
    Sample s;
    s.x = {rng.uniform()};
    s.y = rng.sign();
    const std::size_t j = random_gradient_index(spec.ansatz, rng);
    const std::size_t res = required_resolution(m, resolution_multiplier);
    runs[i] = {m, seed, scan_landscape(spec, theta, s, j, res)};
  });
  return runs;
}

namespace {

ScalingFit fit_quantity(std::span<const LandscapeRun> runs,
                        const std::function<double(const LandscapeProfile&)>& quantity) {
  ScalingFit out;
  for (const auto& r : runs) {
    if (std::find(out.m_values.begin(), out.m_values.end(), r.m) == out.m_values.end()) {
      out.m_values.push_back(r.m);
    }
  }
  std::sort(out.m_values.begin(), out.m_values.end());
  std::vector<double> xs, ys;
  for (int m : out.m_values) {
    std::vector<double> vals, logs;
    for (const auto& r : runs) {
      if (r.m != m) continue;
      const double q = quantity(r.profile);
      if (!(q > 0.0) || !std::isfinite(q)) continue;
      vals.push_back(q);
      logs.push_back(std::log(q));
    }
    const double mu = mean(vals);
    out.mean.push_back(mu);
    out.mean_log.push_back(mean(logs));
    out.stddev_log.push_back(stddev(logs));
    if (mu > 0.0) {
      xs.push_back(m);
      ys.push_back(std::log(mu));
    }
  }
  if (xs.size() >= 2) out.fit = linear_fit(xs, ys);
  return out;
}

}  // namespace

ScalingFit minima_scaling_fit(std::span<const LandscapeRun> runs) {
  return fit_quantity(runs, [](const LandscapeProfile& p) { return static_cast<double>(p.minima_count()); });
}

ScalingFit valley_width_fit(std::span<const LandscapeRun> runs) {
  return fit_quantity(runs, [](const LandscapeProfile& p) { return p.valley_width_angle; });
}

ScalingFit minima_scaling_experiment(std::span<const int> m_values, int seeds, std::uint64_t master_seed) {
  return minima_scaling_fit(landscape_study(m_values, seeds, master_seed));
}

ScalingFit valley_width_experiment(std::span<const int> m_values, int seeds, std::uint64_t master_seed) {
  return valley_width_fit(landscape_study(m_values, seeds, master_seed));
}

MinimaDistribution minima_distance_distribution(std::span<const LandscapeProfile> profiles,
                                                std::size_t bins) {
  MinimaDistribution d;
  for (const auto& p : profiles) {
    if (!profiles.empty() && p.m != profiles.front().m) {
      throw ConfigError("minima distance distribution pools profiles of a single m");
    }
    d.distances.insert(d.distances.end(), p.minima_distances.begin(), p.minima_distances.end());
  }
  d.counts = histogram(d.distances, bins, 0.0, std::numbers::pi);
  for (std::size_t b = 0; b <= bins; ++b) {
    d.bin_edges.push_back(std::numbers::pi * static_cast<double>(b) / static_cast<double>(bins));
  }
  d.ks_statistic = ks_uniform(d.distances, 0.0, std::numbers::pi);
  return d;
}

std::vector<LandscapeProfile> landscape_during_training(const ModelSpec& spec,
                                                        std::span<const ThetaSnapshot> snapshots,
                                                        const Sample& tracked, std::size_t j,
                                                        double resolution_multiplier) {
  std::vector<LandscapeProfile> out(snapshots.size());
  const std::size_t res = required_resolution(spec.encoding.m, resolution_multiplier);
  parallel_for(snapshots.size(), [&](std::size_t i) {
    out[i] = scan_landscape(spec, snapshots[i].theta, tracked, j, res);
  });
  return out;
}

}  // namespace qflab
