#include "qflab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qflab/errors.hpp"

namespace qflab {

double angular_distance(double a, double b) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("angular distance needs finite inputs");
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, two_pi - d);
}

double input_angular_error(std::span<const double> a, std::span<const double> b, double gamma) {
  if (a.size() != b.size()) throw ConfigError("input dimension mismatch");
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, angular_distance(gamma * a[k], gamma * b[k]));
  return e;
}

double attack_loss(const ModelSpec& spec, std::span<const double> x_prime, double y,
                   const ParameterVector& theta, const GradientVector& target) {
  if (target.size() != spec.param_count()) throw ConfigError("target gradient length does not match model");
  const auto g = cost_gradient(spec, Sample{{x_prime.begin(), x_prime.end()}, y}, theta);
  double l = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) l += (g[j] - target[j]) * (g[j] - target[j]);
  return l;
}

double attack_loss_single(const ModelSpec& spec, std::span<const double> x_prime, double y,
                          const ParameterVector& theta, double target_j, std::size_t j) {
  const double f = model_output(spec, x_prime, theta);
  const double cj = -(y - f) * 2.0 * output_gradient_theta(spec, x_prime, theta, j);
  return (cj - target_j) * (cj - target_j);
}

void AttackConfig::validate() const {
  if (iterations < 1) throw ConfigError("attack iterations must be >= 1");
  if (experiments < 1 || attempts < 1) throw ConfigError("attack needs >= 1 experiment and attempt");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("attack learning rate must be positive");
  for (double e : epsilons) {
    if (!(e > 0.0 && e <= std::numbers::pi)) throw ConfigError("epsilon values must lie in (0, pi]");
  }
}

std::vector<double> default_epsilons() {
  std::vector<double> e;
  constexpr int kPoints = 64;
  for (int i = 1; i <= kPoints; ++i) e.push_back(std::numbers::pi * i / kPoints);
  return e;
}

AttackTrace run_attack(const GradientEngine& engine, const GradientMessage& message,
                       const AttackConfig& config, Rng& rng, std::span<const double> truth) {
  std::vector<double> init(engine.spec().encoding.n);
  for (auto& v : init) v = rng.uniform();
  return run_attack_from(engine, message, config, std::move(init), truth);
}

AttackTrace run_attack_from(const GradientEngine& engine, const GradientMessage& message,
                            const AttackConfig& config, std::vector<double> initial,
                            std::span<const double> truth) {
  config.validate();
  if (!message.y) throw ProtocolError("attack requires the client label y in the round record");
  const double y = *message.y;
  const double gamma = engine.spec().encoding.gamma;
  const std::size_t n = initial.size();
  if (static_cast<int>(n) != engine.spec().encoding.n) throw ConfigError("initial x' has wrong dimension");

  AttackTrace tr;
  tr.target_x.assign(truth.begin(), truth.end());
  tr.initial_x = initial;

  std::vector<double> x = initial;
  Adam opt(n, config.adam);

  for (int it = 0; it <= config.iterations; ++it) {
    const auto ev = engine.attack_eval(x, y, message.gradients);
    tr.x_path.push_back(x);
    tr.loss.push_back(ev.loss);
    if (!std::isfinite(ev.loss)) {
      tr.diverged = true;
      break;
    }
    if (it == config.iterations) break;
    opt.step(x, ev.gradient);
  }
  tr.final_loss = tr.loss.back();
  tr.final_error = truth.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : input_angular_error(truth, tr.x_path.back(), gamma);
  return tr;
}

double success_rate(std::span<const AttackTrace> traces, double epsilon) {
  if (traces.empty()) throw ConfigError("success rate needs at least one trace");
  std::size_t hits = 0;
  for (const auto& t : traces) {
    if (!t.diverged && t.final_error < epsilon) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(traces.size());
}

SuccessCurve success_probability_curve(std::span<const AttackTrace> traces,
                                       std::span<const double> epsilons) {
  if (traces.empty()) throw ConfigError("success curve needs at least one trace");
  SuccessCurve c;
  std::vector<double> xs, ys;
  for (double e : epsilons) {
    const double p = success_rate(traces, e);
    c.points.push_back({e, p});
    xs.push_back(e);
    ys.push_back(p);
  }
  if (xs.size() >= 2) c.fit = linear_fit(xs, ys);
  return c;
}

}  // namespace qflab
