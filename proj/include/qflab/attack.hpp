#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qflab/adam.hpp"
#include "qflab/fedsim.hpp"
#include "qflab/gradient_engine.hpp"
#include "qflab/stats.hpp"

namespace qflab {

// min(|a - b|, 2 pi - |a - b|) after reducing both angles mod 2 pi.
double angular_distance(double a, double b);

// Max over coordinates of the angular distance between gamma * a and gamma * b.
double input_angular_error(std::span<const double> a, std::span<const double> b, double gamma);

// L = sum_j (dCost(theta, x', y)/dtheta_j - target_j)^2.
double attack_loss(const ModelSpec& spec, std::span<const double> x_prime, double y,
                   const ParameterVector& theta, const GradientVector& target);
// L_j = (dCost(theta, x', y)/dtheta_j - target_j)^2.
double attack_loss_single(const ModelSpec& spec, std::span<const double> x_prime, double y,
                          const ParameterVector& theta, double target_j, std::size_t j);

struct AttackConfig {
  AdamConfig adam{0.01, 0.9, 0.999, 1e-8};
  int iterations = 60;
  int experiments = 100;
  int attempts = 10;
  std::vector<double> epsilons;

  void validate() const;
};

// Default success grid: 64 tolerances evenly spaced on (0, pi].
std::vector<double> default_epsilons();

struct AttackTrace {
  int experiment = 0;
  int attempt = 0;
  std::vector<double> target_x;  // hidden truth, scoring only
  std::vector<double> initial_x;
  std::vector<std::vector<double>> x_path;  // iteration 0 is the initial guess
  std::vector<double> loss;                 // attack loss at every x_path entry
  double final_error = 0.0;                 // angular distance, max over coordinates
  double final_loss = 0.0;
  bool diverged = false;
};

// Gradient inversion: Adam on the dummy input x' against the full loss L.
// x' starts uniform on [0, 1) and is not clamped, since the encoding is
// periodic. `truth` may be empty, in which case final_error is NaN.
AttackTrace run_attack(const GradientEngine& engine, const GradientMessage& message,
                       const AttackConfig& config, Rng& rng, std::span<const double> truth = {});
// Same, starting from a caller-chosen x'.
AttackTrace run_attack_from(const GradientEngine& engine, const GradientMessage& message,
                            const AttackConfig& config, std::vector<double> initial,
                            std::span<const double> truth = {});

struct SuccessPoint {
  double epsilon = 0.0;
  double probability = 0.0;
};

struct SuccessCurve {
  std::vector<SuccessPoint> points;
  LinearFit fit;
};

// P(eps) = fraction of traces with final_error < eps, with a linear fit in eps.
SuccessCurve success_probability_curve(std::span<const AttackTrace> traces,
                                       std::span<const double> epsilons);
double success_rate(std::span<const AttackTrace> traces, double epsilon);

}  // namespace qflab
