#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qflab/ansatz.hpp"
#include "qflab/encoding.hpp"

namespace qflab {

// Variational model y(x, theta) = <Z...Z> of W(theta) U(gamma x) |0>.
struct ModelSpec {
  EncodingSpec encoding;
  AnsatzSpec ansatz;

  int num_qubits() const { return encoding.num_qubits(); }
  std::size_t param_count() const { return ansatz.param_count(); }
  void validate() const;
};

// layers <= 0 selects the smallest overparameterized depth.
ModelSpec make_model(int n, int m, int layers = 0, Topology topology = Topology::Ring,
                     double gamma = 2.0 * std::numbers::pi);

struct Sample {
  std::vector<double> x;
  double y = 0.0;
};

struct GradientVector {
  std::vector<double> values;

  GradientVector() = default;
  explicit GradientVector(std::vector<double> v) : values(std::move(v)) {}
  explicit GradientVector(std::size_t d) : values(d, 0.0) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct ThetaShift {
  std::size_t index = 0;
  double delta = 0.0;
};

// Total circuit expectations evaluated in this process (all threads). Both the
// direct simulator path below and GradientEngine add to it.
std::uint64_t circuit_evaluations();
void count_circuit_evaluations(std::uint64_t n);

// Direct simulation with optional single-parameter and single-encoding-gate shifts.
double evaluate_circuit(const ModelSpec& spec, std::span<const double> x,
                        const ParameterVector& theta, std::optional<ThetaShift> theta_shift = {},
                        std::optional<EncodingShift> encoding_shift = {});

double model_output(const ModelSpec& spec, std::span<const double> x, const ParameterVector& theta);
double mse_cost(const ModelSpec& spec, const Sample& sample, const ParameterVector& theta);

// Parameter-shift derivative dy/dtheta_j (shift pi/2, factor 1/2).
double output_gradient_theta(const ModelSpec& spec, std::span<const double> x,
                             const ParameterVector& theta, std::size_t j);

// dCost/dtheta_j = -(y - y(theta)) (y(theta+) - y(theta-)) for every j; 2d + 1 evaluations.
GradientVector cost_gradient(const ModelSpec& spec, const Sample& sample, const ParameterVector& theta);
GradientVector batch_cost_gradient(const ModelSpec& spec, std::span<const Sample> samples,
                                   const ParameterVector& theta);

// dy/dx_k by the per-gate chain rule: every encoding gate carrying x_k is
// shifted by +-pi/2 in its own angle and weighted by base^r * gamma.
double output_gradient_x(const ModelSpec& spec, std::span<const double> x,
                         const ParameterVector& theta, int k);

// d/dx_k of dCost/dtheta_j, by nested shifts.
double cost_gradient_mixed(const ModelSpec& spec, std::span<const double> x, double y,
                           const ParameterVector& theta, std::size_t j, int k);

// dL/dx'_k for L = sum_j (C_j(x') - target_j)^2.
double attack_loss_gradient_x(const ModelSpec& spec, std::span<const double> x_prime,
                              const GradientVector& target, double y,
                              const ParameterVector& theta, int k);

// Contribution of a single j to attack_loss_gradient_x.
double attack_loss_gradient_x_term(const ModelSpec& spec, std::span<const double> x_prime,
                                   double target_j, double y, const ParameterVector& theta,
                                   std::size_t j, int k);

}  // namespace qflab
