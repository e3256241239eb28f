#include "qflab/qmodel.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "qflab/errors.hpp"

namespace qflab {

namespace {

constexpr double kShift = std::numbers::pi / 2.0;

std::atomic<std::uint64_t> g_evaluations{0};

void check_param_index(const ModelSpec& spec, std::size_t j) {
  if (j >= spec.param_count()) {
    throw IndexError("parameter index " + std::to_string(j) + " out of range (d = " +
                     std::to_string(spec.param_count()) + ")");
  }
}

void check_input_index(const ModelSpec& spec, int k) {
  if (k < 0 || k >= spec.encoding.n) {
    throw IndexError("input index " + std::to_string(k) + " out of range (n = " +
                     std::to_string(spec.encoding.n) + ")");
  }
}

// Derivative of C_j = -(y - f) D_j in x_k, with f and D_j = f(theta_j+) - f(theta_j-)
// evaluated at x.
double mixed_from_shifts(const ModelSpec& spec, std::span<const double> x, double y,
                         const ParameterVector& theta, std::size_t j, int k) {
  const double f = evaluate_circuit(spec, x, theta);
  const double d_plus = evaluate_circuit(spec, x, theta, ThetaShift{j, kShift});
  const double d_minus = evaluate_circuit(spec, x, theta, ThetaShift{j, -kShift});
  const double dj = d_plus - d_minus;
  double dfdx = 0.0;
  double ddjdx = 0.0;
  for (int r = 0; r < spec.encoding.m; ++r) {
    const double w = 0.5 * spec.encoding.prefactor(r) * spec.encoding.gamma;
    const EncodingShift up{k, r, kShift};
    const EncodingShift down{k, r, -kShift};
    dfdx += w * (evaluate_circuit(spec, x, theta, {}, up) - evaluate_circuit(spec, x, theta, {}, down));
    const double pp = evaluate_circuit(spec, x, theta, ThetaShift{j, kShift}, up);
    const double pm = evaluate_circuit(spec, x, theta, ThetaShift{j, kShift}, down);
    const double mp = evaluate_circuit(spec, x, theta, ThetaShift{j, -kShift}, up);
    const double mm = evaluate_circuit(spec, x, theta, ThetaShift{j, -kShift}, down);
    ddjdx += w * ((pp - pm) - (mp - mm));
  }
  return dfdx * dj - (y - f) * ddjdx;
}

}  // namespace

void ModelSpec::validate() const {
  encoding.validate();
  ansatz.validate();
  if (encoding.num_qubits() != ansatz.num_qubits) {
    throw ConfigError("encoding uses " + std::to_string(encoding.num_qubits()) +
                      " qubits but ansatz has " + std::to_string(ansatz.num_qubits));
  }
}

ModelSpec make_model(int n, int m, int layers, Topology topology, double gamma) {
  ModelSpec spec;
  spec.encoding.n = n;
  spec.encoding.m = m;
  spec.encoding.gamma = gamma;
  spec.encoding.validate();
  spec.ansatz.num_qubits = n * m;
  spec.ansatz.layers = layers > 0 ? layers : min_layers_for_overparameterization(n * m);
  spec.ansatz.topology = topology;
  spec.validate();
  return spec;
}

std::uint64_t circuit_evaluations() { return g_evaluations.load(std::memory_order_relaxed); }
void count_circuit_evaluations(std::uint64_t n) {
  g_evaluations.fetch_add(n, std::memory_order_relaxed);
}

double evaluate_circuit(const ModelSpec& spec, std::span<const double> x,
                        const ParameterVector& theta, std::optional<ThetaShift> theta_shift,
                        std::optional<EncodingShift> encoding_shift) {
  StateVector s(spec.num_qubits());
  apply_encoding(s, spec.encoding, x, encoding_shift);
  if (theta_shift) {
    ParameterVector shifted = theta;
    shifted[theta_shift->index] += theta_shift->delta;
    apply_ansatz(s, spec.ansatz, shifted);
  } else {
    apply_ansatz(s, spec.ansatz, theta);
  }
  count_circuit_evaluations(1);
  return s.expectation_z_all();
}

double model_output(const ModelSpec& spec, std::span<const double> x, const ParameterVector& theta) {
  return evaluate_circuit(spec, x, theta);
}

double mse_cost(const ModelSpec& spec, const Sample& sample, const ParameterVector& theta) {
  const double r = sample.y - model_output(spec, sample.x, theta);
  return r * r;
}

double output_gradient_theta(const ModelSpec& spec, std::span<const double> x,
                             const ParameterVector& theta, std::size_t j) {
  check_param_index(spec, j);
  return 0.5 * (evaluate_circuit(spec, x, theta, ThetaShift{j, kShift}) -
                evaluate_circuit(spec, x, theta, ThetaShift{j, -kShift}));
}

GradientVector cost_gradient(const ModelSpec& spec, const Sample& sample, const ParameterVector& theta) {
  const std::size_t d = spec.param_count();
  if (theta.size() != d) throw ConfigError("parameter vector length does not match model");
  const double residual = sample.y - model_output(spec, sample.x, theta);
  GradientVector g(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double plus = evaluate_circuit(spec, sample.x, theta, ThetaShift{j, kShift});
    const double minus = evaluate_circuit(spec, sample.x, theta, ThetaShift{j, -kShift});
    g[j] = -residual * (plus - minus);
  }
  return g;
}

GradientVector batch_cost_gradient(const ModelSpec& spec, std::span<const Sample> samples,
                                   const ParameterVector& theta) {
  if (samples.empty()) throw ConfigError("batch gradient needs at least one sample");
  GradientVector acc(spec.param_count());
  for (const auto& s : samples) {
    const auto g = cost_gradient(spec, s, theta);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += g[j];
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& v : acc.values) v *= inv;
  return acc;
}

double output_gradient_x(const ModelSpec& spec, std::span<const double> x,
                         const ParameterVector& theta, int k) {
  check_input_index(spec, k);
  double g = 0.0;
  for (int r = 0; r < spec.encoding.m; ++r) {
    const double w = 0.5 * spec.encoding.prefactor(r) * spec.encoding.gamma;
    g += w * (evaluate_circuit(spec, x, theta, {}, EncodingShift{k, r, kShift}) -
              evaluate_circuit(spec, x, theta, {}, EncodingShift{k, r, -kShift}));
  }
  return g;
}

double cost_gradient_mixed(const ModelSpec& spec, std::span<const double> x, double y,
                           const ParameterVector& theta, std::size_t j, int k) {
  check_param_index(spec, j);
  check_input_index(spec, k);
  return mixed_from_shifts(spec, x, y, theta, j, k);
}

double attack_loss_gradient_x_term(const ModelSpec& spec, std::span<const double> x_prime,
                                   double target_j, double y, const ParameterVector& theta,
                                   std::size_t j, int k) {
  check_param_index(spec, j);
  check_input_index(spec, k);
  const double f = evaluate_circuit(spec, x_prime, theta);
  const double cj = -(y - f) * (evaluate_circuit(spec, x_prime, theta, ThetaShift{j, kShift}) -
                                evaluate_circuit(spec, x_prime, theta, ThetaShift{j, -kShift}));
  return 2.0 * (cj - target_j) * mixed_from_shifts(spec, x_prime, y, theta, j, k);
}

double attack_loss_gradient_x(const ModelSpec& spec, std::span<const double> x_prime,
                              const GradientVector& target, double y,
                              const ParameterVector& theta, int k) {
  if (target.size() != spec.param_count()) {
    throw ConfigError("target gradient length does not match model");
  }
  double g = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    g += attack_loss_gradient_x_term(spec, x_prime, target[j], y, theta, j, k);
  }
  return g;
}

}  // namespace qflab
