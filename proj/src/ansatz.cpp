#include "qflab/ansatz.hpp"

#include <numbers>
#include <string>

#include "qflab/errors.hpp"

namespace qflab {

bool AnsatzSpec::overparameterized() const {
  if (num_qubits > 31) return false;
  const double threshold = static_cast<double>(std::size_t{1} << (2 * num_qubits));
  return static_cast<double>(param_count()) >= threshold;
}

void AnsatzSpec::validate() const {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw ConfigError("ansatz qubit count out of range");
  if (layers < 1) throw ConfigError("ansatz needs at least one layer");
}

std::vector<std::pair<int, int>> entangler_pairs(const AnsatzSpec& spec) {
  std::vector<std::pair<int, int>> pairs;
  const int nq = spec.num_qubits;
  if (nq < 2) return pairs;
  for (int q = 0; q + 1 < nq; ++q) pairs.emplace_back(q, q + 1);
  if (spec.topology == Topology::Ring) pairs.emplace_back(nq - 1, 0);
  return pairs;
}

std::vector<AnsatzOp> ansatz_ops(const AnsatzSpec& spec) {
  spec.validate();
  const auto pairs = entangler_pairs(spec);
  std::vector<AnsatzOp> ops;
  ops.reserve(spec.param_count() + pairs.size() * spec.layers);
  std::size_t p = 0;
  for (int block = 0; block < spec.layers; ++block) {
    for (int q = 0; q < spec.num_qubits; ++q) {
      ops.push_back({AnsatzOp::Kind::Rotation, Axis::Y, q, 0, p++});
      ops.push_back({AnsatzOp::Kind::Rotation, Axis::Z, q, 0, p++});
    }
    for (auto [c, t] : pairs) ops.push_back({AnsatzOp::Kind::Cnot, Axis::Y, t, c, 0});
  }
  return ops;
}

void apply_ansatz(StateVector& state, const AnsatzSpec& spec, const ParameterVector& theta) {
  if (theta.size() != spec.param_count()) {
    throw ConfigError("parameter vector has length " + std::to_string(theta.size()) +
                      ", ansatz expects " + std::to_string(spec.param_count()));
  }
  if (state.num_qubits() != spec.num_qubits) throw ConfigError("state/ansatz qubit mismatch");
  for (const auto& op : ansatz_ops(spec)) {
    if (op.kind == AnsatzOp::Kind::Rotation) {
      state.rotate(op.axis, op.qubit, theta[op.param]);
    } else {
      state.cnot(op.control, op.qubit);
    }
  }
}

StateVector apply_ansatz(const StateVector& state, const AnsatzSpec& spec,
                         const ParameterVector& theta) {
  StateVector out = state;
  apply_ansatz(out, spec, theta);
  return out;
}

int min_layers_for_overparameterization(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 10) {
    throw ConfigError("overparameterization threshold supported for 1..10 qubits");
  }
  const std::size_t target = std::size_t{1} << (2 * num_qubits);
  const std::size_t per_layer = 2 * static_cast<std::size_t>(num_qubits);
  return static_cast<int>((target + per_layer - 1) / per_layer);
}

ParameterVector random_parameters(const AnsatzSpec& spec, Rng& rng) {
  ParameterVector theta(spec.param_count());
  for (auto& t : theta.values) t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return theta;
}

}  // namespace qflab
