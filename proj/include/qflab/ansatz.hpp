#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qflab/rng.hpp"
#include "qflab/statevector.hpp"

namespace qflab {

enum class Topology { Ring, Chain };

// Hardware-efficient ansatz: L blocks of (R_Y, R_Z) on every qubit followed by
// a nearest-neighbour CNOT layer.
//
// Parameter layout is block-major, then qubit, then (R_Y, R_Z):
//   index(block, qubit, k) = 2 * (block * num_qubits + qubit) + k.
struct AnsatzSpec {
  int num_qubits = 1;
  int layers = 1;
  Topology topology = Topology::Ring;

  std::size_t param_count() const {
    return 2 * static_cast<std::size_t>(layers) * static_cast<std::size_t>(num_qubits);
  }
  bool overparameterized() const;
  void validate() const;
};

struct ParameterVector {
  std::vector<double> values;

  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> v) : values(std::move(v)) {}
  explicit ParameterVector(std::size_t d, double fill = 0.0) : values(d, fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> span() const { return values; }
};

// One step of the flattened ansatz circuit.
struct AnsatzOp {
  enum class Kind { Rotation, Cnot };
  Kind kind;
  Axis axis = Axis::Y;
  int qubit = 0;    // rotation target, or CNOT target
  int control = 0;  // CNOT only
  std::size_t param = 0;
};

std::vector<AnsatzOp> ansatz_ops(const AnsatzSpec& spec);
std::vector<std::pair<int, int>> entangler_pairs(const AnsatzSpec& spec);

void apply_ansatz(StateVector& state, const AnsatzSpec& spec, const ParameterVector& theta);
StateVector apply_ansatz(const StateVector& state, const AnsatzSpec& spec,
                         const ParameterVector& theta);

// Smallest L with 2 L N_q >= 4^{N_q}.
int min_layers_for_overparameterization(int num_qubits);

// Independent uniform draws on [0, 2 pi).
ParameterVector random_parameters(const AnsatzSpec& spec, Rng& rng);

}  // namespace qflab
