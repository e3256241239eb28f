#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qflab {

using cplx = std::complex<double>;

enum class Axis { X, Y, Z };

inline constexpr int kMaxQubits = 24;

// 2x2 unitary, row-major: {u00, u01, u10, u11}.
struct Gate2 {
  cplx u00, u01, u10, u11;
};

// R_axis(angle) = exp(-i * angle * sigma / 2).
Gate2 rotation_matrix(Axis axis, double angle);

// Dense statevector. Qubit 0 is the most significant bit of the basis index,
// so on two qubits |q0 q1> maps to index 2*q0 + q1.
class StateVector {
 public:
  explicit StateVector(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  void rotate(Axis axis, int target, double angle);
  void apply(const Gate2& g, int target);
  void cnot(int control, int target);

  double norm_squared() const;
  // <Z x Z x ... x Z>, computed exactly from the amplitudes.
  double expectation_z_all() const;

  // Bit mask of `qubit` inside a basis index.
  std::size_t mask(int qubit) const {
    return std::size_t{1} << (num_qubits_ - 1 - qubit);
  }

 private:
  void check_qubit(int q) const;

  int num_qubits_;
  std::vector<cplx> amps_;
};

StateVector init_zero(int num_qubits);
StateVector apply_rotation(StateVector state, Axis axis, int target, double angle);
StateVector apply_cnot(StateVector state, int control, int target);
double expectation_z_all(const StateVector& state);

// Sign (-1)^popcount(b) of the all-qubit Z observable on basis index b.
inline double parity_sign(std::size_t b) {
  return (__builtin_popcountll(b) & 1) ? -1.0 : 1.0;
}

}  // namespace qflab
