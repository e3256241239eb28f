#include "qflab/statevector.hpp"

#include <cmath>
#include <string>

#include "qflab/errors.hpp"

namespace qflab {

Gate2 rotation_matrix(Axis axis, double angle) {
  if (!std::isfinite(angle)) {
    throw DomainError("rotation angle must be finite");
  }
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (axis) {
    case Axis::X:
      return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
    case Axis::Y:
      return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
    case Axis::Z:
      return {cplx(c, -s), cplx(0, 0), cplx(0, 0), cplx(c, s)};
  }
  return {};
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ConfigError("qubit count " + std::to_string(num_qubits) +
                      " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(std::size_t{1} << num_qubits, cplx(0, 0));
  amps_[0] = cplx(1, 0);
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= num_qubits_) {
    throw IndexError("qubit index " + std::to_string(q) + " out of range for " +
                     std::to_string(num_qubits_) + " qubits");
  }
}

void StateVector::rotate(Axis axis, int target, double angle) {
  check_qubit(target);
  apply(rotation_matrix(axis, angle), target);
}

void StateVector::apply(const Gate2& g, int target) {
  check_qubit(target);
  const std::size_t m = mask(target);
  const std::size_t n = amps_.size();
  for (std::size_t hi = 0; hi < n; hi += 2 * m) {
    for (std::size_t i = hi; i < hi + m; ++i) {
      const cplx a0 = amps_[i];
      const cplx a1 = amps_[i | m];
      amps_[i] = g.u00 * a0 + g.u01 * a1;
      amps_[i | m] = g.u10 * a0 + g.u11 * a1;
    }
  }
}

void StateVector::cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) {
    throw ConfigError("CNOT control and target must differ");
  }
  const std::size_t cm = mask(control);
  const std::size_t tm = mask(target);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cm) && !(i & tm)) {
      std::swap(amps_[i], amps_[i | tm]);
    }
  }
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double StateVector::expectation_z_all() const {
  double e = 0.0;
  for (std::size_t b = 0; b < amps_.size(); ++b) {
    e += parity_sign(b) * std::norm(amps_[b]);
  }
  return e;
}

StateVector init_zero(int num_qubits) { return StateVector(num_qubits); }

StateVector apply_rotation(StateVector state, Axis axis, int target, double angle) {
  state.rotate(axis, target, angle);
  return state;
}

StateVector apply_cnot(StateVector state, int control, int target) {
  state.cnot(control, target);
  return state;
}

double expectation_z_all(const StateVector& state) { return state.expectation_z_all(); }

}  // namespace qflab
