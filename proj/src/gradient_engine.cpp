#include "qflab/gradient_engine.hpp"

#include <numbers>

#include "qflab/errors.hpp"

namespace qflab {

namespace {

constexpr double kShift = std::numbers::pi / 2.0;

int axis_slot(Axis a) { return a == Axis::Y ? 0 : 1; }

// out = g applied to `in` on the qubit selected by `mask`.
void apply_to(std::span<cplx> out, std::span<const cplx> in, const Gate2& g, std::size_t mask) {
  const std::size_t n = in.size();
  for (std::size_t hi = 0; hi < n; hi += 2 * mask) {
    for (std::size_t i = hi; i < hi + mask; ++i) {
      const cplx a0 = in[i];
      const cplx a1 = in[i | mask];
      out[i] = g.u00 * a0 + g.u01 * a1;
      out[i | mask] = g.u10 * a0 + g.u11 * a1;
    }
  }
}

// o <- g^dagger o g for a single-qubit gate.
void conjugate(std::vector<cplx>& o, std::size_t dim, const Gate2& g, std::size_t mask) {
  for (std::size_t r = 0; r < dim; ++r) {
    cplx* row = &o[r * dim];
    for (std::size_t hi = 0; hi < dim; hi += 2 * mask) {
      for (std::size_t c = hi; c < hi + mask; ++c) {
        const cplx a = row[c];
        const cplx b = row[c | mask];
        row[c] = a * g.u00 + b * g.u10;
        row[c | mask] = a * g.u01 + b * g.u11;
      }
    }
  }
  const cplx h00 = std::conj(g.u00), h01 = std::conj(g.u10);
  const cplx h10 = std::conj(g.u01), h11 = std::conj(g.u11);
  for (std::size_t hi = 0; hi < dim; hi += 2 * mask) {
    for (std::size_t r = hi; r < hi + mask; ++r) {
      cplx* r0 = &o[r * dim];
      cplx* r1 = &o[(r | mask) * dim];
      for (std::size_t c = 0; c < dim; ++c) {
        const cplx a = r0[c];
        const cplx b = r1[c];
        r0[c] = h00 * a + h01 * b;
        r1[c] = h10 * a + h11 * b;
      }
    }
  }
}

// o <- P o P for the CNOT permutation P.
void conjugate_cnot(std::vector<cplx>& o, std::size_t dim, std::size_t cmask, std::size_t tmask) {
  std::vector<std::size_t> perm(dim);
  for (std::size_t i = 0; i < dim; ++i) perm[i] = (i & cmask) ? (i ^ tmask) : i;
  std::vector<cplx> out(dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = o[perm[i] * dim + perm[j]];
  o.swap(out);
}

}  // namespace

GradientEngine::GradientEngine(ModelSpec spec, ParameterVector theta)
    : spec_(std::move(spec)), theta_(std::move(theta)) {
  spec_.validate();
  if (theta_.size() != spec_.param_count()) {
    throw ConfigError("parameter vector length does not match model");
  }
  ops_ = ansatz_ops(spec_.ansatz);
  gates_.resize(ops_.size());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i].kind == AnsatzOp::Kind::Rotation) {
      gates_[i] = rotation_matrix(ops_[i].axis, theta_[ops_[i].param]);
    }
  }
  shift_up_[0] = rotation_matrix(Axis::Y, kShift);
  shift_up_[1] = rotation_matrix(Axis::Z, kShift);
  shift_down_[0] = rotation_matrix(Axis::Y, -kShift);
  shift_down_[1] = rotation_matrix(Axis::Z, -kShift);

  const StateVector probe(spec_.num_qubits());
  const std::size_t dim = probe.dim();
  Matrix o(dim * dim, cplx(0, 0));
  for (std::size_t b = 0; b < dim; ++b) o[b * dim + b] = parity_sign(b);
  after_.resize(spec_.param_count());
  for (std::size_t i = ops_.size(); i-- > 0;) {
    const auto& op = ops_[i];
    if (op.kind == AnsatzOp::Kind::Rotation) {
      after_[op.param] = o;
      conjugate(o, dim, gates_[i], probe.mask(op.qubit));
    } else {
      conjugate_cnot(o, dim, probe.mask(op.control), probe.mask(op.qubit));
    }
  }
  start_ = std::move(o);
}

double GradientEngine::quadratic_form(const Matrix& o, const StateVector& psi) const {
  const std::size_t dim = psi.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    cplx row(0, 0);
    const cplx* oi = &o[i * dim];
    for (std::size_t j = 0; j < dim; ++j) row += oi[j] * psi[j];
    acc += (std::conj(psi[i]) * row).real();
  }
  return acc;
}

double GradientEngine::output(std::span<const double> x) const {
  const StateVector psi = encode(spec_.encoding, x);
  count_circuit_evaluations(1);
  return quadratic_form(start_, psi);
}

GradientEngine::Outputs GradientEngine::outputs(std::span<const double> x,
                                                std::optional<EncodingShift> shift) const {
  StateVector psi = encode(spec_.encoding, x, shift);
  StateVector scratch = psi;
  Outputs out;
  out.plus.resize(spec_.param_count());
  out.minus.resize(spec_.param_count());
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const auto& op = ops_[i];
    if (op.kind == AnsatzOp::Kind::Cnot) {
      psi.cnot(op.control, op.qubit);
      continue;
    }
    const std::size_t mask = psi.mask(op.qubit);
    psi.apply(gates_[i], op.qubit);
    // Same-axis rotations commute, so R(theta + s) psi_before = R(s) psi_after.
    apply_to(scratch.amplitudes(), psi.amplitudes(), shift_up_[axis_slot(op.axis)], mask);
    out.plus[op.param] = quadratic_form(after_[op.param], scratch);
    apply_to(scratch.amplitudes(), psi.amplitudes(), shift_down_[axis_slot(op.axis)], mask);
    out.minus[op.param] = quadratic_form(after_[op.param], scratch);
  }
  out.value = psi.expectation_z_all();
  count_circuit_evaluations(2 * spec_.param_count() + 1);
  return out;
}

GradientEngine::SingleOutputs GradientEngine::outputs_single(std::span<const double> x, std::size_t j,
                                                             std::optional<EncodingShift> shift) const {
  if (j >= spec_.param_count()) throw IndexError("parameter index out of range");
  StateVector psi = encode(spec_.encoding, x, shift);
  SingleOutputs out;
  out.value = quadratic_form(start_, psi);
  StateVector scratch = psi;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const auto& op = ops_[i];
    if (op.kind == AnsatzOp::Kind::Cnot) {
      psi.cnot(op.control, op.qubit);
      continue;
    }
    psi.apply(gates_[i], op.qubit);
    if (op.param != j) continue;
    const std::size_t mask = psi.mask(op.qubit);
    apply_to(scratch.amplitudes(), psi.amplitudes(), shift_up_[axis_slot(op.axis)], mask);
    out.plus = quadratic_form(after_[j], scratch);
    apply_to(scratch.amplitudes(), psi.amplitudes(), shift_down_[axis_slot(op.axis)], mask);
    out.minus = quadratic_form(after_[j], scratch);
    break;
  }
  count_circuit_evaluations(3);
  return out;
}

GradientVector GradientEngine::cost_gradient(const Sample& sample) const {
  const Outputs o = outputs(sample.x);
  GradientVector g(spec_.param_count());
  const double residual = sample.y - o.value;
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = -residual * (o.plus[j] - o.minus[j]);
  return g;
}

double GradientEngine::cost_gradient_entry(const Sample& sample, std::size_t j) const {
  const SingleOutputs o = outputs_single(sample.x, j);
  return -(sample.y - o.value) * (o.plus - o.minus);
}

GradientEngine::AttackEval GradientEngine::attack_eval(std::span<const double> x_prime, double y,
                                                       const GradientVector& target) const {
  const std::size_t d = spec_.param_count();
  if (target.size() != d) throw ConfigError("target gradient length does not match model");
  const int n = spec_.encoding.n;
  const Outputs base = outputs(x_prime);
  const double residual = y - base.value;

  std::vector<double> c(d);
  AttackEval ev;
  for (std::size_t j = 0; j < d; ++j) {
    c[j] = -residual * (base.plus[j] - base.minus[j]);
    const double diff = c[j] - target[j];
    ev.loss += diff * diff;
  }
  ev.gradient.assign(n, 0.0);
  std::vector<double> dd(d);
  for (int k = 0; k < n; ++k) {
    double dfdx = 0.0;
    std::fill(dd.begin(), dd.end(), 0.0);
    for (int r = 0; r < spec_.encoding.m; ++r) {
      const double w = 0.5 * spec_.encoding.prefactor(r) * spec_.encoding.gamma;
      const Outputs up = outputs(x_prime, EncodingShift{k, r, kShift});
      const Outputs down = outputs(x_prime, EncodingShift{k, r, -kShift});
      dfdx += w * (up.value - down.value);
      for (std::size_t j = 0; j < d; ++j) {
        dd[j] += w * ((up.plus[j] - down.plus[j]) - (up.minus[j] - down.minus[j]));
      }
    }
    double g = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dcj = dfdx * (base.plus[j] - base.minus[j]) - residual * dd[j];
      g += 2.0 * (c[j] - target[j]) * dcj;
    }
    ev.gradient[k] = g;
  }
  return ev;
}

GradientEngine::AttackEval GradientEngine::attack_eval_single(std::span<const double> x_prime,
                                                              double y, double target_j,
                                                              std::size_t j) const {
  const int n = spec_.encoding.n;
  const SingleOutputs base = outputs_single(x_prime, j);
  const double residual = y - base.value;
  const double dj = base.plus - base.minus;
  const double cj = -residual * dj;
  AttackEval ev;
  ev.loss = (cj - target_j) * (cj - target_j);
  ev.gradient.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double dfdx = 0.0;
    double ddj = 0.0;
    for (int r = 0; r < spec_.encoding.m; ++r) {
      const double w = 0.5 * spec_.encoding.prefactor(r) * spec_.encoding.gamma;
      const SingleOutputs up = outputs_single(x_prime, j, EncodingShift{k, r, kShift});
      const SingleOutputs down = outputs_single(x_prime, j, EncodingShift{k, r, -kShift});
      dfdx += w * (up.value - down.value);
      ddj += w * ((up.plus - down.plus) - (up.minus - down.minus));
    }
    ev.gradient[k] = 2.0 * (cj - target_j) * (dfdx * dj - residual * ddj);
  }
  return ev;
}

}  // namespace qflab
