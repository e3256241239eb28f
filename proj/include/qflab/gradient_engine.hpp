#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qflab/qmodel.hpp"

namespace qflab {

// Fast evaluation of y(x, theta) and all parameter-shifted outputs
// y(x, theta +- pi/2 e_j) for a fixed theta.
//
// The observable is evolved backwards through the ansatz once (Heisenberg
// picture), storing Z...Z conjugated by the circuit suffix that follows every
// parameterized gate. Each shifted expectation then costs one dense quadratic
// form instead of a full circuit replay. Results agree with the direct path
// in qmodel.hpp to rounding; evaluations are counted the same way (one per
// expectation value).
class GradientEngine {
 public:
  GradientEngine(ModelSpec spec, ParameterVector theta);

  const ModelSpec& spec() const { return spec_; }
  const ParameterVector& theta() const { return theta_; }

  struct Outputs {
    double value = 0.0;
    std::vector<double> plus;   // y(theta + pi/2 e_j)
    std::vector<double> minus;  // y(theta - pi/2 e_j)
  };
  struct SingleOutputs {
    double value = 0.0;
    double plus = 0.0;
    double minus = 0.0;
  };

  double output(std::span<const double> x) const;
  Outputs outputs(std::span<const double> x, std::optional<EncodingShift> shift = {}) const;
  SingleOutputs outputs_single(std::span<const double> x, std::size_t j,
                               std::optional<EncodingShift> shift = {}) const;

  GradientVector cost_gradient(const Sample& sample) const;
  double cost_gradient_entry(const Sample& sample, std::size_t j) const;

  struct AttackEval {
    double loss = 0.0;
    std::vector<double> gradient;  // dL/dx'_k, k = 0..n-1
  };
  // Full attack loss sum_j (C_j(x') - target_j)^2 and its input gradient.
  AttackEval attack_eval(std::span<const double> x_prime, double y,
                         const GradientVector& target) const;
  // Single-gradient loss (C_j(x') - target_j)^2 and its input gradient.
  AttackEval attack_eval_single(std::span<const double> x_prime, double y, double target_j,
                                std::size_t j) const;

 private:
  using Matrix = std::vector<cplx>;

  double quadratic_form(const Matrix& o, const StateVector& psi) const;

  ModelSpec spec_;
  ParameterVector theta_;
  std::vector<AnsatzOp> ops_;
  std::vector<Gate2> gates_;     // rotation for every op (unused for CNOT)
  std::vector<Matrix> after_;    // indexed by parameter
  Matrix start_;                 // observable seen by the encoded state
  Gate2 shift_up_[2];            // R_Y(pi/2), R_Z(pi/2)
  Gate2 shift_down_[2];
};

}  // namespace qflab
