#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qflab/rng.hpp"

namespace qflab {

// Dense softmax layer o_j = sum_i w_ij x_i + b_j; weights row-major n x C.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t classes = 0;
  std::vector<double> w;
  std::vector<double> b;

  DenseLayer() = default;
  DenseLayer(std::size_t n, std::size_t c) : inputs(n), classes(c), w(n * c, 0.0), b(c, 0.0) {}
  double& weight(std::size_t i, std::size_t j) { return w[i * classes + j]; }
  double weight(std::size_t i, std::size_t j) const { return w[i * classes + j]; }
  void validate() const;
};

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> probabilities;
  double cost = 0.0;  // cross-entropy against y
};

ForwardResult forward(const DenseLayer& layer, std::span<const double> x, std::span<const double> y);

struct DenseGradients {
  std::size_t inputs = 0;
  std::size_t classes = 0;
  std::vector<double> dw;  // (p_j - y_j) x_i, row-major
  std::vector<double> db;  // p_j - y_j
};

DenseGradients gradients(const DenseLayer& layer, std::span<const double> x, std::span<const double> y);

// Averaged gradients over a batch of (x, y) pairs.
DenseGradients batch_gradients(const DenseLayer& layer, std::span<const std::vector<double>> xs,
                               std::span<const std::vector<double>> ys);

// x_i = dW_ij / db_j with j = argmax |db_j|. Throws InversionError when every
// |db_j| <= 1e-12.
std::vector<double> invert_from_gradients(const DenseGradients& g);

// Equations shared vs unknowns to recover for a batch of B samples.
struct CountReport {
  std::size_t equations = 0;  // n C + C
  std::size_t unknowns = 0;   // B (n + C)
  bool underdetermined = false;
};
CountReport count_report(std::size_t n, std::size_t classes, std::size_t batch);

DenseLayer random_layer(std::size_t n, std::size_t classes, Rng& rng);
std::vector<double> one_hot(std::size_t classes, std::size_t k);

struct ClassicalDemo {
  std::size_t instances = 0;
  double max_recovery_error = 0.0;
  double max_fd_error = 0.0;  // closed-form gradients against central differences
  CountReport batch2;
};
ClassicalDemo classical_demo(std::size_t n, std::size_t classes, std::size_t instances, std::uint64_t seed);

}  // namespace qflab
