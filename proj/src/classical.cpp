#include "qflab/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qflab/errors.hpp"

namespace qflab {

void DenseLayer::validate() const {
  if (inputs == 0 || classes == 0) throw ConfigError("dense layer needs n >= 1 and C >= 1");
  if (w.size() != inputs * classes || b.size() != classes) throw ConfigError("dense layer shape mismatch");
  for (double v : w) {
    if (!std::isfinite(v)) throw DomainError("dense layer weights must be finite");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw DomainError("dense layer biases must be finite");
  }
}

ForwardResult forward(const DenseLayer& layer, std::span<const double> x, std::span<const double> y) {
  layer.validate();
  if (x.size() != layer.inputs) throw ConfigError("input length does not match layer");
  if (y.size() != layer.classes) throw ConfigError("label length does not match layer");
  ForwardResult r;
  r.logits = layer.b;
  for (std::size_t i = 0; i < layer.inputs; ++i) {
    for (std::size_t j = 0; j < layer.classes; ++j) r.logits[j] += layer.weight(i, j) * x[i];
  }
  const double top = *std::max_element(r.logits.begin(), r.logits.end());
  double z = 0.0;
  r.probabilities.resize(layer.classes);
  for (std::size_t j = 0; j < layer.classes; ++j) {
    r.probabilities[j] = std::exp(r.logits[j] - top);
    z += r.probabilities[j];
  }
  for (auto& p : r.probabilities) p /= z;
  for (std::size_t j = 0; j < layer.classes; ++j) {
    // log p_j from the shifted logits keeps tiny probabilities finite.
    if (y[j] != 0.0) r.cost -= y[j] * (r.logits[j] - top - std::log(z));
  }
  return r;
}

DenseGradients gradients(const DenseLayer& layer, std::span<const double> x, std::span<const double> y) {
  const ForwardResult f = forward(layer, x, y);
  DenseGradients g;
  g.inputs = layer.inputs;
  g.classes = layer.classes;
  g.db.resize(layer.classes);
  g.dw.resize(layer.inputs * layer.classes);
  for (std::size_t j = 0; j < layer.classes; ++j) g.db[j] = f.probabilities[j] - y[j];
  for (std::size_t i = 0; i < layer.inputs; ++i) {
    for (std::size_t j = 0; j < layer.classes; ++j) g.dw[i * layer.classes + j] = g.db[j] * x[i];
  }
  return g;
}

DenseGradients batch_gradients(const DenseLayer& layer, std::span<const std::vector<double>> xs,
                               std::span<const std::vector<double>> ys) {
  if (xs.empty() || xs.size() != ys.size()) throw ConfigError("batch needs matching non-empty x and y lists");
  DenseGradients acc;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const auto g = gradients(layer, xs[s], ys[s]);
    if (s == 0) {
      acc = g;
      continue;
    }
    for (std::size_t k = 0; k < g.dw.size(); ++k) acc.dw[k] += g.dw[k];
    for (std::size_t k = 0; k < g.db.size(); ++k) acc.db[k] += g.db[k];
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (auto& v : acc.dw) v *= inv;
  for (auto& v : acc.db) v *= inv;
  return acc;
}

std::vector<double> invert_from_gradients(const DenseGradients& g) {
  if (g.db.size() != g.classes || g.dw.size() != g.inputs * g.classes || g.classes == 0) {
    throw ConfigError("gradient shapes are inconsistent");
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < g.classes; ++j) {
    if (std::abs(g.db[j]) > std::abs(g.db[best])) best = j;
  }
  if (!(std::abs(g.db[best]) > 1e-12)) {
    throw InversionError("all bias gradients vanish; the input cannot be recovered");
  }
  std::vector<double> x(g.inputs);
  for (std::size_t i = 0; i < g.inputs; ++i) x[i] = g.dw[i * g.classes + best] / g.db[best];
  return x;
}

CountReport count_report(std::size_t n, std::size_t classes, std::size_t batch) {
  if (n == 0 || classes == 0 || batch == 0) throw ConfigError("count report needs positive sizes");
  CountReport r;
  r.equations = n * classes + classes;
  r.unknowns = batch * (n + classes);
  r.underdetermined = r.unknowns > r.equations;
  return r;
}

DenseLayer random_layer(std::size_t n, std::size_t classes, Rng& rng) {
  DenseLayer l(n, classes);
  for (auto& v : l.w) v = rng.uniform(-1.0, 1.0);
  for (auto& v : l.b) v = rng.uniform(-1.0, 1.0);
  return l;
}

std::vector<double> one_hot(std::size_t classes, std::size_t k) {
  if (k >= classes) throw IndexError("class index out of range");
  std::vector<double> y(classes, 0.0);
  y[k] = 1.0;
  return y;
}

ClassicalDemo classical_demo(std::size_t n, std::size_t classes, std::size_t instances, std::uint64_t seed) {
  if (instances == 0) throw ConfigError("classical demo needs at least one instance");
  Rng rng(seed);
  ClassicalDemo d;
  d.instances = instances;
  constexpr double h = 1e-6;
  for (std::size_t t = 0; t < instances; ++t) {
    DenseLayer layer = random_layer(n, classes, rng);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const auto y = one_hot(classes, rng.index(classes));
    const auto g = gradients(layer, x, y);
    const auto rec = invert_from_gradients(g);
    for (std::size_t i = 0; i < n; ++i) d.max_recovery_error = std::max(d.max_recovery_error, std::abs(rec[i] - x[i]));

    for (std::size_t k = 0; k < layer.w.size(); ++k) {
      const double keep = layer.w[k];
      layer.w[k] = keep + h;
      const double up = forward(layer, x, y).cost;
      layer.w[k] = keep - h;
      const double dn = forward(layer, x, y).cost;
      layer.w[k] = keep;
      d.max_fd_error = std::max(d.max_fd_error, std::abs((up - dn) / (2 * h) - g.dw[k]));
    }
    for (std::size_t k = 0; k < layer.b.size(); ++k) {
      const double keep = layer.b[k];
      layer.b[k] = keep + h;
      const double up = forward(layer, x, y).cost;
      layer.b[k] = keep - h;
      const double dn = forward(layer, x, y).cost;
      layer.b[k] = keep;
      d.max_fd_error = std::max(d.max_fd_error, std::abs((up - dn) / (2 * h) - g.db[k]));
    }
  }
  d.batch2 = count_report(n, classes, 2);
  return d;
}

}  // namespace qflab
