#include "qflab/encoding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <set>
#include <string>

#include "qflab/errors.hpp"

namespace qflab {

namespace {

std::atomic<std::uint64_t> g_out_of_domain{0};

std::int64_t checked_pow(std::int64_t base, int exp, int max_exp, const char* what) {
  if (exp < 0 || exp > max_exp) {
    throw ConfigError(std::string(what) + ": exponent " + std::to_string(exp) +
                      " outside supported range [0, " + std::to_string(max_exp) + "]");
  }
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

double EncodingSpec::prefactor(int level) const {
  return std::pow(static_cast<double>(prefactor_base), level);
}

void EncodingSpec::validate() const {
  if (n < 1 || m < 1) throw ConfigError("encoding needs n >= 1 and m >= 1");
  if (n * m > kMaxQubits) {
    throw ConfigError("encoding uses " + std::to_string(n * m) + " qubits, limit is " +
                      std::to_string(kMaxQubits));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (prefactor_base < 2) throw ConfigError("prefactor base must be >= 2");
}

void apply_encoding(StateVector& state, const EncodingSpec& spec, std::span<const double> x,
                    std::optional<EncodingShift> shift) {
  if (static_cast<int>(x.size()) != spec.n) {
    throw ConfigError("input has dimension " + std::to_string(x.size()) + ", encoding expects " +
                      std::to_string(spec.n));
  }
  if (state.num_qubits() != spec.num_qubits()) {
    throw ConfigError("state qubit count does not match encoding");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("non-finite encoding input");
    if (v < 0.0 || v > 1.0) {
      if (g_out_of_domain.fetch_add(1) == 0) {
        std::cerr << "warning: encoding input " << v << " outside [0, 1]; gates wrap it\n";
      }
    }
  }
  for (int j = 0; j < spec.n; ++j) {
    for (int r = 0; r < spec.m; ++r) {
      double angle = spec.prefactor(r) * spec.gamma * x[j];
      if (shift && shift->input == j && shift->level == r) angle += shift->delta;
      state.rotate(spec.axis, spec.qubit(j, r), angle);
    }
  }
}

StateVector encode(const EncodingSpec& spec, std::span<const double> x,
                   std::optional<EncodingShift> shift) {
  StateVector s(spec.num_qubits());
  apply_encoding(s, spec, x, shift);
  return s;
}

std::uint64_t out_of_domain_encodings() { return g_out_of_domain.load(); }

double tower_eigenvalue(int m, std::span<const int> bits, int base) {
  if (static_cast<int>(bits.size()) != m) {
    throw ConfigError("eigenvector index must have m bits");
  }
  double lambda = 0.0;
  double p = 1.0;
  for (int j = 0; j < m; ++j) {
    lambda += (bits[j] ? -1.0 : 1.0) * p / 2.0;
    p *= base;
  }
  return lambda;
}

std::int64_t max_gradient_frequency(int m) {
  if (m < 1) throw ConfigError("m must be >= 1");
  return (checked_pow(5, m, 12, "max_gradient_frequency") - 1) / 2;
}

std::int64_t gradient_spectrum_size(int n, int m) {
  if (n < 1 || m < 1) throw ConfigError("n and m must be >= 1");
  return (checked_pow(5, n * m, 24, "gradient_spectrum_size") - 1) / 2;
}

std::int64_t gradient_frequency_count(int n, int m) {
  if (n < 1 || m < 1) throw ConfigError("n and m must be >= 1");
  return checked_pow(5, n * m, 24, "gradient_frequency_count");
}

double qubits_for_degree(std::int64_t d_f) {
  if (d_f < 1) throw ConfigError("d_F must be >= 1");
  return std::log(2.0 * static_cast<double>(d_f) + 1.0) / std::log(5.0);
}

std::vector<std::int64_t> frequency_set_bruteforce(int m) {
  if (m < 1 || m > 6) throw ConfigError("frequency_set_bruteforce supports 1 <= m <= 6");
  // Each tower qubit contributes ((-1)^k - (-1)^l + (-1)^y - (-1)^z) / 2 * 5^j
  // independently, so the set is a sum of per-digit sets.
  std::set<int> digit;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) {
          auto s = [](int b) { return b ? -1 : 1; };
          digit.insert((s(k) - s(l) + s(y) - s(z)) / 2);
        }
  std::set<std::int64_t> acc{0};
  std::int64_t p = 1;
  for (int j = 0; j < m; ++j) {
    std::set<std::int64_t> next;
    for (auto a : acc)
      for (int c : digit) next.insert(a + c * p);
    acc.swap(next);
    p *= 5;
  }
  return {acc.begin(), acc.end()};
}

double overlap_probability(const EncodingSpec& spec, double x, double x_prime) {
  if (spec.n != 1) throw ConfigError("overlap_probability requires n = 1");
  if (spec.axis == Axis::Z) throw ConfigError("Z-axis encoding leaves |0> invariant up to phase");
  double amp = 1.0;
  const double delta = spec.gamma * (x - x_prime);
  for (int r = 0; r < spec.m; ++r) amp *= std::cos(spec.prefactor(r) * delta / 2.0);
  return amp * amp;
}

double simulated_overlap(const EncodingSpec& spec, std::span<const double> x,
                         std::span<const double> x_prime) {
  const StateVector a = encode(spec, x);
  const StateVector b = encode(spec, x_prime);
  cplx ip(0, 0);
  for (std::size_t i = 0; i < a.dim(); ++i) ip += std::conj(b[i]) * a[i];
  return std::norm(ip);
}

}  // namespace qflab
