#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "qflab/statevector.hpp"

namespace qflab {

// Fourier tower map: input dimension j is carried by m qubits, the r-th of
// which (0-based) receives R_axis(base^r * gamma * x_j).
struct EncodingSpec {
  int n = 1;
  int m = 1;
  double gamma = 2.0 * std::numbers::pi;
  int prefactor_base = 5;
  Axis axis = Axis::X;

  int num_qubits() const { return n * m; }
  int qubit(int input, int level) const { return input * m + level; }
  double prefactor(int level) const;
  // Input-space length of one full period of gamma * x.
  double period() const { return 2.0 * std::numbers::pi / gamma; }
  void validate() const;
};

// Extra angle added to a single encoding gate; used by the per-gate chain
// rule for input derivatives.
struct EncodingShift {
  int input = 0;
  int level = 0;
  double delta = 0.0;
};

void apply_encoding(StateVector& state, const EncodingSpec& spec, std::span<const double> x,
                    std::optional<EncodingShift> shift = std::nullopt);
StateVector encode(const EncodingSpec& spec, std::span<const double> x,
                   std::optional<EncodingShift> shift = std::nullopt);

// Number of encodings performed with an input outside [0, 1]. Such inputs are
// legal (attack iterates wander) and only reported.
std::uint64_t out_of_domain_encodings();

// Generator eigenvalue sum_j (-1)^{bits_j} base^j / 2 for eigenvector `bits`
// (bits[0] is the lowest-prefactor qubit).
double tower_eigenvalue(int m, std::span<const int> bits, int base = 5);

// (5^m - 1) / 2, the largest cost-gradient frequency per input dimension.
std::int64_t max_gradient_frequency(int m);
// (5^{nm} - 1) / 2.
std::int64_t gradient_spectrum_size(int n, int m);
// 5^{nm}, the number of distinct gradient frequencies (|Omega_g|^n).
std::int64_t gradient_frequency_count(int n, int m);
// log_5(2 d_F + 1).
double qubits_for_degree(std::int64_t d_f);

// All attainable gradient frequencies (lambda_k - lambda_l) + (lambda_y - lambda_z)
// for a single input dimension with m tower qubits. Sorted, unique.
std::vector<std::int64_t> frequency_set_bruteforce(int m);

// |prod_r cos(base^r * gamma * (x - x') / 2)|^2 for n = 1.
double overlap_probability(const EncodingSpec& spec, double x, double x_prime);
// |<0| U^dagger(x') U(x) |0>|^2 evaluated on the simulator.
double simulated_overlap(const EncodingSpec& spec, std::span<const double> x,
                         std::span<const double> x_prime);

}  // namespace qflab
