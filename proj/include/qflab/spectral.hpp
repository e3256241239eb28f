#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qflab/qmodel.hpp"
#include "qflab/statevector.hpp"

namespace qflab {

// Integer-frequency Fourier series s(x) = sum_w A_w exp(i w gamma x).
struct FourierSpectrum {
  std::int64_t d_f = 0;
  double gamma = 2.0 * std::numbers::pi;
  std::vector<std::int64_t> frequencies;  // -d_f .. d_f
  std::vector<cplx> coefficients;
  double max_abs_residual = 0.0;          // off-grid reconstruction error

  cplx coefficient(std::int64_t w) const;
  double evaluate(double x) const;
};

// Samples the signal at 2 d_F + 1 equispaced points of one period and inverts
// the DFT. The result is then checked at the midpoints between samples; a
// residual above `tolerance` means d_F was too small and raises AliasingError.
FourierSpectrum extract_spectrum(const std::function<double(double)>& signal, std::int64_t d_f,
                                 double gamma = 2.0 * std::numbers::pi, double tolerance = 1e-6);

// Tensor-grid version for two inputs. Coefficients are row-major over
// (w1, w2) in [-d_f, d_f]^2. Limited to d_f <= 24, i.e. m <= 2 with headroom.
struct FourierSpectrum2D {
  std::int64_t d_f = 0;
  double gamma = 2.0 * std::numbers::pi;
  std::vector<cplx> coefficients;
  double max_abs_residual = 0.0;

  cplx coefficient(std::int64_t w1, std::int64_t w2) const;
  double evaluate(double x1, double x2) const;
};

FourierSpectrum2D extract_spectrum_2d(const std::function<double(double, double)>& signal,
                                      std::int64_t d_f, double gamma = 2.0 * std::numbers::pi,
                                      double tolerance = 1e-6);

struct SupportReport {
  std::int64_t observed_max_frequency = 0;  // largest |w| with |A_w| > threshold
  std::int64_t predicted = 0;               // (5^m - 1) / 2
  double max_beyond_predicted = 0.0;        // largest |A_w| for |w| > predicted
  bool pass = false;
  FourierSpectrum spectrum;                 // extracted with 2 d_F headroom
};

inline constexpr double kCoefficientThreshold = 1e-7;

// Spectrum of x -> dCost/dtheta_j for a univariate model (n = 1, m <= 3).
SupportReport verify_gradient_support(const ModelSpec& spec, const ParameterVector& theta,
                                      const Sample& sample, std::size_t j);

struct SupportReport2D {
  std::int64_t observed_max_frequency = 0;  // max(|w1|, |w2|) over coefficients above threshold
  std::int64_t predicted = 0;
  double max_beyond_predicted = 0.0;
  bool pass = false;
  FourierSpectrum2D spectrum;
};

// Bivariate variant (n = 2, m <= 2).
SupportReport2D verify_gradient_support_2d(const ModelSpec& spec, const ParameterVector& theta,
                                           const Sample& sample, std::size_t j);

// ((5^m - 1) / 2)^n.
std::int64_t chebyshev_max_degree(int n, int m);
// 4^n ((5^m - 1) / 2)^{n^2}.
std::int64_t bezout_minima_bound(int n, int m);
// (5^m - 1)^n.
std::int64_t nyquist_sample_count(int n, int m);

// 2 (D^2 / 2 + D)^{2^{N - 2}} with D the Chebyshev degree and N = 2n unknowns.
struct BigBound {
  std::string decimal;                  // exact value
  double log2 = 0.0;
  std::optional<std::int64_t> value;    // set when the bound is below 2^63
};
BigBound buchberger_bound(int n, int m);

struct BoundsRow {
  int n = 0;
  int m = 0;
  std::int64_t d_f = 0;
  std::int64_t k_g = 0;
  std::int64_t chebyshev = 0;
  std::int64_t bezout = 0;
  BigBound buchberger;
  std::int64_t nyquist = 0;
};
BoundsRow bounds_row(int n, int m);

}  // namespace qflab
