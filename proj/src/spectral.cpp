#include "qflab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "qflab/encoding.hpp"
#include "qflab/errors.hpp"
#include "qflab/gradient_engine.hpp"

namespace qflab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ConfigError("bound overflows 64-bit integers");
  return r;
}

std::int64_t checked_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

void check_nm(int n, int m) {
  if (n < 1 || m < 1) throw ConfigError("n and m must be >= 1");
}

// (1/N) sum_k s_k exp(-2 pi i w k / N) for w in [-d, d].
std::vector<cplx> dft(const std::vector<double>& s, std::int64_t d) {
  const std::size_t N = s.size();
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(2 * d + 1));
  for (std::int64_t w = -d; w <= d; ++w) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < N; ++k) {
      // Reduce w k mod N before scaling to keep the phase argument small.
      const auto p = static_cast<std::int64_t>((w * static_cast<std::int64_t>(k)) %
                                               static_cast<std::int64_t>(N));
      const double phase = -kTwoPi * static_cast<double>(p) / static_cast<double>(N);
      acc += s[k] * cplx(std::cos(phase), std::sin(phase));
    }
    out.push_back(acc / static_cast<double>(N));
  }
  return out;
}

}  // namespace

cplx FourierSpectrum::coefficient(std::int64_t w) const {
  if (w < -d_f || w > d_f) return {0.0, 0.0};
  return coefficients[static_cast<std::size_t>(w + d_f)];
}

double FourierSpectrum::evaluate(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const double ph = static_cast<double>(frequencies[i]) * gamma * x;
    s += coefficients[i].real() * std::cos(ph) - coefficients[i].imag() * std::sin(ph);
  }
  return s;
}

FourierSpectrum extract_spectrum(const std::function<double(double)>& signal, std::int64_t d_f,
                                 double gamma, double tolerance) {
  if (d_f < 1) throw ConfigError("d_F must be >= 1");
  if (d_f > 100000) throw ConfigError("d_F too large for direct extraction");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  const auto N = static_cast<std::size_t>(2 * d_f + 1);
  const double period = kTwoPi / gamma;
  std::vector<double> s(N);
  for (std::size_t k = 0; k < N; ++k) s[k] = signal(period * static_cast<double>(k) / N);

  FourierSpectrum out;
  out.d_f = d_f;
  out.gamma = gamma;
  for (std::int64_t w = -d_f; w <= d_f; ++w) out.frequencies.push_back(w);
  out.coefficients = dft(s, d_f);

  for (std::size_t k = 0; k < N; ++k) {
    const double x = period * (static_cast<double>(k) + 0.5) / N;
    out.max_abs_residual = std::max(out.max_abs_residual, std::abs(out.evaluate(x) - signal(x)));
  }
  if (!(out.max_abs_residual <= tolerance)) {
    throw AliasingError("spectrum reconstruction residual " + std::to_string(out.max_abs_residual) +
                        " exceeds tolerance; d_F = " + std::to_string(d_f) + " is too small");
  }
  return out;
}

cplx FourierSpectrum2D::coefficient(std::int64_t w1, std::int64_t w2) const {
  if (std::abs(w1) > d_f || std::abs(w2) > d_f) return {0.0, 0.0};
  const auto side = static_cast<std::size_t>(2 * d_f + 1);
  return coefficients[static_cast<std::size_t>(w1 + d_f) * side + static_cast<std::size_t>(w2 + d_f)];
}

double FourierSpectrum2D::evaluate(double x1, double x2) const {
  double s = 0.0;
  for (std::int64_t a = -d_f; a <= d_f; ++a) {
    for (std::int64_t b = -d_f; b <= d_f; ++b) {
      const cplx c = coefficient(a, b);
      const double ph = gamma * (static_cast<double>(a) * x1 + static_cast<double>(b) * x2);
      s += c.real() * std::cos(ph) - c.imag() * std::sin(ph);
    }
  }
  return s;
}

FourierSpectrum2D extract_spectrum_2d(const std::function<double(double, double)>& signal,
                                      std::int64_t d_f, double gamma, double tolerance) {
  if (d_f < 1 || d_f > 24) throw ConfigError("2D extraction supports 1 <= d_F <= 24");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  const auto N = static_cast<std::size_t>(2 * d_f + 1);
  const double period = kTwoPi / gamma;
  std::vector<double> grid(N * N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) {
      grid[a * N + b] = signal(period * static_cast<double>(a) / N, period * static_cast<double>(b) / N);
    }
  }
  // Separable transform: rows by x2 first, then columns by x1.
  std::vector<cplx> rows(N * N);
  for (std::size_t a = 0; a < N; ++a) {
    std::vector<double> r(grid.begin() + static_cast<std::ptrdiff_t>(a * N),
                          grid.begin() + static_cast<std::ptrdiff_t>((a + 1) * N));
    const auto t = dft(r, d_f);
    std::copy(t.begin(), t.end(), rows.begin() + static_cast<std::ptrdiff_t>(a * N));
  }
  FourierSpectrum2D out;
  out.d_f = d_f;
  out.gamma = gamma;
  out.coefficients.assign(N * N, cplx{});
  for (std::size_t w2 = 0; w2 < N; ++w2) {
    for (std::size_t w1 = 0; w1 < N; ++w1) {
      const std::int64_t freq = static_cast<std::int64_t>(w1) - d_f;
      cplx acc{0.0, 0.0};
      for (std::size_t a = 0; a < N; ++a) {
        const auto p = ((freq * static_cast<std::int64_t>(a)) % static_cast<std::int64_t>(N));
        const double phase = -kTwoPi * static_cast<double>(p) / static_cast<double>(N);
        acc += rows[a * N + w2] * cplx(std::cos(phase), std::sin(phase));
      }
      out.coefficients[w1 * N + w2] = acc / static_cast<double>(N);
    }
  }
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) {
      const double x1 = period * (static_cast<double>(a) + 0.5) / N;
      const double x2 = period * (static_cast<double>(b) + 0.5) / N;
      out.max_abs_residual = std::max(out.max_abs_residual, std::abs(out.evaluate(x1, x2) - signal(x1, x2)));
    }
  }
  if (!(out.max_abs_residual <= tolerance)) {
    throw AliasingError("2D spectrum reconstruction residual " + std::to_string(out.max_abs_residual) +
                        " exceeds tolerance");
  }
  return out;
}

SupportReport verify_gradient_support(const ModelSpec& spec, const ParameterVector& theta,
                                      const Sample& sample, std::size_t j) {
  spec.validate();
  if (spec.encoding.n != 1) throw ConfigError("gradient support check is univariate (n = 1)");
  if (spec.encoding.m > 3) throw ConfigError("gradient support check supports m <= 3");
  if (spec.encoding.prefactor_base != 5) throw ConfigError("gradient support check assumes base 5");
  if (j >= spec.param_count()) throw IndexError("gradient index out of range");
  const GradientEngine engine(spec, theta);
  const double y = sample.y;
  auto signal = [&](double x) {
    const double xv[1] = {x};
    const auto o = engine.outputs_single(xv, j);
    return -(y - o.value) * (o.plus - o.minus);
  };

  SupportReport r;
  r.predicted = max_gradient_frequency(spec.encoding.m);
  // Exact-Nyquist extraction must reconstruct without aliasing...
  extract_spectrum(signal, r.predicted, spec.encoding.gamma);
  // ...and with headroom nothing may live beyond d_F.
  r.spectrum = extract_spectrum(signal, 2 * r.predicted, spec.encoding.gamma);
  for (std::int64_t w = 0; w <= r.spectrum.d_f; ++w) {
    const double mag = std::max(std::abs(r.spectrum.coefficient(w)), std::abs(r.spectrum.coefficient(-w)));
    if (mag > kCoefficientThreshold) r.observed_max_frequency = w;
    if (w > r.predicted) r.max_beyond_predicted = std::max(r.max_beyond_predicted, mag);
  }
  r.pass = r.observed_max_frequency <= r.predicted;
  return r;
}

SupportReport2D verify_gradient_support_2d(const ModelSpec& spec, const ParameterVector& theta,
                                           const Sample& sample, std::size_t j) {
  spec.validate();
  if (spec.encoding.n != 2) throw ConfigError("bivariate support check needs n = 2");
  if (spec.encoding.m > 2) throw ConfigError("bivariate support check supports m <= 2");
  if (spec.encoding.prefactor_base != 5) throw ConfigError("gradient support check assumes base 5");
  if (j >= spec.param_count()) throw IndexError("gradient index out of range");
  const GradientEngine engine(spec, theta);
  const double y = sample.y;
  auto signal = [&](double x1, double x2) {
    const double xv[2] = {x1, x2};
    const auto o = engine.outputs_single(xv, j);
    return -(y - o.value) * (o.plus - o.minus);
  };
  SupportReport2D r;
  r.predicted = max_gradient_frequency(spec.encoding.m);
  extract_spectrum_2d(signal, r.predicted, spec.encoding.gamma);
  r.spectrum = extract_spectrum_2d(signal, 2 * r.predicted, spec.encoding.gamma);
  const std::int64_t d = r.spectrum.d_f;
  for (std::int64_t a = -d; a <= d; ++a) {
    for (std::int64_t b = -d; b <= d; ++b) {
      const double mag = std::abs(r.spectrum.coefficient(a, b));
      const std::int64_t w = std::max(std::abs(a), std::abs(b));
      if (mag > kCoefficientThreshold) r.observed_max_frequency = std::max(r.observed_max_frequency, w);
      if (w > r.predicted) r.max_beyond_predicted = std::max(r.max_beyond_predicted, mag);
    }
  }
  r.pass = r.observed_max_frequency <= r.predicted;
  return r;
}

std::int64_t chebyshev_max_degree(int n, int m) {
  check_nm(n, m);
  return checked_pow(max_gradient_frequency(m), n);
}

std::int64_t bezout_minima_bound(int n, int m) {
  check_nm(n, m);
  return checked_mul(checked_pow(4, n), checked_pow(max_gradient_frequency(m), static_cast<std::int64_t>(n) * n));
}

std::int64_t nyquist_sample_count(int n, int m) {
  check_nm(n, m);
  return checked_pow(2 * max_gradient_frequency(m), n);
}

BigBound buchberger_bound(int n, int m) {
  using boost::multiprecision::cpp_int;
  check_nm(n, m);
  if (n > 4) throw ConfigError("Buchberger bound supports n <= 4");
  const std::int64_t delta = chebyshev_max_degree(n, m);
  const cpp_int D = delta;
  // D is even for every m, so D^2 / 2 is exact.
  const cpp_int base = D * D / 2 + D;
  const unsigned exponent = 1u << (2 * n - 2);
  const cpp_int value = 2 * boost::multiprecision::pow(base, exponent);

  BigBound b;
  b.decimal = value.str();
  b.log2 = 1.0 + static_cast<double>(exponent) * std::log2(static_cast<double>(base));
  if (value < (cpp_int(1) << 63)) b.value = static_cast<std::int64_t>(value);
  return b;
}

BoundsRow bounds_row(int n, int m) {
  BoundsRow r;
  r.n = n;
  r.m = m;
  r.d_f = max_gradient_frequency(m);
  r.k_g = gradient_spectrum_size(n, m);
  r.chebyshev = chebyshev_max_degree(n, m);
  r.bezout = bezout_minima_bound(n, m);
  r.buchberger = buchberger_bound(n, m);
  r.nyquist = nyquist_sample_count(n, m);
  return r;
}

}  // namespace qflab
