#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qflab/encoding.hpp"
#include "qflab/errors.hpp"
#include "qflab/landscape.hpp"
#include "qflab/spectral.hpp"

using namespace qflab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Spectrum, Constant) {
  const auto s = extract_spectrum([](double) { return 3.0; }, 2);
  EXPECT_NEAR(s.coefficient(0).real(), 3.0, 1e-12);
  for (std::int64_t w : {-2, -1, 1, 2}) EXPECT_NEAR(std::abs(s.coefficient(w)), 0.0, 1e-12);
}

TEST(Spectrum, Cosine) {
  const auto s = extract_spectrum([](double x) { return std::cos(2 * kPi * 3 * x); }, 4);
  EXPECT_NEAR(s.coefficient(3).real(), 0.5, 1e-12);
  EXPECT_NEAR(s.coefficient(-3).real(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(s.coefficient(1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.coefficient(4)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.coefficient(7)), 0.0, 0.0);  // outside the range reads as zero
}

TEST(Spectrum, AliasingDetected) {
  EXPECT_THROW(extract_spectrum([](double x) { return std::cos(2 * kPi * 5 * x); }, 3), AliasingError);
  EXPECT_THROW(extract_spectrum([](double) { return 1.0; }, 0), ConfigError);
}

TEST(Spectrum, CustomGamma) {
  const double g = 3.0;
  const auto s = extract_spectrum([&](double x) { return std::sin(2 * g * x); }, 3, g);
  EXPECT_NEAR(s.coefficient(2).imag(), -0.5, 1e-12);
  EXPECT_NEAR(s.coefficient(-2).imag(), 0.5, 1e-12);
}

TEST(Spectrum, GradientSignalConjugateSymmetricAndReconstructs) {
  Rng rng(21);
  for (int m = 1; m <= 3; ++m) {
    const auto spec = make_model(1, m);
    const auto theta = random_parameters(spec.ansatz, rng);
    const Sample s{{rng.uniform()}, rng.sign()};
    const std::size_t j = random_gradient_index(spec.ansatz, rng);
    auto signal = [&](double x) { return cost_gradient(spec, Sample{{x}, s.y}, theta)[j]; };
    const auto sp = extract_spectrum(signal, max_gradient_frequency(m));
    for (std::int64_t w = 0; w <= sp.d_f; ++w) {
      EXPECT_NEAR(std::abs(sp.coefficient(w) - std::conj(sp.coefficient(-w))), 0.0, 1e-9);
    }
    for (int i = 0; i < 101; ++i) {
      const double x = (i + 0.37) / 101.0;
      EXPECT_NEAR(sp.evaluate(x), signal(x), 1e-7);
    }
  }
}

// Support is verified from the actual circuit, not the analytic frequency set.
TEST(Spectrum, GradientSupportWithinPrediction) {
  for (int m = 1; m <= 3; ++m) {
    Rng rng(100 + m);
    const auto spec = make_model(1, m);
    for (int seed = 0; seed < 10; ++seed) {
      const auto theta = random_parameters(spec.ansatz, rng);
      const Sample s{{rng.uniform()}, rng.sign()};
      const auto rep = verify_gradient_support(spec, theta, s, random_gradient_index(spec.ansatz, rng));
      EXPECT_TRUE(rep.pass) << "m=" << m << " seed=" << seed;
      EXPECT_EQ(rep.predicted, max_gradient_frequency(m));
      EXPECT_LE(rep.observed_max_frequency, rep.predicted);
      EXPECT_LT(rep.max_beyond_predicted, kCoefficientThreshold);
    }
  }
}

TEST(Spectrum, TwoQubitTowerReachesHighFrequencies) {
  Rng rng(31);
  const auto spec = make_model(1, 2);
  int high = 0;
  for (int t = 0; t < 20; ++t) {
    const auto theta = random_parameters(spec.ansatz, rng);
    const Sample s{{rng.uniform()}, rng.sign()};
    const auto rep = verify_gradient_support(spec, theta, s, random_gradient_index(spec.ansatz, rng));
    if (rep.observed_max_frequency > 4) ++high;
  }
  EXPECT_GE(high, 1);
}

TEST(Spectrum, SupportGuards) {
  Rng rng(1);
  const auto spec4 = make_model(1, 4, 1);
  EXPECT_THROW(verify_gradient_support(spec4, random_parameters(spec4.ansatz, rng), Sample{{0.1}, 1.0}, 0),
               ConfigError);
  const auto spec = make_model(1, 1, 1);
  EXPECT_THROW(verify_gradient_support(spec, random_parameters(spec.ansatz, rng), Sample{{0.1}, 1.0}, 99),
               IndexError);
}

TEST(Spectrum2D, SeparableProduct) {
  auto f = [](double a, double b) { return std::cos(2 * kPi * a) * std::sin(2 * kPi * 2 * b); };
  const auto s = extract_spectrum_2d(f, 2);
  // cos(u) sin(2v) = (e^{iu} + e^{-iu})(e^{2iv} - e^{-2iv}) / (4i)
  EXPECT_NEAR(s.coefficient(1, 2).imag(), -0.25, 1e-12);
  EXPECT_NEAR(s.coefficient(1, -2).imag(), 0.25, 1e-12);
  EXPECT_NEAR(std::abs(s.coefficient(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(s.evaluate(0.3, 0.71), f(0.3, 0.71), 1e-12);
  EXPECT_THROW(extract_spectrum_2d(f, 25), ConfigError);
  EXPECT_THROW(extract_spectrum_2d(f, 1), AliasingError);
}

TEST(Spectrum2D, GradientSupport) {
  Rng rng(41);
  for (int m = 1; m <= 2; ++m) {
    const auto spec = make_model(2, m);
    for (int t = 0; t < 2; ++t) {
      const auto theta = random_parameters(spec.ansatz, rng);
      const Sample s{{rng.uniform(), rng.uniform()}, rng.sign()};
      const auto rep = verify_gradient_support_2d(spec, theta, s, random_gradient_index(spec.ansatz, rng));
      EXPECT_TRUE(rep.pass);
      EXPECT_LE(rep.observed_max_frequency, max_gradient_frequency(m));
    }
  }
}

TEST(Bounds, DegreeAndCounts) {
  EXPECT_EQ(chebyshev_max_degree(1, 1), 2);
  EXPECT_EQ(chebyshev_max_degree(1, 3), 62);
  EXPECT_EQ(chebyshev_max_degree(2, 2), 144);
  EXPECT_EQ(bezout_minima_bound(1, 1), 8);
  EXPECT_EQ(bezout_minima_bound(1, 2), 48);
  EXPECT_EQ(bezout_minima_bound(1, 3), 248);
  EXPECT_EQ(bezout_minima_bound(2, 1), 256);
  EXPECT_EQ(bezout_minima_bound(2, 2), 331776);
  EXPECT_EQ(bezout_minima_bound(2, 6), 59589387451109376LL);
  EXPECT_EQ(nyquist_sample_count(1, 3), 124);
  EXPECT_EQ(nyquist_sample_count(2, 2), 576);
  EXPECT_EQ(nyquist_sample_count(2, 6), 244109376);
}

TEST(Bounds, Buchberger) {
  EXPECT_EQ(buchberger_bound(1, 1).value, 8);
  EXPECT_EQ(buchberger_bound(1, 2).value, 168);
  EXPECT_EQ(buchberger_bound(1, 6).value, 61042968);
  EXPECT_EQ(buchberger_bound(2, 1).value, 41472);
  EXPECT_EQ(buchberger_bound(2, 2).value, 24421447657193472LL);
  const auto big = buchberger_bound(2, 6);
  EXPECT_FALSE(big.value.has_value());
  EXPECT_EQ(big.decimal, "24049487383550182206740553056218222876413743988174519953129472");
  EXPECT_NEAR(big.log2, std::log2(2.4049487383550182e61), 1e-9);
  EXPECT_EQ(buchberger_bound(2, 3).decimal, "5971461664945520545579049472");
  EXPECT_THROW(buchberger_bound(5, 1), ConfigError);
}

TEST(Bounds, Guards) {
  EXPECT_THROW(chebyshev_max_degree(0, 1), ConfigError);
  EXPECT_THROW(bezout_minima_bound(1, 0), ConfigError);
  EXPECT_THROW(bezout_minima_bound(4, 6), ConfigError);  // overflows int64
}

TEST(Bounds, Row) {
  const auto r = bounds_row(1, 3);
  EXPECT_EQ(r.d_f, 62);
  EXPECT_EQ(r.k_g, 62);
  EXPECT_EQ(r.chebyshev, 62);
  EXPECT_EQ(r.bezout, 248);
  EXPECT_EQ(r.buchberger.value, 3968);
  EXPECT_EQ(r.nyquist, 124);
}
