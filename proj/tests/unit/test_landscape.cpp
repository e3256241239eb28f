#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qflab/errors.hpp"
#include "qflab/landscape.hpp"

using namespace qflab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Scan, CosineExtremaCounts) {
  for (int k = 1; k <= 5; ++k) {
    const auto p = scan_signal([&](double x) { return std::cos(2 * kPi * k * x); }, 120 * k);
    EXPECT_EQ(p.minima_count(), static_cast<std::size_t>(k));
    EXPECT_EQ(p.maxima.size(), static_cast<std::size_t>(k));
    EXPECT_NEAR(p.valley_width, 1.0 / (2 * k), 1e-12);
    EXPECT_NEAR(p.valley_width_angle, kPi / k, 1e-12);
  }
}

TEST(Scan, WrapAroundMaximumAtOrigin) {
  const auto p = scan_signal([](double x) { return std::cos(2 * kPi * x); }, 100);
  ASSERT_EQ(p.maxima.size(), 1u);
  EXPECT_EQ(p.maxima[0], 0u);
  ASSERT_EQ(p.minima.size(), 1u);
  EXPECT_EQ(p.minima[0], 50u);
  EXPECT_EQ(p.global_min, 50u);
}

TEST(Scan, MinimaDistances) {
  const auto p = scan_signal([](double x) { return std::cos(2 * kPi * 3 * x); }, 600);
  auto d = p.minima_distances;
  std::sort(d.begin(), d.end());
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], 0.0, 1e-12);
  EXPECT_NEAR(d[1], 2 * kPi / 3, 1e-12);
  EXPECT_NEAR(d[2], 2 * kPi / 3, 1e-12);
}

TEST(Scan, PlateauFlagged) {
  const auto p = scan_signal([](double) { return 1.0; }, 10);
  EXPECT_TRUE(p.plateau);
  EXPECT_EQ(p.minima_count(), 0u);
  EXPECT_TRUE(std::isnan(p.valley_width));
}

TEST(Scan, TwoDimensional) {
  const std::size_t res = 40;
  std::vector<double> v(res * res);
  for (std::size_t r = 0; r < res; ++r) {
    for (std::size_t c = 0; c < res; ++c) {
      v[r * res + c] = std::cos(2 * kPi * r / res) + std::cos(2 * kPi * c / res);
    }
  }
  const auto p = profile_from_grid(v, 2, res, 1.0);
  ASSERT_EQ(p.minima_count(), 1u);  // saddles are not minima
  EXPECT_EQ(p.maxima.size(), 1u);
  EXPECT_EQ(p.global_min, 20 * res + 20);
  EXPECT_NEAR(p.valley_width_angle, std::hypot(20.0, 20.0) * 2 * kPi / res, 1e-12);
  const auto xy = p.coordinates(p.global_min);
  EXPECT_NEAR(xy[0], 0.5, 1e-15);
  EXPECT_NEAR(xy[1], 0.5, 1e-15);
}

TEST(Scan, GridValidation) {
  EXPECT_THROW(profile_from_grid({1, 2}, 1, 2, 1.0), ConfigError);
  EXPECT_THROW(profile_from_grid({1, 2, 3}, 3, 3, 1.0), ConfigError);
  EXPECT_THROW(profile_from_grid({1, 2, 3}, 1, 4, 1.0), ConfigError);
}

TEST(Landscape, ResolutionRule) {
  EXPECT_EQ(required_resolution(1), 50u);
  EXPECT_EQ(required_resolution(2), 250u);
  EXPECT_EQ(required_resolution(3), 1250u);
  EXPECT_EQ(required_resolution(1, 20), 100u);
  Rng rng(1);
  const auto spec = make_model(1, 2);
  const auto theta = random_parameters(spec.ansatz, rng);
  EXPECT_THROW(scan_landscape(spec, theta, Sample{{0.3}, 1.0}, 0, 249), ConfigError);
  EXPECT_THROW(scan_landscape(spec, theta, Sample{{0.3}, 1.0}, 999, 250), IndexError);
}

TEST(Landscape, TruthOnGridIsZero) {
  Rng rng(2);
  const auto spec = make_model(1, 2);
  const auto theta = random_parameters(spec.ansatz, rng);
  const std::size_t res = 250;
  const Sample s{{37.0 / res}, -1.0};
  const auto p = scan_landscape(spec, theta, s, 5, res);
  EXPECT_NEAR(p.values[37], 0.0, 1e-20);
  EXPECT_NEAR(p.values[p.global_min], 0.0, 1e-20);
  EXPECT_EQ(p.m, 2);
  EXPECT_EQ(p.gradient_index, 5u);
  for (double v : p.values) EXPECT_GE(v, 0.0);
}

TEST(Landscape, GradientIndexSkipsFinalBlock) {
  const auto spec = make_model(1, 2);  // 4 layers, 2 qubits: last block holds 12..15
  Rng rng(3);
  for (int i = 0; i < 500; ++i) EXPECT_LT(random_gradient_index(spec.ansatz, rng), 12u);
}

TEST(Landscape, RefinementStable) {
  const std::vector<int> ms{1, 2};
  const auto coarse = landscape_study(ms, 4, 9, 10.0);
  const auto fine = landscape_study(ms, 4, 9, 20.0);
  ASSERT_EQ(coarse.size(), fine.size());
  double nc = 0, nf = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    nc += static_cast<double>(coarse[i].profile.minima_count());
    nf += static_cast<double>(fine[i].profile.minima_count());
  }
  EXPECT_LE(std::abs(nc - nf), 0.05 * nf);
}

TEST(Landscape, StudyDeterministicAndFits) {
  const std::vector<int> ms{1, 2, 3};
  const auto a = landscape_study(ms, 3, 42);
  const auto b = landscape_study(ms, 3, 42);
  ASSERT_EQ(a.size(), 9u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].m, ms[i / 3]);
    EXPECT_EQ(a[i].profile.values, b[i].profile.values);
  }
  const auto fit = minima_scaling_fit(a);
  EXPECT_EQ(fit.m_values, ms);
  EXPECT_GT(fit.fit.slope, 0.0);
  EXPECT_LT(valley_width_fit(a).fit.slope, 0.0);
  EXPECT_THROW(landscape_study(ms, 0, 1), ConfigError);
  const std::vector<int> bad{6};
  EXPECT_THROW(landscape_study(bad, 1, 1), ConfigError);
}

TEST(Landscape, MinimaDistribution) {
  const auto p = scan_signal([](double x) { return std::cos(2 * kPi * 4 * x); }, 400);
  const std::vector<LandscapeProfile> ps{p};
  const auto d = minima_distance_distribution(ps, 4);
  EXPECT_EQ(d.distances.size(), 4u);
  EXPECT_EQ(d.bin_edges.size(), 5u);
  std::size_t total = 0;
  for (auto c : d.counts) total += c;
  EXPECT_EQ(total, 4u);
  EXPECT_GE(d.ks_statistic, 0.0);
  EXPECT_LE(d.ks_statistic, 1.0);
}

TEST(Landscape, DuringTraining) {
  Rng rng(4);
  const auto spec = make_model(1, 1);
  std::vector<ThetaSnapshot> snaps{{0, random_parameters(spec.ansatz, rng)},
                                   {5, random_parameters(spec.ansatz, rng)}};
  const auto ps = landscape_during_training(spec, snaps, Sample{{0.26}, 0.1}, 0);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].resolution, 50u);
  EXPECT_EQ(ps[0].values, scan_landscape(spec, snaps[0].theta, Sample{{0.26}, 0.1}, 0, 50).values);
}
