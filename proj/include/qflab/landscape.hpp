#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qflab/fedsim.hpp"
#include "qflab/gradient_engine.hpp"
#include "qflab/stats.hpp"

namespace qflab {

// Sampled attack-loss landscape on a periodic uniform grid over gamma x' in
// [0, 2 pi)^n. Grid point indices are flat, row-major for n = 2.
struct LandscapeProfile {
  int n = 1;
  int m = 0;
  std::size_t resolution = 0;   // points per dimension
  double period = 1.0;          // input-space extent of the grid per dimension
  std::size_t gradient_index = 0;
  std::vector<double> values;
  std::vector<std::size_t> minima;
  std::vector<std::size_t> maxima;
  std::size_t global_min = 0;
  bool plateau = false;          // some neighbouring grid values are exactly equal
  double valley_width = 0.0;     // r in input units; NaN without any local maximum
  double valley_width_angle = 0.0;
  std::vector<double> minima_distances;  // angular distance of each minimum from the global one

  std::size_t minima_count() const { return minima.size(); }
  std::vector<double> coordinates(std::size_t flat) const;
};

// 10 x (2 d_F + 1) points per dimension by default.
std::size_t required_resolution(int m, double multiplier = 10.0);

// Extremum census of an already sampled grid. Strict comparisons against all
// neighbours (2 for n = 1, 4 for n = 2) with wraparound.
LandscapeProfile profile_from_grid(std::vector<double> values, int n, std::size_t resolution,
                                   double period);

// Convenience for analytic test signals: samples f(x') on [0, period).
LandscapeProfile scan_signal(const std::function<double(double)>& f, std::size_t resolution,
                             double period = 1.0);

// L_j over the grid for the client sample whose gradient C_j is matched.
LandscapeProfile scan_landscape(const GradientEngine& engine, const Sample& sample, std::size_t j,
                                std::size_t resolution);
LandscapeProfile scan_landscape(const ModelSpec& spec, const ParameterVector& theta,
                                const Sample& sample, std::size_t j, std::size_t resolution);

// Random gradient index, excluding parameters of the final ansatz block when
// there is more than one block.
std::size_t random_gradient_index(const AnsatzSpec& spec, Rng& rng);

struct LandscapeRun {
  int m = 0;
  int seed = 0;
  LandscapeProfile profile;
};

struct ScalingFit {
  LinearFit fit;                  // ln(mean quantity) against m
  std::vector<int> m_values;
  std::vector<double> mean;       // per m
  std::vector<double> mean_log;   // per m, mean of ln quantity
  std::vector<double> stddev_log; // per m
};

// One random (theta, x, y, j) landscape per (m, seed), n = 1.
std::vector<LandscapeRun> landscape_study(std::span<const int> m_values, int seeds,
                                          std::uint64_t master_seed, double resolution_multiplier = 10.0,
                                          Topology topology = Topology::Ring);

ScalingFit minima_scaling_fit(std::span<const LandscapeRun> runs);
ScalingFit valley_width_fit(std::span<const LandscapeRun> runs);
ScalingFit minima_scaling_experiment(std::span<const int> m_values, int seeds, std::uint64_t master_seed);
ScalingFit valley_width_experiment(std::span<const int> m_values, int seeds, std::uint64_t master_seed);

struct MinimaDistribution {
  std::vector<double> distances;
  std::vector<std::size_t> counts;
  std::vector<double> bin_edges;
  double ks_statistic = 0.0;  // against uniform on [0, pi]
};

MinimaDistribution minima_distance_distribution(std::span<const LandscapeProfile> profiles,
                                                std::size_t bins = 20);

// One profile per snapshot, all matching the gradient of the same tracked sample.
std::vector<LandscapeProfile> landscape_during_training(const ModelSpec& spec,
                                                        std::span<const ThetaSnapshot> snapshots,
                                                        const Sample& tracked, std::size_t j,
                                                        double resolution_multiplier = 10.0);

}  // namespace qflab
