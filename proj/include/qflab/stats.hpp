#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qflab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> v);

// Kolmogorov-Smirnov statistic sup |F_n(t) - F(t)| against uniform on [lo, hi].
double ks_uniform(std::vector<double> values, double lo, double hi);

// Equal-width bins on [lo, hi]; values equal to hi land in the last bin.
std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins, double lo,
                                   double hi);

}  // namespace qflab
