#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coplaynet::stats {

double norm_pdf(double x);
// Standard normal CDF via erfc, accurate in both tails.
double norm_cdf(double x);
// Inverse standard normal CDF (rational approximation polished with Newton).
double norm_cdf_inv(double p);

// Kendall's tau-b with the standard tie correction, O(n log n) via merge
// counting. Throws DataError for fewer than 2 observations or when either
// vector is constant (denominator zero).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct HistogramBin {
  double lo;
  double hi;
  std::size_t count;
};

// Uniform bins over [lo, hi]; values outside the range are clamped into the
// end bins, the upper edge of the last bin is inclusive.
std::vector<HistogramBin> histogram(std::span<const double> values, double lo,
                                    double hi, int bins);
// Bin range taken from the data (degenerate ranges widen by 0.5 per side).
std::vector<HistogramBin> histogram_auto(std::span<const double> values,
                                         int bins);

double mean(std::span<const double> values);
// Population standard deviation.
double stddev(std::span<const double> values);

}  // namespace coplaynet::stats
