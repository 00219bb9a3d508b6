#include "coplaynet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "coplaynet/types.hpp"

namespace coplaynet::stats {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_cdf_inv(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DataError("norm_cdf_inv: p must lie in (0, 1)");

  // Acklam's rational approximation, then one Newton polish.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  double err = norm_cdf(x) - p;
  x -= err / norm_pdf(x);
  return x;
}

namespace {

// Inversions of `values` counted by bottom-up merge sort; ties do not count.
std::uint64_t merge_count(std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> buf(n);
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          swaps += mid - i;
          buf[k++] = values[j++];
        } else {
          buf[k++] = values[i++];
        }
      }
      while (i < mid) buf[k++] = values[i++];
      while (j < hi) buf[k++] = values[j++];
      std::copy(buf.begin() + lo, buf.begin() + hi, values.begin() + lo);
    }
  }
  return swaps;
}

std::uint64_t tie_pairs(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::uint64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i < v.size() && v[i] == v[i - 1]) {
      ++run;
    } else {
      ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DataError("kendall_tau_b: length mismatch");
  if (n < 2) throw DataError("kendall_tau_b: need at least 2 observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  // Tie counts in x and joint ties, scanned along the x-sorted order.
  std::uint64_t xtie = 0, joint = 0;
  {
    std::size_t run_x = 1, run_xy = 1;
    for (std::size_t i = 1; i <= n; ++i) {
      const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
      const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
      if (same_x) {
        ++run_x;
      } else {
        xtie += static_cast<std::uint64_t>(run_x) * (run_x - 1) / 2;
        run_x = 1;
      }
      if (same_xy) {
        ++run_xy;
      } else {
        joint += static_cast<std::uint64_t>(run_xy) * (run_xy - 1) / 2;
        run_xy = 1;
      }
    }
  }

  std::vector<double> y_in_x_order(n);
  for (std::size_t i = 0; i < n; ++i) y_in_x_order[i] = y[order[i]];
  const std::uint64_t swaps = merge_count(y_in_x_order);
  const std::uint64_t ytie = tie_pairs(std::vector<double>(y.begin(), y.end()));
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;

  if (xtie == n0 || ytie == n0)
    throw DataError("kendall_tau_b: undefined for a constant ranking");

  const std::int64_t con_minus_dis =
      static_cast<std::int64_t>(n0) - static_cast<std::int64_t>(xtie) -
      static_cast<std::int64_t>(ytie) + static_cast<std::int64_t>(joint) -
      2 * static_cast<std::int64_t>(swaps);
  return static_cast<double>(con_minus_dis) /
         std::sqrt(static_cast<double>(n0 - xtie) *
                   static_cast<double>(n0 - ytie));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw DataError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double lo,
                                    double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw DataError("histogram: bad bin spec");
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i)
    out[i] = {lo + i * width, lo + (i + 1) * width, 0};
  out.back().hi = hi;  // avoid drift on the last edge
  for (double v : values) {
    int idx = static_cast<int>(std::floor((v - lo) / width));
    idx = std::clamp(idx, 0, bins - 1);
    ++out[static_cast<std::size_t>(idx)].count;
  }
  return out;
}

std::vector<HistogramBin> histogram_auto(std::span<const double> values,
                                         int bins) {
  if (values.empty()) throw DataError("histogram: empty data");
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return histogram(values, lo, hi, bins);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean: empty data");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size()));
}

}  // namespace coplaynet::stats
