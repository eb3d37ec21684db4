#pragma once

// Gaussian kernel density estimation and mode finding.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "tempdyn/error.hpp"

namespace tempdyn::density {

struct DensityEstimate {
  std::vector<double> grid;    // strictly increasing
  std::vector<double> values;  // nonnegative
  double bandwidth = 0.0;

  // Trapezoid rule over the grid.
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    return s;
  }
};

struct KdeOptions {
  std::optional<double> bandwidth;  // Silverman's rule when empty
  std::size_t grid_points = 512;
  double extent = 3.0;  // grid spans [min - extent*h, max + extent*h]
};

// Quantile with linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when the IQR is 0.
inline double silverman_bandwidth(std::span<const double> data) {
  if (data.size() < 2) {
    throw DomainError("automatic bandwidth needs at least two observations");
  }
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) {
    throw DomainError("data has zero variance; pass an explicit bandwidth");
  }
  return 0.9 * spread * std::pow(n, -0.2);
}

inline DensityEstimate kde(std::span<const double> data, const KdeOptions& options = {}) {
  if (data.empty()) throw ContractViolation("kde on empty data");
  if (options.grid_points < 2) throw ContractViolation("kde needs at least two grid points");
  if (options.bandwidth && !(*options.bandwidth > 0.0)) {
    throw ContractViolation("kde bandwidth must be positive");
  }
  const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(data);
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = *lo_it - options.extent * h;
  const double hi = *hi_it + options.extent * h;
  const std::size_t m = options.grid_points;
  const double step = (hi - lo) / static_cast<double>(m - 1);

  DensityEstimate est;
  est.bandwidth = h;
  est.grid.resize(m);
  est.values.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) est.grid[i] = lo + step * static_cast<double>(i);

  // Kernels further than 8h away contribute below 1e-14 of their peak.
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double cutoff = 8.0 * h;
  const double norm = 1.0 / (static_cast<double>(data.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < m; ++i) {
    const double x = est.grid[i];
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - cutoff);
    auto last = std::upper_bound(first, sorted.end(), x + cutoff);
    double s = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (x - *it) / h;
      s += std::exp(-0.5 * z * z);
    }
    est.values[i] = s * norm;
  }
  return est;
}

struct Mode {
  double location = 0.0;
  double height = 0.0;
};

// Local maxima whose topographic prominence is at least
// min_prominence * (global maximum). Prominence is the height above the
// higher of the two saddles separating the peak from higher ground (or the
// grid edge). Flat tops count once, at their midpoint.
inline std::vector<Mode> find_modes(const DensityEstimate& est, double min_prominence = 0.10) {
  const auto& v = est.values;
  const std::size_t n = v.size();
  std::vector<Mode> modes;
  if (n < 3) return modes;
  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return modes;
  const double threshold = min_prominence * peak;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(v[i] > v[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 >= n || !(v[j + 1] < v[i])) {
      i = j + 1;
      continue;
    }
    const double h = v[i];
    double left_min = h;
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] > h) break;
      left_min = std::min(left_min, v[k]);
    }
    double right_min = h;
    for (std::size_t k = j + 1; k < n; ++k) {
      if (v[k] > h) break;
      right_min = std::min(right_min, v[k]);
    }
    const double prominence = h - std::max(left_min, right_min);
    if (prominence >= threshold) {
      const std::size_t mid_lo = (i + j) / 2;
      const double loc = (i + j) % 2 == 0
                             ? est.grid[mid_lo]
                             : 0.5 * (est.grid[mid_lo] + est.grid[mid_lo + 1]);
      modes.push_back({loc, h});
    }
    i = j + 1;
  }
  return modes;
}

}  // namespace tempdyn::density
