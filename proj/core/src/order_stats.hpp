#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace hdlss::detail {

// Median of a scratch buffer; the buffer is reordered.
inline double median_inplace(std::span<double> v) {
  if (v.empty()) {
    throw std::invalid_argument("median of empty sequence");
  }
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline double median(std::span<const double> v) {
  std::vector<double> scratch(v.begin(), v.end());
  return median_inplace(scratch);
}

// Linear-interpolation quantile (Hyndman-Fan type 7).
inline double quantile(std::span<const double> v, double prob) {
  if (v.empty()) {
    throw std::invalid_argument("quantile of empty sequence");
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace hdlss::detail
