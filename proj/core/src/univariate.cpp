#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "hdlss/error.hpp"
#include "hdlss/estimators.hpp"
#include "order_stats.hpp"

namespace hdlss {

namespace {

constexpr double kMadConsistency = 1.4826;

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double biweight_rho(double u) {
  if (std::abs(u) >= 1.0) {
    return 1.0;
  }
  const double t = 1.0 - u * u;
  return 1.0 - t * t * t;
}

double biweight_weight(double u) {
  if (std::abs(u) >= 1.0) {
    return 0.0;
  }
  const double t = 1.0 - u * u;
  return t * t;
}

UnivariateEstimate huber(std::span<const double> x, const UnivariateTuning& tuning) {
  const double med = detail::median(x);
  const double scale = mad_scale(x, med);
  UnivariateEstimate out{med, scale, UnivariateKind::huber, false};
  const double cutoff = tuning.huber_c * scale;
  double mu = med;
  for (int it = 0; it < tuning.max_iter; ++it) {
    double num = 0.0;
    double den = 0.0;
    for (double v : x) {
      const double r = std::abs(v - mu);
      const double w = r <= cutoff ? 1.0 : cutoff / r;
      num += w * v;
      den += w;
    }
    const double next = num / den;
    const bool done = std::abs(next - mu) <= tuning.tol * scale;
    mu = next;
    if (done) {
      break;
    }
  }
  out.location = mu;
  return out;
}

// Alternates the biweight S-scale equation mean(rho(r / (c s))) = b with the
// biweight-weighted location update, starting from median / MAD.
UnivariateEstimate s_estimate(std::span<const double> x, const UnivariateTuning& tuning) {
  const double c = tuning.biweight_c;
  const double b = tuning.biweight_b;
  double mu = detail::median(x);
  double s = mad_scale(x, mu);
  const auto n = static_cast<double>(x.size());

  for (int outer = 0; outer < 10 * tuning.max_iter; ++outer) {
    // scale step at fixed location
    for (int it = 0; it < tuning.max_iter; ++it) {
      double mean_rho = 0.0;
      for (double v : x) {
        mean_rho += biweight_rho((v - mu) / (c * s));
      }
      mean_rho /= n;
      const double next = s * std::sqrt(mean_rho / b);
      const bool done = std::abs(next - s) <= tuning.tol * s;
      s = next;
      if (done || !(s > 0.0)) {
        break;
      }
    }
    if (!(s > 0.0)) {
      break;
    }
    // location step at fixed scale
    double num = 0.0;
    double den = 0.0;
    for (double v : x) {
      const double w = biweight_weight((v - mu) / (c * s));
      num += w * v;
      den += w;
    }
    if (!(den > 0.0)) {
      break;
    }
    const double next_mu = num / den;
    const bool done = std::abs(next_mu - mu) <= tuning.tol * s;
    mu = next_mu;
    if (done) {
      break;
    }
  }
  return {mu, s, UnivariateKind::s_estimator, false};
}

} // namespace

std::string to_string(UnivariateKind kind) {
  switch (kind) {
  case UnivariateKind::classical:
    return "classical";
  case UnivariateKind::median_mad:
    return "median_mad";
  case UnivariateKind::huber:
    return "huber";
  case UnivariateKind::s_estimator:
    return "s_estimator";
  }
  return "unknown";
}

double mad_scale(std::span<const double> x, double center) {
  std::vector<double> dev(x.size());
  std::transform(x.begin(), x.end(), dev.begin(), [&](double v) { return std::abs(v - center); });
  const double mad = kMadConsistency * detail::median(dev);
  if (mad > 0.0) {
    return mad;
  }
  const double mean_abs = std::accumulate(dev.begin(), dev.end(), 0.0) / static_cast<double>(dev.size());
  return std::sqrt(std::numbers::pi / 2.0) * mean_abs;
}

UnivariateEstimate univariate(std::span<const double> x, UnivariateKind kind, const UnivariateTuning& tuning) {
  if (x.size() < 2) {
    throw InputError(fmt::format("univariate estimate needs at least 2 values, got {}", x.size()));
  }
  if (is_constant(x)) {
    return {x.front(), 0.0, kind, true};
  }
  switch (kind) {
  case UnivariateKind::classical: {
    const auto n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) {
      ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0)), kind, false};
  }
  case UnivariateKind::median_mad: {
    const double med = detail::median(x);
    return {med, mad_scale(x, med), kind, false};
  }
  case UnivariateKind::huber:
    return huber(x, tuning);
  case UnivariateKind::s_estimator:
    return s_estimate(x, tuning);
  }
  return {};
}

} // namespace hdlss
