#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/random.hpp"

namespace hdlss {

// ---------------------------------------------------------------------------
// Multivariate location / scatter
// ---------------------------------------------------------------------------

enum class ScatterMethod { sample, pooled, mcd_exact, mcd_fast };

std::string to_string(ScatterMethod method);

struct LocationScatter {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  ScatterMethod method = ScatterMethod::sample;
  std::optional<int> h;
  std::vector<std::size_t> support; // ascending row indices of the h-subset
  /// Multiplier applied to the raw subset covariance (1 for non-MCD methods).
  double consistency_factor = 1.0;
  /// log det of the raw (unscaled) covariance; -inf when singular.
  double raw_log_det = 0.0;
  /// Set when the covariance is singular (e.g. identical rows).
  bool degenerate = false;
};

/// Mean and unbiased (n-1) covariance. Requires n >= 2.
LocationScatter sample_mean_cov(const Eigen::MatrixXd& X);

struct GroupScatter {
  std::size_t n = 0;
  Eigen::MatrixXd S;
};

/// sum_k (n_k - 1) S_k / (sum_k n_k - G)
Eigen::MatrixXd pooled_cov(std::span<const GroupScatter> groups);

enum class RegKind { none, ridge, convex };

struct RegularizationSpec {
  RegKind kind = RegKind::none;
  double lambda = 0.0; // ridge
  double alpha = 0.0;  // convex

  static RegularizationSpec none() { return {}; }
  static RegularizationSpec ridge(double lambda) { return {RegKind::ridge, lambda, 0.0}; }
  static RegularizationSpec convex(double alpha) { return {RegKind::convex, 0.0, alpha}; }

  void validate() const;
  /// "none", "ridge:<lambda>" or "convex:<alpha>"
  std::string to_string() const;
  static RegularizationSpec parse(const std::string& text);

  bool operator==(const RegularizationSpec&) const = default;
};

/// ridge: sigma + lambda I; convex: (1-alpha) sigma + (alpha/p) tr(sigma) I.
Eigen::MatrixXd regularize(const Eigen::MatrixXd& sigma, const RegularizationSpec& spec);

struct SubsetSize {
  int h = 0;
  bool clamped = false; // true when floor((n+p+1)/2) fell outside [ceil(n/2), n-1]
};

/// floor((n+p+1)/2), clamped to [ceil(n/2), n-1].
SubsetSize default_h(int n, int p);

/// Largest n accepted by mcd_exact.
inline constexpr int kMcdExactMaxRows = 25;

/// Exhaustive MCD over all C(n, h) subsets.
LocationScatter mcd_exact(const Eigen::MatrixXd& X, int h);

struct McdOptions {
  int n_starts = 500;
  Seed seed = 0;
  int max_csteps = 100;
  double rel_tol = 1e-12;
};

/// Per-start log-determinant sequence of the accepted C-steps.
struct McdTrace {
  std::vector<std::vector<double>> log_dets;
};

/// FAST-MCD: random (p+1)-subset starts refined by C-steps.
LocationScatter mcd_fast(const Eigen::MatrixXd& X, int h, const McdOptions& options = {},
                         McdTrace* trace = nullptr);

/// Multiplier making the raw h-subset covariance consistent at the normal
/// model: (h/n) / P(chi2_{p+2} <= chi2_{p, h/n}).
double mcd_consistency_factor(int n, int p, int h);

/// log det of the (h-1)-denominator covariance of the given rows.
double subset_log_det(const Eigen::MatrixXd& X, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// Univariate location / scale
// ---------------------------------------------------------------------------

enum class UnivariateKind { classical, median_mad, huber, s_estimator };

std::string to_string(UnivariateKind kind);

struct UnivariateEstimate {
  double location = 0.0;
  double scale = 0.0;
  UnivariateKind kind = UnivariateKind::classical;
  bool degenerate = false; // constant sample, scale is 0
};

struct UnivariateTuning {
  double huber_c = 1.345;
  // Tukey biweight tuned for 50% breakdown with E_Phi[rho] = b at the normal.
  double biweight_c = 1.5476450;
  double biweight_b = 0.5;
  int max_iter = 100;
  double tol = 1e-10;
};

/// Normal-consistent MAD, 1.4826 * median |x - median|. When more than half
/// the sample sits on the median but the sample is not constant, falls back
/// to sqrt(pi/2) * mean |x - median|.
double mad_scale(std::span<const double> x, double center);

UnivariateEstimate univariate(std::span<const double> x, UnivariateKind kind,
                              const UnivariateTuning& tuning = {});

} // namespace hdlss
