#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "hdlss/error.hpp"
#include "hdlss/estimators.hpp"

namespace hdlss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SubsetFit {
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det = kNegInf;
  bool regular = false;
};

Eigen::MatrixXd gather(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

// Cholesky with a conditioning guard: a subset whose pivots span more than
// ~1e15 in squared magnitude is treated as singular.
SubsetFit fit_subset(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  SubsetFit fit;
  const Eigen::MatrixXd sub = gather(X, rows);
  fit.mu = sub.colwise().mean().transpose();
  const Eigen::MatrixXd centered = sub.rowwise() - fit.mu.transpose();
  fit.cov = (centered.transpose() * centered) / static_cast<double>(sub.rows() - 1);
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
  fit.llt.compute(fit.cov);
  if (fit.llt.info() != Eigen::Success) {
    return fit;
  }
  const auto diag = fit.llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(lo > 0.0) || lo < 3e-8 * hi) {
    return fit;
  }
  fit.log_det = 2.0 * diag.array().log().sum();
  fit.regular = true;
  return fit;
}

void check_mcd_shape(const Eigen::MatrixXd& X, int h) {
  const auto n = static_cast<int>(X.rows());
  const auto p = static_cast<int>(X.cols());
  if (p >= h) {
    throw FitError(fmt::format("MCD cannot be computed when p>h (p = {}, h = {}): every h-subset "
                               "covariance is singular",
                               p, h));
  }
  if (h > n) {
    throw FitError(fmt::format("MCD subset size h = {} exceeds n = {}", h, n));
  }
}

LocationScatter finish(const Eigen::MatrixXd& X, std::vector<std::size_t> support, ScatterMethod method, int h) {
  std::sort(support.begin(), support.end());
  SubsetFit fit = fit_subset(X, support);
  if (!fit.regular) {
    throw FitError(fmt::format("MCD exact fit: the selected {} observations lie on a hyperplane", h));
  }
  LocationScatter out;
  out.method = method;
  out.h = h;
  out.mu = std::move(fit.mu);
  out.consistency_factor = mcd_consistency_factor(static_cast<int>(X.rows()), static_cast<int>(X.cols()), h);
  out.sigma = out.consistency_factor * fit.cov;
  out.raw_log_det = fit.log_det;
  out.support = std::move(support);
  return out;
}

// Indices of the h smallest squared Mahalanobis distances, ties by row index,
// returned ascending.
std::vector<std::size_t> concentrate(const Eigen::MatrixXd& X, const SubsetFit& fit, int h) {
  const Eigen::MatrixXd centered = X.rowwise() - fit.mu.transpose();
  const Eigen::MatrixXd solved = fit.llt.matrixL().solve(centered.transpose());
  const Eigen::VectorXd d2 = solved.colwise().squaredNorm().transpose();
  std::vector<std::size_t> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + h, order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(d2(static_cast<Eigen::Index>(a)), a) < std::tie(d2(static_cast<Eigen::Index>(b)), b);
  });
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

std::size_t distinct_rows(const Eigen::MatrixXd& X) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      r[static_cast<std::size_t>(j)] = X(i, j);
    }
    rows.insert(std::move(r));
  }
  return rows.size();
}

} // namespace

double subset_log_det(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  return fit_subset(X, rows).log_det;
}

double mcd_consistency_factor(int n, int p, int h) {
  if (h >= n) {
    return 1.0;
  }
  const double alpha = static_cast<double>(h) / static_cast<double>(n);
  const boost::math::chi_squared chi_p(p);
  const boost::math::chi_squared chi_p2(p + 2);
  const double q = boost::math::quantile(chi_p, alpha);
  return alpha / boost::math::cdf(chi_p2, q);
}

LocationScatter mcd_exact(const Eigen::MatrixXd& X, int h) {
  check_mcd_shape(X, h);
  const auto n = static_cast<int>(X.rows());
  if (n > kMcdExactMaxRows) {
    throw FitError(fmt::format("mcd_exact enumerates all subsets and accepts n <= {}, got {}",
                               kMcdExactMaxRows, n));
  }
  std::vector<std::size_t> current(static_cast<std::size_t>(h));
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::vector<std::size_t> best;
  double best_log_det = std::numeric_limits<double>::infinity();
  // lexicographic enumeration; strict improvement keeps the smallest index set on ties
  while (true) {
    const SubsetFit fit = fit_subset(X, current);
    const double ld = fit.regular ? fit.log_det : kNegInf;
    if (ld < best_log_det) {
      best_log_det = ld;
      best = current;
    }
    int i = h - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == static_cast<std::size_t>(n - h + i)) {
      --i;
    }
    if (i < 0) {
      break;
    }
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < h; ++j) {
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return finish(X, std::move(best), ScatterMethod::mcd_exact, h);
}

LocationScatter mcd_fast(const Eigen::MatrixXd& X, int h, const McdOptions& options, McdTrace* trace) {
  check_mcd_shape(X, h);
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (distinct_rows(X) < p + 1) {
    throw FitError(fmt::format("MCD needs at least p+1 = {} distinct rows", p + 1));
  }
  if (options.n_starts < 1) {
    throw InputError("mcd_fast needs at least one start");
  }
  if (trace != nullptr) {
    trace->log_dets.assign(static_cast<std::size_t>(options.n_starts), {});
  }

  std::vector<std::size_t> best_support;
  double best_log_det = std::numeric_limits<double>::infinity();

  for (int start = 0; start < options.n_starts; ++start) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(start)));
    std::vector<std::size_t> initial = sample_without_replacement(rng, n, p + 1);
    SubsetFit fit = fit_subset(X, initial);
    while (!fit.regular && initial.size() < n) {
      // grow a singular elemental subset until it spans the space
      std::size_t extra = uniform_index(rng, n);
      while (std::binary_search(initial.begin(), initial.end(), extra)) {
        extra = uniform_index(rng, n);
      }
      initial.insert(std::upper_bound(initial.begin(), initial.end(), extra), extra);
      fit = fit_subset(X, initial);
    }
    if (!fit.regular) {
      throw FitError("MCD: data do not span the feature space (all starts singular)");
    }

    std::vector<double> log_dets;
    std::vector<std::size_t> support;
    double current = std::numeric_limits<double>::infinity();
    for (int step = 0; step < options.max_csteps; ++step) {
      std::vector<std::size_t> next = concentrate(X, fit, h);
      if (next == support) {
        break;
      }
      SubsetFit next_fit = fit_subset(X, next);
      const double ld = next_fit.regular ? next_fit.log_det : kNegInf;
      if (ld > current) {
        break; // never accept an increase
      }
      const double previous = current;
      current = ld;
      support = std::move(next);
      log_dets.push_back(ld);
      if (!next_fit.regular || previous - ld < options.rel_tol) {
        break;
      }
      fit = std::move(next_fit);
    }
    if (current < best_log_det) {
      best_log_det = current;
      best_support = support;
    }
    if (trace != nullptr) {
      trace->log_dets[static_cast<std::size_t>(start)] = std::move(log_dets);
    }
  }
  return finish(X, std::move(best_support), ScatterMethod::mcd_fast, h);
}

} // namespace hdlss
