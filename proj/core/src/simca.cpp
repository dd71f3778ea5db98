#include "hdlss/simca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "hdlss/error.hpp"
#include "order_stats.hpp"

namespace hdlss {

namespace {

constexpr double kCutoffFloor = 1e-12;

struct Pca {
  Eigen::MatrixXd loadings;
  Eigen::VectorXd eigenvalues;
};

Pca principal_components(const Eigen::MatrixXd& rows, std::span<const std::size_t> use, const Eigen::VectorXd& center,
                         double variance_retained, std::size_t cap) {
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(use.size()), rows.cols());
  for (std::size_t i = 0; i < use.size(); ++i) {
    centered.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(use[i])) - center.transpose();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd eig = svd.singularValues().array().square() / static_cast<double>(use.size() - 1);

  const double total = eig.sum();
  std::size_t positive = 0;
  if (total > 0.0) {
    while (positive < static_cast<std::size_t>(eig.size()) &&
           eig(static_cast<Eigen::Index>(positive)) > 1e-10 * eig(0)) {
      ++positive;
    }
  }
  const std::size_t limit = std::min(cap, positive);
  std::size_t k = 0;
  double cumulative = 0.0;
  while (k < limit) {
    cumulative += eig(static_cast<Eigen::Index>(k));
    ++k;
    if (cumulative >= variance_retained * total) {
      break;
    }
  }
  Pca out;
  out.loadings = svd.matrixV().leftCols(static_cast<Eigen::Index>(k));
  out.eigenvalues = eig.head(static_cast<Eigen::Index>(k));
  return out;
}

} // namespace

SimcaDistances simca_distances(const SimcaClassModel& cls, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != cls.center.size()) {
    throw InputError(fmt::format("dimension mismatch: model has p = {}, input has {}", cls.center.size(), x.size()));
  }
  const Eigen::VectorXd d = x - cls.center;
  const Eigen::VectorXd scores = cls.loadings.transpose() * d;
  SimcaDistances out;
  out.sd = std::sqrt((scores.array().square() / cls.eigenvalues.array()).sum());
  out.od = (d - cls.loadings * scores).norm();
  return out;
}

SimcaClassModel simca_fit_class(const Eigen::MatrixXd& rows, const SimcaOptions& options) {
  const auto n_k = static_cast<std::size_t>(rows.rows());
  const auto p = static_cast<std::size_t>(rows.cols());
  if (n_k < 4) {
    throw FitError(fmt::format("rsimca needs at least 4 rows per class, got {}", n_k));
  }
  if (!(options.variance_retained > 0.0 && options.variance_retained <= 1.0)) {
    throw InputError(fmt::format("variance_retained must lie in (0,1], got {}", options.variance_retained));
  }
  if (!(options.trim >= 0.0 && options.trim < 1.0)) {
    throw InputError(fmt::format("trim must lie in [0,1), got {}", options.trim));
  }
  const std::size_t n_trim = static_cast<std::size_t>(std::floor(options.trim * static_cast<double>(n_k)));
  if (n_k - n_trim < 3) {
    throw FitError(fmt::format("rsimca: class of {} rows keeps fewer than 3 after trimming", n_k));
  }

  SimcaClassModel cls;
  cls.center.resize(static_cast<Eigen::Index>(p));
  std::vector<double> column(n_k);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < n_k; ++r) {
      column[r] = rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    cls.center(static_cast<Eigen::Index>(c)) = detail::median_inplace(column);
  }
  const std::size_t cap = std::min(n_k - 2, p);

  std::vector<std::size_t> all(n_k);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Pca first = principal_components(rows, all, cls.center, options.variance_retained, cap);
  cls.loadings = first.loadings;
  cls.eigenvalues = first.eigenvalues;

  // drop the rows with the largest first-pass orthogonal distance
  std::vector<double> od(n_k);
  for (std::size_t r = 0; r < n_k; ++r) {
    od[r] = simca_distances(cls, rows.row(static_cast<Eigen::Index>(r)).transpose()).od;
  }
  std::vector<std::size_t> order = all;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return od[a] < od[b]; });
  cls.kept_rows.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_trim));
  std::sort(cls.kept_rows.begin(), cls.kept_rows.end());

  const Pca second = principal_components(rows, cls.kept_rows, cls.center, options.variance_retained,
                                          std::min(cap, cls.kept_rows.size() - 1));
  cls.loadings = second.loadings;
  cls.eigenvalues = second.eigenvalues;

  std::vector<double> sd_kept;
  std::vector<double> od_kept;
  for (std::size_t r : cls.kept_rows) {
    const SimcaDistances d = simca_distances(cls, rows.row(static_cast<Eigen::Index>(r)).transpose());
    sd_kept.push_back(d.sd);
    od_kept.push_back(d.od);
  }
  cls.sd_cutoff = std::max(detail::quantile(sd_kept, options.cutoff_quantile), kCutoffFloor);
  cls.od_cutoff = std::max(detail::quantile(od_kept, options.cutoff_quantile), kCutoffFloor);
  return cls;
}

SimcaModel rsimca_fit(const LabeledDataset& train, const SimcaOptions& options) {
  SimcaModel model;
  for (int k = 1; k <= train.num_classes(); ++k) {
    model.classes.push_back(simca_fit_class(train.class_rows(k), options));
  }
  return model;
}

int rsimca_predict(const SimcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    const auto& cls = model.classes[k];
    const SimcaDistances d = simca_distances(cls, x);
    const double a = d.sd / cls.sd_cutoff;
    const double b = d.od / cls.od_cutoff;
    const double dist = std::sqrt(a * a + b * b);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return static_cast<int>(best) + 1;
}

} // namespace hdlss
