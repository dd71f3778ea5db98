#include "hdlss/discriminant.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace {

void check_dimension(Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw InputError(fmt::format("dimension mismatch: model has p = {}, input has {}", expected, got));
  }
}

std::vector<double> log_proportions(const std::vector<std::size_t>& counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  std::vector<double> out;
  out.reserve(counts.size());
  for (std::size_t c : counts) {
    out.push_back(std::log(static_cast<double>(c) / total));
  }
  return out;
}

// Precision of a shared covariance, or FitError naming the singularity.
Eigen::MatrixXd invert_shared(const Eigen::MatrixXd& sigma, const RegularizationSpec& reg) {
  const Eigen::Index p = sigma.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    ok = diag.minCoeff() > 1e-7 * diag.maxCoeff();
  }
  if (!ok) {
    throw FitError(fmt::format("shared covariance is singular (p = {}, regularization = {}); "
                               "use ridge or convex regularization",
                               p, reg.to_string()));
  }
  Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(p, p));
  return 0.5 * (precision + precision.transpose());
}

} // namespace

int argmax_label(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) {
      best = k;
    }
  }
  return static_cast<int>(best) + 1;
}

DiscriminantModel make_discriminant_model(std::vector<Eigen::VectorXd> means, const Eigen::MatrixXd& sigma,
                                          const std::vector<double>& priors) {
  if (means.size() != priors.size() || means.empty()) {
    throw InputError("discriminant model needs one prior per class mean");
  }
  const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
  DiscriminantModel model;
  for (double pi : priors) {
    if (!(pi > 0.0)) {
      throw InputError("class priors must be positive");
    }
    model.log_priors.push_back(std::log(pi / total));
  }
  model.class_means = std::move(means);
  model.precision = invert_shared(sigma, model.regularization);
  return model;
}

DiscriminantModel lda_fit(const LabeledDataset& train, const RegularizationSpec& reg) {
  reg.validate();
  const int g = train.num_classes();
  const auto p = static_cast<Eigen::Index>(train.p());
  if (reg.kind == RegKind::none && static_cast<Eigen::Index>(train.n()) - g < p) {
    throw FitError(fmt::format("pooled covariance is singular: n - G = {} < p = {}; use ridge or convex "
                               "regularization",
                               static_cast<long>(train.n()) - g, p));
  }
  DiscriminantModel model;
  model.covariance_method = CovarianceSource::sample;
  model.regularization = reg;
  std::vector<GroupScatter> groups;
  std::vector<std::size_t> counts;
  for (int k = 1; k <= g; ++k) {
    const Eigen::MatrixXd rows = train.class_rows(k);
    counts.push_back(static_cast<std::size_t>(rows.rows()));
    model.class_means.push_back(rows.colwise().mean().transpose());
    if (rows.rows() >= 2) {
      groups.push_back({static_cast<std::size_t>(rows.rows()), sample_mean_cov(rows).sigma});
    } else {
      // a singleton class contributes (n_k - 1) * S_k = 0 but still counts toward G
      groups.push_back({1, Eigen::MatrixXd::Zero(p, p)});
    }
  }
  const Eigen::MatrixXd sigma = regularize(pooled_cov(groups), reg);
  model.precision = invert_shared(sigma, reg);
  model.log_priors = log_proportions(counts);
  return model;
}

DiscriminantModel linda_fit(const LabeledDataset& train, const LindaOptions& options) {
  options.regularization.validate();
  const int g = train.num_classes();
  const auto p = static_cast<int>(train.p());
  DiscriminantModel model;
  model.covariance_method = CovarianceSource::mcd;
  model.regularization = options.regularization;
  std::vector<GroupScatter> groups;
  std::vector<std::size_t> counts;
  for (int k = 1; k <= g; ++k) {
    const Eigen::MatrixXd rows = train.class_rows(k);
    const auto n_k = static_cast<int>(rows.rows());
    if (n_k < 2) {
      throw FitError(fmt::format("linda: class {} has {} rows", k, n_k));
    }
    const int h = options.h ? *options.h : default_h(n_k, p).h;
    if (p >= h) {
      throw FitError(fmt::format("MCD cannot be computed when p>h: class {} has n_k = {}, h = {}, p = {}", k,
                                 n_k, h, p));
    }
    McdOptions mcd = options.mcd;
    mcd.seed = derive_seed(options.mcd.seed, static_cast<std::uint64_t>(k));
    const LocationScatter est = mcd_fast(rows, h, mcd);
    counts.push_back(static_cast<std::size_t>(n_k));
    model.class_means.push_back(est.mu);
    model.subset_sizes.push_back(h);
    groups.push_back({static_cast<std::size_t>(h), est.sigma});
  }
  const Eigen::MatrixXd sigma = regularize(pooled_cov(groups), options.regularization);
  model.precision = invert_shared(sigma, options.regularization);
  model.log_priors = log_proportions(counts);
  return model;
}

std::vector<double> discriminant_scores(const DiscriminantModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dimension(model.precision.rows(), x.size());
  std::vector<double> scores;
  scores.reserve(model.class_means.size());
  for (std::size_t k = 0; k < model.class_means.size(); ++k) {
    const Eigen::VectorXd d = x - model.class_means[k];
    scores.push_back(-0.5 * d.dot(model.precision * d) + model.log_priors[k]);
  }
  return scores;
}

int predict(const DiscriminantModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return argmax_label(discriminant_scores(model, x));
}

DdaModel dda_fit(const LabeledDataset& train) {
  const int g = train.num_classes();
  const auto n = static_cast<double>(train.n());
  if (!(n > g)) {
    throw FitError(fmt::format("dda needs n > G, got n = {}, G = {}", train.n(), g));
  }
  const auto p = static_cast<Eigen::Index>(train.p());
  DdaModel model;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(p);
  std::vector<std::size_t> counts;
  for (int k = 1; k <= g; ++k) {
    const Eigen::MatrixXd rows = train.class_rows(k);
    const Eigen::VectorXd mean = rows.colwise().mean().transpose();
    ss += (rows.rowwise() - mean.transpose()).colwise().squaredNorm().transpose();
    model.class_means.push_back(mean);
    counts.push_back(static_cast<std::size_t>(rows.rows()));
  }
  model.pooled_variances = ss / (n - g);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (model.pooled_variances(j) < kVarianceFloor) {
      model.pooled_variances(j) = kVarianceFloor;
      model.degenerate = true;
    }
  }
  model.log_priors = log_proportions(counts);
  return model;
}

std::vector<double> discriminant_scores(const DdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dimension(model.pooled_variances.size(), x.size());
  std::vector<double> scores;
  scores.reserve(model.class_means.size());
  for (std::size_t k = 0; k < model.class_means.size(); ++k) {
    const double q = ((x - model.class_means[k]).array().square() / model.pooled_variances.array()).sum();
    scores.push_back(-0.5 * q + model.log_priors[k]);
  }
  return scores;
}

int predict(const DdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return argmax_label(discriminant_scores(model, x));
}

} // namespace hdlss
