#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/estimators.hpp"

namespace hdlss {

enum class CovarianceSource { sample, mcd };

/// Linear discriminant with a shared precision matrix:
///   delta_k(x) = -1/2 (x - mu_k)' P (x - mu_k) + log pi_k
struct DiscriminantModel {
  std::vector<Eigen::VectorXd> class_means;
  Eigen::MatrixXd precision;
  std::vector<double> log_priors;
  CovarianceSource covariance_method = CovarianceSource::sample;
  RegularizationSpec regularization;
  /// h_k per class for MCD-based fits.
  std::vector<int> subset_sizes;
};

/// Builds a model from means, a shared covariance and priors (which need not
/// be normalized; they are rescaled to sum to one).
DiscriminantModel make_discriminant_model(std::vector<Eigen::VectorXd> means, const Eigen::MatrixXd& sigma,
                                          const std::vector<double>& priors);

/// Pooled-covariance LDA. Throws FitError when the (regularized) pooled
/// covariance is singular.
DiscriminantModel lda_fit(const LabeledDataset& train, const RegularizationSpec& reg = {});

struct LindaOptions {
  std::optional<int> h;          // per-class subset size; default_h(n_k, p) when empty
  RegularizationSpec regularization;
  McdOptions mcd;
};

/// Robust LDA: per-class FAST-MCD location/scatter pooled with weights h_k - 1.
DiscriminantModel linda_fit(const LabeledDataset& train, const LindaOptions& options = {});

std::vector<double> discriminant_scores(const DiscriminantModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// argmax of the scores, ties to the smaller label.
int predict(const DiscriminantModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Diagonal discriminant analysis (pooled per-feature variances).
struct DdaModel {
  std::vector<Eigen::VectorXd> class_means;
  Eigen::VectorXd pooled_variances;
  std::vector<double> log_priors;
  bool degenerate = false; // some variance was floored
};

inline constexpr double kVarianceFloor = 1e-12;

DdaModel dda_fit(const LabeledDataset& train);
std::vector<double> discriminant_scores(const DdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
int predict(const DdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Index (1-based) of the largest score; first maximum wins.
int argmax_label(const std::vector<double>& scores);

} // namespace hdlss
