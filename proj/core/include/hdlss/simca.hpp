#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"

namespace hdlss {

struct SimcaClassModel {
  Eigen::VectorXd center;      // coordinatewise median of the class
  Eigen::MatrixXd loadings;    // p x k, orthonormal columns
  Eigen::VectorXd eigenvalues; // length k, positive, nonincreasing
  double sd_cutoff = 0.0;
  double od_cutoff = 0.0;
  std::vector<std::size_t> kept_rows; // class-local indices retained after trimming
};

struct SimcaModel {
  std::vector<SimcaClassModel> classes;
};

struct SimcaOptions {
  double variance_retained = 0.90;
  double trim = 0.25;
  double cutoff_quantile = 0.975;
};

struct SimcaDistances {
  double sd = 0.0;
  double od = 0.0;
};

SimcaDistances simca_distances(const SimcaClassModel& cls, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Per-class PCA around the coordinatewise median with one round of
/// orthogonal-distance trimming.
SimcaClassModel simca_fit_class(const Eigen::MatrixXd& rows, const SimcaOptions& options = {});

SimcaModel rsimca_fit(const LabeledDataset& train, const SimcaOptions& options = {});

/// argmin over classes of sqrt((SD/SD_cut)^2 + (OD/OD_cut)^2), ties to the smaller label.
int rsimca_predict(const SimcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

} // namespace hdlss
