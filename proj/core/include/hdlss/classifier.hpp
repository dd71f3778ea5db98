#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/discriminant.hpp"
#include "hdlss/forest.hpp"
#include "hdlss/projection_pursuit.hpp"
#include "hdlss/simca.hpp"

namespace hdlss {

/// Settings for every method in the registry. Seeds are not part of this
/// struct; fit_method receives one per call.
struct MethodConfig {
  RegularizationSpec lda_regularization;
  LindaOptions linda;
  PpOptions pp;
  SimcaOptions simca;
  ForestConfig forest;
  TreeConfig tree;
};

using FittedModel = std::variant<DiscriminantModel, DdaModel, PPModel, SimcaModel, ForestModel>;

/// Method names accepted by fit_method, in report order:
/// lda, linda, dda, pp-class, pp-huber, pp-mad, pp-sest, rsimca, rf.
const std::vector<std::string>& method_names();

bool is_known_method(std::string_view name);

/// Throws InputError for an unknown name and FitError when the method cannot
/// be fitted on `train`.
FittedModel fit_method(std::string_view name, const LabeledDataset& train, const MethodConfig& config, Seed seed);

int predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

std::vector<int> predict_rows(const FittedModel& model, const Eigen::MatrixXd& X);

} // namespace hdlss
