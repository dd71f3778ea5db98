#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/estimators.hpp"
#include "hdlss/random.hpp"

namespace hdlss {

/// One pairwise discriminant direction. Points with
/// orientation * (a'x - cutoff) > 0 are assigned to class_j.
struct PPPair {
  int class_j = 0;
  int class_k = 0;
  Eigen::VectorXd direction; // unit norm
  double cutoff = 0.0;
  int orientation = 1;
  double index = 0.0; // separation index reached by the search
};

struct PPModel {
  std::vector<PPPair> pairs; // (1,2), (1,3), ..., (G-1,G)
  UnivariateKind estimator_kind = UnivariateKind::classical;
  int num_classes = 0;
};

struct PpOptions {
  int random_directions = 200;
  /// Data-point difference candidates are used when the pair has at most this many rows.
  std::size_t pairwise_limit = 100;
  int refine_rounds = 50;
  double initial_step = 0.1;
  /// Coordinates tried per refinement round (all of them when p is smaller).
  int refine_coordinates = 20;
  Seed seed = 0;
  UnivariateTuning tuning;
};

/// |m_j - m_k| / (s_j + s_k) of the projected classes; negative when both
/// projected scales are zero.
double pp_index(std::span<const double> proj_j, std::span<const double> proj_k, UnivariateKind kind,
                const UnivariateTuning& tuning = {});

PPModel pp_fit(const LabeledDataset& train, UnivariateKind kind, const PpOptions& options = {});

int pp_predict(const PPModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

} // namespace hdlss
