#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/random.hpp"

namespace hdlss {

struct TreeConfig {
  int max_depth = 20;
  int min_leaf = 1;

  void validate() const;
  bool operator==(const TreeConfig&) const = default;
};

/// Flat binary tree. A node with feature < 0 is a leaf.
struct TreeNode {
  int feature = -1; // global feature index
  double threshold = 0.0;
  int left = -1;  // x[feature] <= threshold
  int right = -1; // x[feature] > threshold
  int label = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes; // nodes[0] is the root
  std::vector<std::size_t> feature_subset; // ascending global indices

  int depth() const;
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Gini recursive partitioning on the rows of `data` using only the listed
/// features. Thresholds are midpoints between consecutive distinct values;
/// ties go to the smaller feature index, then the smaller threshold.
DecisionTree tree_fit(const LabeledDataset& data, const TreeConfig& cfg, std::span<const std::size_t> allowed_features);

/// Same, on a row subset (with repetitions) of `data`.
DecisionTree tree_fit(const LabeledDataset& data, std::span<const std::size_t> rows, const TreeConfig& cfg,
                      std::span<const std::size_t> allowed_features);

enum class SubspaceMode {
  fixed,          // d given
  sqrt,           // floor(sqrt(p)), at least 1
  uniform_random, // d uniform on {1..p-1} per learner
  all_features    // d = p: plain bagging
};

struct ForestConfig {
  int B = 500;
  SubspaceMode d_mode = SubspaceMode::sqrt;
  int d = 0; // used by SubspaceMode::fixed
  Seed seed = 0;

  /// "sqrt", "uniform", "all" or an integer d.
  std::string mode_string() const;
  static ForestConfig with_mode(const std::string& mode);
  bool operator==(const ForestConfig&) const = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  TreeConfig tree_config;
  int num_classes = 0;
  std::size_t num_features = 0;
};

/// Random subspace learning: per learner a bootstrap of the rows and a random
/// feature subset drawn without replacement.
ForestModel rsl_fit(const LabeledDataset& train, const ForestConfig& cfg, const TreeConfig& tree_cfg = {});

/// Most frequent label, ties to the smallest.
int majority_vote(std::span<const int> votes);

int forest_predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// (1 - 1/n)^n, the chance a given row is absent from a bootstrap sample.
double oob_probability(std::uint64_t n);

/// Versioned binary encoding of the forest structure.
std::string serialize(const ForestModel& model);

} // namespace hdlss
