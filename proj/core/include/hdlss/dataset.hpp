#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/random.hpp"

namespace hdlss {

/// n x p feature matrix with class labels in {1..G}.
///
/// `label_names[k-1]` holds the raw value that was encoded as label k when the
/// dataset came from a file; it is empty for generated data.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::string name;

  std::size_t n() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(features.cols()); }
  int num_classes() const;

  /// Rows in the given order; metadata is carried over.
  LabeledDataset subset(std::span<const std::size_t> rows) const;

  /// All rows of class k (1-based), in dataset order.
  Eigen::MatrixXd class_rows(int k) const;

  /// Throws InputError when an invariant does not hold.
  void validate() const;
};

struct ClassMembership {
  Eigen::MatrixXi indicators;         // n x G, w_ik = 1 iff y_i = k
  std::vector<std::size_t> counts;    // n_k
  std::vector<double> proportions;    // n_k / n
};

ClassMembership class_membership(const LabeledDataset& ds);

/// Stratified split description. The effective shuffling seed is
/// derive_seed(seed, replication_index).
struct SplitPlan {
  double train_fraction = 2.0 / 3.0;
  Seed seed = 0;
  std::uint64_t replication_index = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train; // ascending
  std::vector<std::size_t> test;  // ascending
};

/// Per class k exactly ceil(train_fraction * n_k) rows go to train, picked by
/// a seeded shuffle of that class's row indices.
SplitIndices split_indices(const LabeledDataset& ds, const SplitPlan& plan);

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, const SplitPlan& plan);

/// Number of training rows taken from a class of size n_k.
std::size_t train_count(std::size_t n_k, double train_fraction);

/// Reads a header-first comma-separated file. Labels are re-encoded to
/// 1..G following the sorted order of the distinct raw label strings.
LabeledDataset load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Parses CSV text; `source` is used in error messages and as the name.
LabeledDataset parse_csv(std::istream& in, const std::string& label_column, const std::string& source);

/// Writes features followed by a label column. Labels are written raw when
/// label names are known, encoded otherwise.
void write_csv(const LabeledDataset& ds, std::ostream& out, const std::string& label_column = "label");
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "label");

/// log-transform every cell, then subtract each row's median.
LabeledDataset normalize_log_median(LabeledDataset ds);

} // namespace hdlss
