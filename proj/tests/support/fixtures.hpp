#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/random.hpp"

namespace hdlss::testing {

inline LabeledDataset make_dataset(Eigen::MatrixXd X, std::vector<int> labels, std::string name = "fixture") {
  LabeledDataset ds;
  ds.features = std::move(X);
  ds.labels = std::move(labels);
  ds.name = std::move(name);
  return ds;
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index p, Seed seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      X(i, j) = standard_normal(rng);
    }
  }
  return X;
}

/// Two or more spherical Gaussian classes; class k is centred at offset * (k-1) * e_1.
inline LabeledDataset gaussian_classes(std::vector<int> sizes, int p, double offset, Seed seed) {
  int n = 0;
  for (int s : sizes) {
    n += s;
  }
  Eigen::MatrixXd X = gaussian_matrix(n, p, seed);
  std::vector<int> labels;
  int row = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    for (int i = 0; i < sizes[k]; ++i, ++row) {
      X(row, 0) += offset * static_cast<double>(k);
      labels.push_back(static_cast<int>(k) + 1);
    }
  }
  return make_dataset(std::move(X), std::move(labels), "gaussian");
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("hdlss-test-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace hdlss::testing
