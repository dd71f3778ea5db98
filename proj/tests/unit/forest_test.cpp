#include <cmath>
#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "hdlss/error.hpp"
#include "hdlss/forest.hpp"
#include "support/fixtures.hpp"

namespace hdlss {
namespace {

std::vector<std::size_t> all_features(std::size_t p) {
  std::vector<std::size_t> f(p);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

double training_accuracy(const DecisionTree& tree, const LabeledDataset& ds) {
  int correct = 0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    correct += tree.predict(ds.features.row(static_cast<Eigen::Index>(i)).transpose()) == ds.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(ds.n());
}

double gini(const std::vector<int>& counts) {
  double n = 0.0;
  double sq = 0.0;
  for (int c : counts) {
    n += c;
    sq += static_cast<double>(c) * c;
  }
  return n == 0.0 ? 0.0 : 1.0 - sq / (n * n);
}

TEST(TreeFit, SingleSplitExample) {
  Eigen::MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  const auto ds = testing::make_dataset(X, {1, 1, 2, 2});
  const auto tree = tree_fit(ds, TreeConfig{}, all_features(1));
  ASSERT_EQ(tree.nodes.size(), 3U);
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_DOUBLE_EQ(tree.nodes[0].threshold, 2.5);
  EXPECT_DOUBLE_EQ(training_accuracy(tree, ds), 1.0);
}

TEST(TreeFit, PureDataIsALeaf) {
  const auto ds = testing::make_dataset(testing::gaussian_matrix(6, 2, 1), {2, 2, 2, 2, 2, 2});
  const auto tree = tree_fit(ds, TreeConfig{}, all_features(2));
  ASSERT_EQ(tree.nodes.size(), 1U);
  EXPECT_EQ(tree.nodes[0].label, 2);
}

TEST(TreeFit, XorNeedsDepthTwo) {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 0, 1, 1, 0, 1, 1;
  const auto ds = testing::make_dataset(X, {1, 2, 2, 1});
  // Oracle: every depth-1 split leaves accuracy at 0.5.
  for (int f = 0; f < 2; ++f) {
    const auto stump = tree_fit(ds, TreeConfig{1, 1}, std::vector<std::size_t>{static_cast<std::size_t>(f)});
    EXPECT_LE(training_accuracy(stump, ds), 0.5);
  }
  const auto tree = tree_fit(ds, TreeConfig{}, all_features(2));
  EXPECT_EQ(tree.depth(), 2);
  EXPECT_DOUBLE_EQ(training_accuracy(tree, ds), 1.0);
}

TEST(TreeFit, DepthOneMatchesExhaustiveGini) {
  for (Seed seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const int n = 6 + static_cast<int>(uniform_index(rng, 10));
    const int p = 1 + static_cast<int>(uniform_index(rng, 3));
    Eigen::MatrixXd X(n, p);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) {
        X(i, j) = static_cast<double>(uniform_index(rng, 6));
      }
      labels[static_cast<std::size_t>(i)] = 1 + static_cast<int>(uniform_index(rng, 3));
    }
    labels[0] = 1;
    labels[1] = 2;
    const auto ds = testing::make_dataset(X, labels);
    // Exhaustive enumeration: smallest weighted Gini, ties to the lower feature, then lower threshold.
    double best = INFINITY;
    int best_f = -1;
    double best_t = 0.0;
    for (int f = 0; f < p; ++f) {
      std::set<double> values(X.col(f).data(), X.col(f).data() + n);
      std::vector<double> v(values.begin(), values.end());
      for (std::size_t t = 0; t + 1 < v.size(); ++t) {
        const double thr = 0.5 * (v[t] + v[t + 1]);
        std::vector<int> left(3, 0);
        std::vector<int> right(3, 0);
        for (int i = 0; i < n; ++i) {
          (X(i, f) <= thr ? left : right)[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1)]++;
        }
        const double nl = left[0] + left[1] + left[2];
        const double nr = right[0] + right[1] + right[2];
        const double score = (nl * gini(left) + nr * gini(right)) / n;
        if (score < best - 1e-12) {
          best = score;
          best_f = f;
          best_t = thr;
        }
      }
    }
    const auto stump = tree_fit(ds, TreeConfig{1, 1}, all_features(static_cast<std::size_t>(p)));
    if (best_f < 0) {
      EXPECT_EQ(stump.nodes.size(), 1U);
      continue;
    }
    ASSERT_EQ(stump.nodes.size(), 3U) << "seed " << seed;
    EXPECT_EQ(stump.nodes[0].feature, best_f) << "seed " << seed;
    EXPECT_DOUBLE_EQ(stump.nodes[0].threshold, best_t) << "seed " << seed;
  }
}

TEST(TreeFit, MinLeafAndErrors) {
  const auto ds = testing::gaussian_classes({10, 10}, 2, 1.0, 3);
  const auto tree = tree_fit(ds, TreeConfig{20, 4}, all_features(2));
  // Count training rows per leaf.
  std::vector<int> per_leaf(tree.nodes.size(), 0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    int node = 0;
    while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
      const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
      node = ds.features(static_cast<Eigen::Index>(i), nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    per_leaf[static_cast<std::size_t>(node)]++;
  }
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    if (tree.nodes[k].feature < 0) {
      EXPECT_GE(per_leaf[k], 4);
    }
  }
  EXPECT_THROW(tree_fit(ds, TreeConfig{0, 1}, all_features(2)), InputError);
  EXPECT_THROW(tree_fit(ds, TreeConfig{}, std::vector<std::size_t>{}), FitError);
}

TEST(MajorityVote, Examples) {
  EXPECT_EQ(majority_vote(std::vector<int>{1, 1, 2}), 1);
  EXPECT_EQ(majority_vote(std::vector<int>{1, 2}), 1);
  EXPECT_EQ(majority_vote(std::vector<int>{3, 3, 2, 2, 2}), 2);
  EXPECT_EQ(majority_vote(std::vector<int>{2, 1}), 1);
  EXPECT_THROW(majority_vote(std::vector<int>{}), InputError);
}

TEST(OobProbability, Values) {
  EXPECT_DOUBLE_EQ(oob_probability(1), 0.0);
  EXPECT_DOUBLE_EQ(oob_probability(2), 0.25);
  for (std::uint64_t n : {50U, 100U, 1000U, 100000U}) {
    EXPECT_LT(std::abs(oob_probability(n) - std::exp(-1.0)), 0.01);
  }
}

TEST(Bootstrap, CoverageMatchesOob) {
  Rng rng(31);
  const std::size_t n = 100;
  double total = 0.0;
  for (int b = 0; b < 1000; ++b) {
    const auto idx = bootstrap_indices(rng, n);
    total += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / n;
  }
  EXPECT_NEAR(total / 1000.0, 1.0 - oob_probability(n), 0.02);
}

TEST(Forest, SubsetLegality) {
  const auto ds = testing::gaussian_classes({20, 20}, 16, 2.0, 4);
  for (const std::string mode : {"sqrt", "uniform", "5"}) {
    ForestConfig cfg = ForestConfig::with_mode(mode);
    cfg.B = 40;
    cfg.seed = 8;
    const auto model = rsl_fit(ds, cfg);
    ASSERT_EQ(model.trees.size(), 40U);
    for (const auto& tree : model.trees) {
      const std::set<std::size_t> subset(tree.feature_subset.begin(), tree.feature_subset.end());
      EXPECT_EQ(subset.size(), tree.feature_subset.size());
      EXPECT_LT(subset.size(), 16U);
      if (mode == "sqrt") {
        EXPECT_EQ(subset.size(), 4U);
      } else if (mode == "5") {
        EXPECT_EQ(subset.size(), 5U);
      }
      for (const auto& node : tree.nodes) {
        if (node.feature >= 0) {
          EXPECT_TRUE(subset.contains(static_cast<std::size_t>(node.feature)));
        } else {
          EXPECT_TRUE(node.label == 1 || node.label == 2);
        }
      }
    }
  }
}

TEST(Forest, SingleBaggedTree) {
  const auto ds = testing::gaussian_classes({15, 15}, 4, 1.5, 5);
  ForestConfig cfg = ForestConfig::with_mode("all");
  cfg.B = 1;
  cfg.seed = 3;
  const auto model = rsl_fit(ds, cfg);
  ASSERT_EQ(model.trees.size(), 1U);
  EXPECT_EQ(model.trees[0].feature_subset.size(), 4U);
  for (int i = 0; i < 40; ++i) {
    const Eigen::VectorXd x = 2.0 * testing::gaussian_matrix(4, 1, static_cast<Seed>(i) + 70);
    EXPECT_EQ(forest_predict(model, x), model.trees[0].predict(x));
  }
}

TEST(Forest, LabelConstantTraining) {
  auto ds = testing::gaussian_classes({10, 10}, 3, 1.0, 6);
  std::fill(ds.labels.begin(), ds.labels.end(), 2);
  ForestConfig cfg;
  cfg.B = 25;
  const auto model = rsl_fit(ds, cfg);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(forest_predict(model, testing::gaussian_matrix(3, 1, static_cast<Seed>(i))), 2);
  }
}

TEST(Forest, SerializedRefitIsIdentical) {
  const auto ds = testing::gaussian_classes({20, 20, 20}, 9, 1.0, 7);
  ForestConfig cfg = ForestConfig::with_mode("uniform");
  cfg.B = 50;
  cfg.seed = 1234;
  const std::string a = serialize(rsl_fit(ds, cfg));
  const std::string b = serialize(rsl_fit(ds, cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, 4), "HDRF");
  cfg.seed = 1235;
  EXPECT_NE(a, serialize(rsl_fit(ds, cfg)));
}

TEST(Forest, TreeOrderDoesNotMatter) {
  const auto ds = testing::gaussian_classes({20, 20, 20}, 6, 1.0, 8);
  ForestConfig cfg;
  cfg.B = 30;
  auto model = rsl_fit(ds, cfg);
  auto reversed = model;
  std::reverse(reversed.trees.begin(), reversed.trees.end());
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = 2.0 * testing::gaussian_matrix(6, 1, static_cast<Seed>(i) + 900);
    EXPECT_EQ(forest_predict(model, x), forest_predict(reversed, x));
  }
}

TEST(Forest, SeparableGaussianAccuracy) {
  const auto train = testing::gaussian_classes({100, 100}, 10, 4.0, 9);
  const auto test = testing::gaussian_classes({200, 200}, 10, 4.0, 10);
  ForestConfig cfg;
  cfg.B = 100;
  cfg.seed = 11;
  const auto model = rsl_fit(train, cfg);
  int correct = 0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    correct += forest_predict(model, test.features.row(static_cast<Eigen::Index>(i)).transpose()) == test.labels[i];
  }
  EXPECT_GE(correct, 380);
}

TEST(Forest, InvalidConfigurations) {
  const auto ds = testing::gaussian_classes({10, 10}, 4, 1.0, 12);
  ForestConfig fixed = ForestConfig::with_mode("4");
  EXPECT_THROW(rsl_fit(ds, fixed), FitError);
  EXPECT_THROW(ForestConfig::with_mode("half"), InputError);
  EXPECT_THROW(rsl_fit(testing::gaussian_classes({10, 10}, 1, 1.0, 1), ForestConfig{}), FitError);
  ForestConfig none;
  none.B = 0;
  EXPECT_THROW(rsl_fit(ds, none), InputError);
  const auto model = rsl_fit(ds, ForestConfig{5});
  EXPECT_THROW(forest_predict(model, Eigen::VectorXd::Zero(3)), InputError);
}

} // namespace
} // namespace hdlss
