#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "hdlss/error.hpp"
#include "hdlss/simca.hpp"
#include "support/fixtures.hpp"

namespace hdlss {
namespace {

void expect_valid(const SimcaClassModel& cls) {
  const Eigen::Index k = cls.loadings.cols();
  const Eigen::MatrixXd gram = cls.loadings.transpose() * cls.loadings;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-9);
  for (Eigen::Index i = 0; i < k; ++i) {
    EXPECT_GT(cls.eigenvalues(i), 0.0);
    if (i > 0) {
      EXPECT_LE(cls.eigenvalues(i), cls.eigenvalues(i - 1));
    }
  }
}

TEST(Simca, RankOneClass) {
  Eigen::MatrixXd rows(12, 3);
  const Eigen::Vector3d dir(1.0, -2.0, 0.5);
  for (int i = 0; i < 12; ++i) {
    rows.row(i) = (0.3 * i - 1.0) * dir.transpose() + Eigen::RowVector3d(1, 1, 1);
  }
  const auto cls = simca_fit_class(rows);
  EXPECT_EQ(cls.loadings.cols(), 1);
  for (int i = 0; i < 12; ++i) {
    EXPECT_LT(simca_distances(cls, rows.row(i).transpose()).od, 1e-9);
  }
  expect_valid(cls);
}

TEST(Simca, FullRetentionCap) {
  const Eigen::MatrixXd low_p = testing::gaussian_matrix(10, 5, 1);
  EXPECT_EQ(simca_fit_class(low_p, SimcaOptions{1.0, 0.25, 0.975}).loadings.cols(), 5);
  const Eigen::MatrixXd high_p = testing::gaussian_matrix(10, 20, 2);
  EXPECT_EQ(simca_fit_class(high_p, SimcaOptions{1.0, 0.0, 0.975}).loadings.cols(), 8);
}

TEST(Simca, FarOutlierIsTrimmed) {
  // Spread along a plane in the first two coordinates; one row sits far off that plane.
  Eigen::MatrixXd rows = testing::gaussian_matrix(20, 4, 3);
  rows.leftCols(2) *= 10.0;
  rows.rightCols(2) *= 0.1;
  rows.row(7) << 0.0, 0.0, 8.0, 8.0;

  // First-pass orthogonal distances computed directly.
  Eigen::VectorXd center(4);
  for (int j = 0; j < 4; ++j) {
    std::vector<double> col(rows.col(j).data(), rows.col(j).data() + 20);
    std::sort(col.begin(), col.end());
    center(j) = 0.5 * (col[9] + col[10]);
  }
  const Eigen::MatrixXd centered = rows.rowwise() - center.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd var = svd.singularValues().array().square();
  Eigen::Index k = 0;
  for (double acc = 0.0; acc < 0.90 * var.sum(); ++k) {
    acc += var(k);
  }
  const Eigen::MatrixXd V = svd.matrixV().leftCols(k);
  const Eigen::VectorXd od = (centered - centered * V * V.transpose()).rowwise().norm();
  Eigen::Index worst = 0;
  od.maxCoeff(&worst);
  ASSERT_EQ(worst, 7);

  const auto cls = simca_fit_class(rows);
  EXPECT_EQ(std::count(cls.kept_rows.begin(), cls.kept_rows.end(), std::size_t{7}), 0);
  EXPECT_EQ(cls.kept_rows.size(), 15U);
  expect_valid(cls);
}

TEST(Simca, CenterIsCoordinatewiseMedian) {
  Eigen::MatrixXd rows(5, 2);
  rows << 1, 10, 2, 30, 3, 20, 4, 50, 100, 40;
  const auto cls = simca_fit_class(rows);
  EXPECT_DOUBLE_EQ(cls.center(0), 3.0);
  EXPECT_DOUBLE_EQ(cls.center(1), 30.0);
}

TEST(Simca, CenterPointAssignedToItsClass) {
  const auto ds = testing::gaussian_classes({20, 20}, 4, 6.0, 4);
  const auto model = rsimca_fit(ds);
  EXPECT_EQ(rsimca_predict(model, model.classes[0].center), 1);
  EXPECT_EQ(rsimca_predict(model, model.classes[1].center), 2);
}

TEST(Simca, IdenticalModelsTieToLabelOne) {
  const auto ds = testing::gaussian_classes({20}, 3, 0.0, 5);
  SimcaModel model;
  const auto cls = simca_fit_class(ds.features);
  model.classes = {cls, cls};
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(rsimca_predict(model, testing::gaussian_matrix(3, 1, static_cast<Seed>(i))), 1);
  }
}

TEST(Simca, SeparatedRankOneClasses) {
  auto make = [](int n, Seed seed) {
    const Eigen::MatrixXd t = testing::gaussian_matrix(n, 1, seed);
    const Eigen::MatrixXd noise = 0.05 * testing::gaussian_matrix(n, 5, seed + 1);
    Eigen::MatrixXd X(n, 5);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      const int k = i % 2;
      Eigen::RowVectorXd dir = Eigen::RowVectorXd::Zero(5);
      dir(k) = 1.0;
      Eigen::RowVectorXd shift = Eigen::RowVectorXd::Zero(5);
      shift(4) = k == 0 ? 0.0 : 3.0;
      X.row(i) = 2.0 * t(i) * dir + shift + noise.row(i);
      labels.push_back(k + 1);
    }
    return testing::make_dataset(X, labels);
  };
  const auto train = make(60, 10);
  const auto test = make(400, 20);
  const auto model = rsimca_fit(train);
  int correct = 0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    correct += rsimca_predict(model, test.features.row(static_cast<Eigen::Index>(i)).transpose()) == test.labels[i];
  }
  EXPECT_GE(correct, 380);
}

TEST(Simca, LoadingsOrthonormalOnRandomClasses) {
  for (Seed seed = 0; seed < 10; ++seed) {
    const auto ds = testing::gaussian_classes({12, 17}, 30, 2.0, seed);
    for (const auto& cls : rsimca_fit(ds).classes) {
      expect_valid(cls);
      EXPECT_LE(cls.loadings.cols(), 10);
    }
  }
}

TEST(Simca, Preconditions) {
  EXPECT_THROW(rsimca_fit(testing::gaussian_classes({3, 10}, 2, 1.0, 1)), FitError);
  EXPECT_THROW(simca_fit_class(testing::gaussian_matrix(8, 2, 1), SimcaOptions{1.5, 0.25, 0.975}), InputError);
}

} // namespace
} // namespace hdlss
