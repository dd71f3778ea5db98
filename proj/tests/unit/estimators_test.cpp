#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hdlss/error.hpp"
#include "hdlss/estimators.hpp"
#include "support/fixtures.hpp"

namespace hdlss {
namespace {

TEST(SampleMeanCov, TwoPoints) {
  Eigen::MatrixXd X(2, 2);
  X << 0, 0, 2, 2;
  const auto est = sample_mean_cov(X);
  EXPECT_TRUE(est.mu.isApprox(Eigen::Vector2d(1, 1)));
  EXPECT_DOUBLE_EQ(est.sigma(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(est.sigma(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(est.sigma(1, 1), 2.0);
}

TEST(SampleMeanCov, IdenticalRowsAreDegenerate) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(4, 3, 1.5);
  const auto est = sample_mean_cov(X);
  EXPECT_TRUE(est.degenerate);
  EXPECT_EQ(est.sigma, Eigen::MatrixXd::Zero(3, 3));
}

TEST(SampleMeanCov, MatchesTwoPassOracle) {
  for (Seed seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd X = testing::gaussian_matrix(5, 3, seed);
    const auto est = sample_mean_cov(X);
    for (int a = 0; a < 3; ++a) {
      double mean_a = 0.0;
      for (int i = 0; i < 5; ++i) {
        mean_a += X(i, a);
      }
      mean_a /= 5.0;
      EXPECT_NEAR(est.mu(a), mean_a, 1e-12);
      for (int b = 0; b < 3; ++b) {
        double mean_b = 0.0;
        for (int i = 0; i < 5; ++i) {
          mean_b += X(i, b);
        }
        mean_b /= 5.0;
        double s = 0.0;
        for (int i = 0; i < 5; ++i) {
          s += (X(i, a) - mean_a) * (X(i, b) - mean_b);
        }
        EXPECT_NEAR(est.sigma(a, b), s / 4.0, 1e-12);
      }
    }
  }
  EXPECT_THROW(sample_mean_cov(Eigen::MatrixXd::Zero(1, 2)), FitError);
}

TEST(PooledCov, Examples) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  std::vector<GroupScatter> equal = {{10, I}, {10, I}};
  EXPECT_TRUE(pooled_cov(equal).isApprox(I));
  std::vector<GroupScatter> one = {{7, 3.0 * I}};
  EXPECT_TRUE(pooled_cov(one).isApprox(3.0 * I));
  std::vector<GroupScatter> mixed = {{3, 2.0 * I}, {5, I}};
  EXPECT_TRUE(pooled_cov(mixed).isApprox((4.0 / 3.0) * I));
  std::vector<GroupScatter> empty_denominator = {{1, I}};
  EXPECT_THROW(pooled_cov(empty_denominator), FitError);
}

TEST(PooledCov, IdenticalGroupsReturnS) {
  const Eigen::MatrixXd X = testing::gaussian_matrix(10, 4, 3);
  const Eigen::MatrixXd S = sample_mean_cov(X).sigma;
  std::vector<GroupScatter> groups = {{4, S}, {9, S}, {21, S}};
  EXPECT_LT((pooled_cov(groups) - S).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Regularize, Examples) {
  EXPECT_TRUE(regularize(Eigen::MatrixXd::Zero(3, 3), RegularizationSpec::ridge(1.0)).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  Eigen::MatrixXd S(2, 2);
  S << 3, 1, 1, 5;
  EXPECT_TRUE(regularize(S, RegularizationSpec::convex(1.0)).isApprox(4.0 * Eigen::MatrixXd::Identity(2, 2)));
  Eigen::MatrixXd D = Eigen::Vector2d(2.0, 0.0).asDiagonal();
  const Eigen::MatrixXd out = regularize(D, RegularizationSpec::convex(0.5));
  EXPECT_NEAR(out(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(out(1, 1), 0.5, 1e-15);
  EXPECT_EQ(out(0, 1), 0.0);
}

TEST(Regularize, ConvexPreservesTrace) {
  const Eigen::MatrixXd X = testing::gaussian_matrix(8, 5, 12);
  const Eigen::MatrixXd S = sample_mean_cov(X).sigma;
  for (double alpha : {0.01, 0.3, 0.77, 1.0}) {
    EXPECT_NEAR(regularize(S, RegularizationSpec::convex(alpha)).trace(), S.trace(), 1e-12);
  }
}

TEST(Regularize, ParseAndValidate) {
  EXPECT_EQ(RegularizationSpec::parse("ridge:0.5"), RegularizationSpec::ridge(0.5));
  EXPECT_EQ(RegularizationSpec::parse("none"), RegularizationSpec::none());
  EXPECT_EQ(RegularizationSpec::parse(RegularizationSpec::convex(0.25).to_string()), RegularizationSpec::convex(0.25));
  EXPECT_THROW(RegularizationSpec::parse("ridge:-1"), InputError);
  EXPECT_THROW(RegularizationSpec::parse("lasso:1"), InputError);
}

TEST(DefaultH, Examples) {
  EXPECT_EQ(default_h(20, 3).h, 12);
  EXPECT_EQ(default_h(10, 1).h, 6);
  const auto clamped = default_h(4, 100);
  EXPECT_EQ(clamped.h, 3);
  EXPECT_TRUE(clamped.clamped);
  EXPECT_FALSE(default_h(20, 3).clamped);
}

// Index set of the h-subset with the smallest variance, by brute force.
std::vector<std::size_t> min_variance_subset(const std::vector<double>& x, int h) {
  const int n = static_cast<int>(x.size());
  std::vector<std::size_t> best;
  double best_var = INFINITY;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    if (__builtin_popcount(mask) != h) {
      continue;
    }
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1U << i)) {
        mean += x[static_cast<std::size_t>(i)];
      }
    }
    mean /= h;
    double var = 0.0;
    std::vector<std::size_t> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1U << i)) {
        var += (x[static_cast<std::size_t>(i)] - mean) * (x[static_cast<std::size_t>(i)] - mean);
        idx.push_back(static_cast<std::size_t>(i));
      }
    }
    if (var < best_var) {
      best_var = var;
      best = idx;
    }
  }
  return best;
}

TEST(McdExact, OneDimensionalExample) {
  const std::vector<double> x = {0, 1, 2.5, 3, 100};
  const Eigen::MatrixXd X = Eigen::Map<const Eigen::VectorXd>(x.data(), 5);
  const auto est = mcd_exact(X, 3);
  EXPECT_EQ(est.support, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(est.support, min_variance_subset(x, 3));
  EXPECT_EQ(est.method, ScatterMethod::mcd_exact);
  EXPECT_EQ(est.h, 3);
}

TEST(McdExact, FullSubsetEqualsSample) {
  const Eigen::MatrixXd X = testing::gaussian_matrix(9, 2, 5);
  const auto mcd = mcd_exact(X, 9);
  const auto sample = sample_mean_cov(X);
  EXPECT_TRUE(mcd.mu.isApprox(sample.mu, 1e-12));
  EXPECT_TRUE(mcd.sigma.isApprox(sample.sigma, 1e-12));
  EXPECT_DOUBLE_EQ(mcd.consistency_factor, 1.0);
}

TEST(McdExact, RejectsPAtLeastH) {
  const Eigen::MatrixXd X = testing::gaussian_matrix(8, 3, 1);
  try {
    mcd_exact(X, 3);
    FAIL() << "expected an error";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("cannot be computed when p>h"), std::string::npos);
  }
  EXPECT_THROW(mcd_exact(testing::gaussian_matrix(26, 1, 1), 14), FitError);
}

TEST(McdExact, AffineEquivariantSupport) {
  for (Seed seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    const int n = 6 + static_cast<int>(uniform_index(rng, 5));
    const int p = 1 + static_cast<int>(uniform_index(rng, 2));
    const Eigen::MatrixXd X = testing::gaussian_matrix(n, p, seed + 100);
    Eigen::MatrixXd A = testing::gaussian_matrix(p, p, seed + 200) + 2.0 * Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd b = testing::gaussian_matrix(p, 1, seed + 300);
    const Eigen::MatrixXd Y = (X * A.transpose()).rowwise() + b.transpose();
    const int h = default_h(n, p).h;
    EXPECT_EQ(mcd_exact(X, h).support, mcd_exact(Y, h).support) << "seed " << seed;
  }
}

TEST(McdFast, MatchesExactOnExample) {
  const Eigen::MatrixXd X = Eigen::Vector<double, 5>(0, 1, 2.5, 3, 100);
  McdOptions opts;
  opts.seed = 9;
  EXPECT_EQ(mcd_fast(X, 3, opts).support, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(McdFast, DeterministicAndMonotoneTraces) {
  const Eigen::MatrixXd X = testing::gaussian_matrix(40, 3, 8);
  McdOptions opts;
  opts.seed = 1234;
  McdTrace trace;
  const auto a = mcd_fast(X, default_h(40, 3).h, opts, &trace);
  const auto b = mcd_fast(X, default_h(40, 3).h, opts);
  EXPECT_EQ(a.support, b.support);
  EXPECT_EQ(a.sigma, b.sigma);
  ASSERT_EQ(trace.log_dets.size(), 500U);
  for (const auto& run : trace.log_dets) {
    for (std::size_t i = 1; i < run.size(); ++i) {
      EXPECT_LE(run[i], run[i - 1]);
    }
  }
}

TEST(McdFast, NeverBeatsExactAndUsuallyMatches) {
  int equal = 0;
  for (Seed seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const int p = 1 + static_cast<int>(uniform_index(rng, 3));
    const int n = p + 5 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(12 - p - 4)));
    Eigen::MatrixXd X = testing::gaussian_matrix(n, p, seed + 1000);
    X.row(0).array() += 8.0; // one outlier
    const int h = default_h(n, p).h;
    const auto exact = mcd_exact(X, h);
    McdOptions opts;
    opts.seed = seed;
    const auto fast = mcd_fast(X, h, opts);
    EXPECT_GE(fast.raw_log_det, exact.raw_log_det - 1e-9);
    if (fast.support == exact.support) {
      ++equal;
    }
  }
  EXPECT_GE(equal, 95);
}

TEST(McdFast, ConsistencyFactor) {
  EXPECT_DOUBLE_EQ(mcd_consistency_factor(20, 3, 20), 1.0);
  EXPECT_GT(mcd_consistency_factor(20, 3, 12), 1.0);
}

TEST(Univariate, MedianMadExample) {
  const std::vector<double> x = {1, 2, 3, 4, 100};
  const auto est = univariate(x, UnivariateKind::median_mad);
  EXPECT_DOUBLE_EQ(est.location, 3.0);
  EXPECT_NEAR(est.scale, 1.4826, 1e-12);
}

TEST(Univariate, ClassicalSymmetric) {
  const std::vector<double> x = {-2.5, 0, 2.5};
  const auto est = univariate(x, UnivariateKind::classical);
  EXPECT_NEAR(est.location, 0.0, 1e-15);
  EXPECT_NEAR(est.scale, 2.5, 1e-12);
}

TEST(Univariate, HuberFixedPoint) {
  const std::vector<double> x = {0, 0, 0, 10};
  const auto est = univariate(x, UnivariateKind::huber);
  EXPECT_GT(est.location, 0.0);
  EXPECT_LT(est.location, 2.5);
  // Independent iteration with the scale held at the fallback MAD value.
  const double s = std::sqrt(std::numbers::pi / 2.0) * 2.5;
  double mu = 0.0;
  for (int it = 0; it < 1000; ++it) {
    double num = 0.0;
    double den = 0.0;
    for (double v : x) {
      const double r = std::abs(v - mu) / s;
      const double w = r <= 1.345 ? 1.0 : 1.345 / r;
      num += w * v;
      den += w;
    }
    mu = num / den;
  }
  EXPECT_NEAR(est.location, mu, 1e-8);
}

TEST(Univariate, ConstantInputIsDegenerate) {
  const std::vector<double> x = {4, 4, 4, 4};
  for (auto kind : {UnivariateKind::classical, UnivariateKind::median_mad, UnivariateKind::huber,
                    UnivariateKind::s_estimator}) {
    const auto est = univariate(x, kind);
    EXPECT_TRUE(est.degenerate);
    EXPECT_EQ(est.scale, 0.0);
    EXPECT_DOUBLE_EQ(est.location, 4.0);
  }
  EXPECT_THROW(univariate(std::vector<double>{1.0}, UnivariateKind::classical), InputError);
}

TEST(Univariate, ShiftScaleEquivariance) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd v = testing::gaussian_matrix(15 + static_cast<int>(seed), 1, seed);
    std::vector<double> x(v.data(), v.data() + v.size());
    x[0] += 25.0;
    for (auto kind : {UnivariateKind::classical, UnivariateKind::median_mad, UnivariateKind::huber,
                      UnivariateKind::s_estimator}) {
      for (double a : {-3.0, 0.5, 7.0}) {
        const double b = 1.25;
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [&](double t) { return a * t + b; });
        const auto ex = univariate(x, kind);
        const auto ey = univariate(y, kind);
        EXPECT_NEAR(ey.location, a * ex.location + b, 1e-8) << to_string(kind);
        EXPECT_NEAR(ey.scale, std::abs(a) * ex.scale, 1e-8) << to_string(kind);
      }
    }
  }
}

TEST(Univariate, SEstimatorIsConsistentAtTheNormal) {
  const Eigen::VectorXd v = testing::gaussian_matrix(20000, 1, 77);
  const std::vector<double> x(v.data(), v.data() + v.size());
  const auto est = univariate(x, UnivariateKind::s_estimator);
  EXPECT_NEAR(est.scale, 1.0, 0.05);
  EXPECT_NEAR(est.location, 0.0, 0.05);
}

} // namespace
} // namespace hdlss
