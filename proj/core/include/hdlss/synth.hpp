#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/dataset.hpp"
#include "hdlss/random.hpp"

namespace hdlss {

enum class CovKind { equicorrelation, ar1 };

std::string to_string(CovKind kind);
CovKind parse_cov_kind(const std::string& text);

/// Sigma(tau, rho): equicorrelation tau[(1-rho)I + rho 11'] or AR(1) tau*rho^|i-j|.
struct CovSpec {
  CovKind kind = CovKind::equicorrelation;
  double tau = 1.0;
  double rho = 0.0;
  int p = 1;

  void validate() const;
};

/// Contaminating component N(mu_k + eta, kappa * Sigma) drawn with probability epsilon.
struct ContaminationSpec {
  double epsilon = 0.0;
  Eigen::VectorXd eta;
  double kappa = 1.0;

  /// eta = shift * 1_p
  static ContaminationSpec constant_shift(double epsilon, double shift, double kappa, int p);
  void validate(int p) const;
};

inline constexpr int kDefaultClassSize = 30;
inline constexpr double kDefaultMeanSeparation = 2.0;
inline constexpr double kDefaultEtaShift = 3.0;

struct SimDesign {
  int G = 2;
  int p = 1;
  std::vector<int> n_per_class;
  std::vector<Eigen::VectorXd> class_means;
  CovSpec cov;
  ContaminationSpec contamination;
  Seed seed = 0;

  /// Means (k-1) * separation * e_1, eta = eta_shift * 1_p, equicorrelation with tau = 1.
  static SimDesign standard(int G, int p, std::vector<int> n_per_class, double rho, double epsilon,
                            double kappa, Seed seed, double separation = kDefaultMeanSeparation,
                            double eta_shift = kDefaultEtaShift);

  int total_n() const;
  void validate() const;
};

/// Throws InputError when the matrix is not positive definite.
Eigen::MatrixXd build_cov(const CovSpec& spec);

/// Rows mu + L z, L the lower Cholesky factor of sigma, z standard normal.
Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, std::size_t n, Seed seed);

struct ContaminatedSample {
  Eigen::MatrixXd rows;
  std::vector<bool> contaminated;
};

/// Draws n_k rows of class k (1-based) from the epsilon-contaminated mixture.
ContaminatedSample sample_contaminated_class(int k, const SimDesign& design);

/// Holds the Cholesky factor of a design's Sigma so repeated generation at
/// large p does not refactor.
class DesignSampler {
public:
  explicit DesignSampler(SimDesign design);

  const SimDesign& design() const { return design_; }

  ContaminatedSample sample_class(int k, Seed design_seed) const;

  /// Class-blocked draw, then a global shuffle seeded by `design_seed`.
  LabeledDataset generate(Seed design_seed, std::vector<bool>* contaminated = nullptr) const;

private:
  SimDesign design_;
  Eigen::MatrixXd chol_;
};

LabeledDataset generate(const SimDesign& design);

} // namespace hdlss
