#include "hdlss/synth.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

std::string to_string(CovKind kind) {
  return kind == CovKind::equicorrelation ? "equicorrelation" : "ar1";
}

CovKind parse_cov_kind(const std::string& text) {
  if (text == "equicorrelation") {
    return CovKind::equicorrelation;
  }
  if (text == "ar1") {
    return CovKind::ar1;
  }
  throw InputError(fmt::format("unknown covariance kind '{}' (expected equicorrelation or ar1)", text));
}

void CovSpec::validate() const {
  if (p < 1) {
    throw InputError(fmt::format("covariance dimension must be positive, got {}", p));
  }
  if (!(tau > 0.0)) {
    throw InputError(fmt::format("tau must be positive, got {}", tau));
  }
  if (kind == CovKind::equicorrelation && !(rho >= 0.0 && rho < 1.0)) {
    throw InputError(fmt::format("equicorrelation rho must lie in [0,1), got {}", rho));
  }
  if (kind == CovKind::ar1 && !(rho > -1.0 && rho < 1.0)) {
    throw InputError(fmt::format("ar1 rho must lie in (-1,1), got {}", rho));
  }
}

ContaminationSpec ContaminationSpec::constant_shift(double epsilon, double shift, double kappa, int p) {
  ContaminationSpec c;
  c.epsilon = epsilon;
  c.eta = Eigen::VectorXd::Constant(p, shift);
  c.kappa = kappa;
  return c;
}

void ContaminationSpec::validate(int p) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError(fmt::format("epsilon must lie in [0,1], got {}", epsilon));
  }
  if (!(kappa >= 1.0)) {
    throw InputError(fmt::format("kappa must be >= 1, got {}", kappa));
  }
  if (eta.size() != p) {
    throw InputError(fmt::format("eta has length {}, expected {}", eta.size(), p));
  }
}

SimDesign SimDesign::standard(int G, int p, std::vector<int> n_per_class, double rho, double epsilon,
                              double kappa, Seed seed, double separation, double eta_shift) {
  SimDesign d;
  d.G = G;
  d.p = p;
  if (n_per_class.size() == 1 && G > 1) {
    n_per_class.assign(static_cast<std::size_t>(G), n_per_class.front());
  }
  d.n_per_class = std::move(n_per_class);
  for (int k = 1; k <= G; ++k) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    if (p > 0) {
      mu(0) = (k - 1) * separation;
    }
    d.class_means.push_back(std::move(mu));
  }
  d.cov = CovSpec{CovKind::equicorrelation, 1.0, rho, p};
  d.contamination = ContaminationSpec::constant_shift(epsilon, eta_shift, kappa, p);
  d.seed = seed;
  return d;
}

int SimDesign::total_n() const {
  return std::accumulate(n_per_class.begin(), n_per_class.end(), 0);
}

void SimDesign::validate() const {
  if (G < 2) {
    throw InputError(fmt::format("design needs G >= 2 classes, got {}", G));
  }
  if (p < 1) {
    throw InputError(fmt::format("design needs p >= 1, got {}", p));
  }
  if (n_per_class.size() != static_cast<std::size_t>(G)) {
    throw InputError(fmt::format("design lists {} class sizes for G = {}", n_per_class.size(), G));
  }
  for (int nk : n_per_class) {
    if (nk < 2) {
      throw InputError(fmt::format("every class needs at least 2 rows, got {}", nk));
    }
  }
  if (class_means.size() != static_cast<std::size_t>(G)) {
    throw InputError(fmt::format("design lists {} class means for G = {}", class_means.size(), G));
  }
  for (const auto& mu : class_means) {
    if (mu.size() != p) {
      throw InputError(fmt::format("class mean has length {}, expected {}", mu.size(), p));
    }
  }
  if (cov.p != p) {
    throw InputError(fmt::format("covariance dimension {} does not match p = {}", cov.p, p));
  }
  cov.validate();
  contamination.validate(p);
}

Eigen::MatrixXd build_cov(const CovSpec& spec) {
  spec.validate();
  const int p = spec.p;
  Eigen::MatrixXd sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j) {
        sigma(i, j) = spec.tau;
      } else if (spec.kind == CovKind::equicorrelation) {
        sigma(i, j) = spec.tau * spec.rho;
      } else {
        sigma(i, j) = spec.tau * std::pow(spec.rho, std::abs(i - j));
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw InputError(fmt::format("Sigma({}, tau={}, rho={}) is not positive definite", to_string(spec.kind),
                                 spec.tau, spec.rho));
  }
  return sigma;
}

namespace {

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw InputError("covariance matrix must be square");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw InputError("covariance matrix is not positive definite (Cholesky failed)");
  }
  return llt.matrixL();
}

// Standard normal vector; drawn coordinate by coordinate so the stream
// consumption order is fixed.
Eigen::VectorXd normal_vector(Rng& rng, Eigen::Index p) {
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    z(j) = standard_normal(rng);
  }
  return z;
}

} // namespace

Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, std::size_t n, Seed seed) {
  if (mu.size() != sigma.rows()) {
    throw InputError("mean and covariance dimensions differ");
  }
  const Eigen::MatrixXd chol = lower_cholesky(sigma);
  Rng rng(seed);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), mu.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = (mu + chol * normal_vector(rng, mu.size())).transpose();
  }
  return out;
}

DesignSampler::DesignSampler(SimDesign design) : design_(std::move(design)) {
  design_.validate();
  chol_ = lower_cholesky(build_cov(design_.cov));
}

ContaminatedSample DesignSampler::sample_class(int k, Seed design_seed) const {
  if (k < 1 || k > design_.G) {
    throw InputError(fmt::format("class index {} outside 1..{}", k, design_.G));
  }
  const auto& mu = design_.class_means[static_cast<std::size_t>(k - 1)];
  const auto& cont = design_.contamination;
  const int n_k = design_.n_per_class[static_cast<std::size_t>(k - 1)];
  const double inflate = std::sqrt(cont.kappa);

  Rng rng(derive_seed(design_seed, static_cast<std::uint64_t>(k)));
  ContaminatedSample out;
  out.rows.resize(n_k, design_.p);
  out.contaminated.resize(static_cast<std::size_t>(n_k));
  for (int i = 0; i < n_k; ++i) {
    const bool flagged = uniform_unit(rng) < cont.epsilon;
    const Eigen::VectorXd z = normal_vector(rng, design_.p);
    if (flagged) {
      out.rows.row(i) = (mu + cont.eta + inflate * (chol_ * z)).transpose();
    } else {
      out.rows.row(i) = (mu + chol_ * z).transpose();
    }
    out.contaminated[static_cast<std::size_t>(i)] = flagged;
  }
  return out;
}

LabeledDataset DesignSampler::generate(Seed design_seed, std::vector<bool>* contaminated) const {
  const int n = design_.total_n();
  Eigen::MatrixXd blocked(n, design_.p);
  std::vector<int> labels;
  std::vector<bool> flags;
  labels.reserve(static_cast<std::size_t>(n));
  Eigen::Index offset = 0;
  for (int k = 1; k <= design_.G; ++k) {
    ContaminatedSample s = sample_class(k, design_seed);
    blocked.middleRows(offset, s.rows.rows()) = s.rows;
    offset += s.rows.rows();
    labels.insert(labels.end(), static_cast<std::size_t>(s.rows.rows()), k);
    flags.insert(flags.end(), s.contaminated.begin(), s.contaminated.end());
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(design_seed);
  shuffle(std::span<std::size_t>(order), rng);

  LabeledDataset ds;
  ds.features.resize(n, design_.p);
  ds.labels.resize(static_cast<std::size_t>(n));
  if (contaminated != nullptr) {
    contaminated->assign(static_cast<std::size_t>(n), false);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    ds.features.row(static_cast<Eigen::Index>(i)) = blocked.row(static_cast<Eigen::Index>(order[i]));
    ds.labels[i] = labels[order[i]];
    if (contaminated != nullptr) {
      (*contaminated)[i] = flags[order[i]];
    }
  }
  ds.name = fmt::format("sim-G{}-p{}-seed{}", design_.G, design_.p, design_seed);
  return ds;
}

ContaminatedSample sample_contaminated_class(int k, const SimDesign& design) {
  return DesignSampler(design).sample_class(k, design.seed);
}

LabeledDataset generate(const SimDesign& design) {
  return DesignSampler(design).generate(design.seed);
}

} // namespace hdlss
