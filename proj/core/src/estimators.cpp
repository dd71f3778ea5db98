#include "hdlss/estimators.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

std::string to_string(ScatterMethod method) {
  switch (method) {
  case ScatterMethod::sample:
    return "sample";
  case ScatterMethod::pooled:
    return "pooled";
  case ScatterMethod::mcd_exact:
    return "mcd_exact";
  case ScatterMethod::mcd_fast:
    return "mcd_fast";
  }
  return "unknown";
}

LocationScatter sample_mean_cov(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) {
    throw FitError(fmt::format("sample covariance needs n >= 2 rows, got {}", X.rows()));
  }
  LocationScatter out;
  out.method = ScatterMethod::sample;
  out.mu = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - out.mu.transpose();
  out.sigma = (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(out.sigma);
  if (llt.info() != Eigen::Success) {
    out.degenerate = true;
    out.raw_log_det = -std::numeric_limits<double>::infinity();
  } else {
    out.raw_log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  return out;
}

Eigen::MatrixXd pooled_cov(std::span<const GroupScatter> groups) {
  if (groups.empty()) {
    throw FitError("pooled covariance of zero groups");
  }
  double total = 0.0;
  const Eigen::Index p = groups.front().S.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  for (const auto& g : groups) {
    if (g.S.rows() != p || g.S.cols() != p) {
      throw FitError("pooled covariance: group matrices differ in shape");
    }
    acc += (static_cast<double>(g.n) - 1.0) * g.S;
    total += static_cast<double>(g.n);
  }
  const double denom = total - static_cast<double>(groups.size());
  if (!(denom > 0.0)) {
    throw FitError(fmt::format("pooled covariance: sum n_k - G = {} is not positive", denom));
  }
  return acc / denom;
}

void RegularizationSpec::validate() const {
  if (kind == RegKind::ridge && !(lambda > 0.0)) {
    throw InputError(fmt::format("ridge regularization needs lambda > 0, got {}", lambda));
  }
  if (kind == RegKind::convex && !(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError(fmt::format("convex regularization needs alpha in (0,1], got {}", alpha));
  }
}

std::string RegularizationSpec::to_string() const {
  switch (kind) {
  case RegKind::none:
    return "none";
  case RegKind::ridge:
    return fmt::format("ridge:{}", lambda);
  case RegKind::convex:
    return fmt::format("convex:{}", alpha);
  }
  return "none";
}

RegularizationSpec RegularizationSpec::parse(const std::string& text) {
  if (text == "none" || text.empty()) {
    return none();
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError(fmt::format("regularization '{}': expected none, ridge:<lambda> or convex:<alpha>", text));
  }
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  char* end = nullptr;
  const double value = std::strtod(tail.c_str(), &end);
  if (end == tail.c_str() || *end != '\0') {
    throw InputError(fmt::format("regularization '{}': bad numeric parameter", text));
  }
  RegularizationSpec spec;
  if (head == "ridge") {
    spec = ridge(value);
  } else if (head == "convex") {
    spec = convex(value);
  } else {
    throw InputError(fmt::format("regularization '{}': unknown kind '{}'", text, head));
  }
  spec.validate();
  return spec;
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& sigma, const RegularizationSpec& spec) {
  spec.validate();
  const Eigen::Index p = sigma.rows();
  switch (spec.kind) {
  case RegKind::none:
    return sigma;
  case RegKind::ridge:
    return sigma + spec.lambda * Eigen::MatrixXd::Identity(p, p);
  case RegKind::convex: {
    const double level = sigma.trace() / static_cast<double>(p);
    return (1.0 - spec.alpha) * sigma + spec.alpha * level * Eigen::MatrixXd::Identity(p, p);
  }
  }
  return sigma;
}

SubsetSize default_h(int n, int p) {
  if (n < 2) {
    throw InputError(fmt::format("default_h needs n >= 2, got {}", n));
  }
  const int raw = (n + p + 1) / 2;
  const int lo = (n + 1) / 2;
  const int hi = n - 1;
  SubsetSize out{raw, false};
  if (raw < lo) {
    out = {lo, true};
  } else if (raw > hi) {
    out = {hi, true};
  }
  return out;
}

} // namespace hdlss
