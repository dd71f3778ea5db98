#include "hdlss/classifier.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace {

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

} // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"lda",    "linda",   "dda",    "pp-class", "pp-huber",
                                                 "pp-mad", "pp-sest", "rsimca", "rf"};
  return names;
}

bool is_known_method(std::string_view name) {
  const auto& names = method_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

FittedModel fit_method(std::string_view name, const LabeledDataset& train, const MethodConfig& config, Seed seed) {
  if (name == "lda") {
    return lda_fit(train, config.lda_regularization);
  }
  if (name == "linda") {
    LindaOptions opts = config.linda;
    opts.mcd.seed = seed;
    return linda_fit(train, opts);
  }
  if (name == "dda") {
    return dda_fit(train);
  }
  if (name.starts_with("pp-")) {
    PpOptions opts = config.pp;
    opts.seed = seed;
    UnivariateKind kind;
    if (name == "pp-class") {
      kind = UnivariateKind::classical;
    } else if (name == "pp-huber") {
      kind = UnivariateKind::huber;
    } else if (name == "pp-mad") {
      kind = UnivariateKind::median_mad;
    } else if (name == "pp-sest") {
      kind = UnivariateKind::s_estimator;
    } else {
      throw InputError(fmt::format("unknown method '{}'", name));
    }
    return pp_fit(train, kind, opts);
  }
  if (name == "rsimca") {
    return rsimca_fit(train, config.simca);
  }
  if (name == "rf") {
    ForestConfig forest = config.forest;
    forest.seed = seed;
    return rsl_fit(train, forest, config.tree);
  }
  throw InputError(fmt::format("unknown method '{}'", name));
}

int predict(const FittedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(Overloaded{
                        [&](const DiscriminantModel& m) { return predict(m, x); },
                        [&](const DdaModel& m) { return predict(m, x); },
                        [&](const PPModel& m) { return pp_predict(m, x); },
                        [&](const SimcaModel& m) { return rsimca_predict(m, x); },
                        [&](const ForestModel& m) { return forest_predict(m, x); },
                    },
                    model);
}

std::vector<int> predict_rows(const FittedModel& model, const Eigen::MatrixXd& X) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.push_back(predict(model, X.row(i).transpose()));
  }
  return out;
}

} // namespace hdlss
