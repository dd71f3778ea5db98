#include "hdlss/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace {

__extension__ using Wide = __int128;

struct SplitScore {
  // purity = sum_L c^2 / n_L + sum_R c^2 / n_R  (larger is better) as num/den
  Wide num = 0;
  Wide den = 1;

  bool better_than(const SplitScore& other) const { return num * other.den > other.num * den; }
};

class TreeBuilder {
public:
  TreeBuilder(const LabeledDataset& data, const TreeConfig& cfg, std::span<const std::size_t> features)
      : data_(data), cfg_(cfg), features_(features.begin(), features.end()), g_(data.num_classes()) {
    std::sort(features_.begin(), features_.end());
    features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.feature_subset = features_;
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

private:
  int majority(const std::vector<std::int64_t>& counts) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
      if (counts[k] > counts[best]) {
        best = k;
      }
    }
    return static_cast<int>(best) + 1;
  }

  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<std::int64_t> counts(static_cast<std::size_t>(g_), 0);
    for (std::size_t r : rows) {
      ++counts[static_cast<std::size_t>(data_.labels[r] - 1)];
    }
    const int label = majority(counts);
    tree_.nodes[static_cast<std::size_t>(id)].label = label;
    const auto n = static_cast<std::int64_t>(rows.size());
    const bool pure = counts[static_cast<std::size_t>(label - 1)] == n;
    if (pure || depth >= cfg_.max_depth || n < 2 * static_cast<std::int64_t>(cfg_.min_leaf)) {
      return id;
    }

    bool found = false;
    SplitScore best;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> column(rows.size());
    std::vector<std::int64_t> left(static_cast<std::size_t>(g_));
    for (std::size_t f : features_) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        column[i] = {data_.features(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(f)),
                     data_.labels[rows[i]]};
      }
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0);
      Wide sq_left = 0;
      Wide sq_right = 0;
      for (std::int64_t c : counts) {
        sq_right += static_cast<Wide>(c) * c;
      }
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        const auto k = static_cast<std::size_t>(column[i].second - 1);
        // move one row from right to left: c^2 bookkeeping
        const std::int64_t right_before = counts[k] - left[k];
        sq_right -= static_cast<Wide>(2 * right_before - 1);
        sq_left += static_cast<Wide>(2 * left[k] + 1);
        ++left[k];
        if (column[i].first == column[i + 1].first) {
          continue;
        }
        const auto n_left = static_cast<std::int64_t>(i + 1);
        const std::int64_t n_right = n - n_left;
        if (n_left < cfg_.min_leaf || n_right < cfg_.min_leaf) {
          continue;
        }
        const SplitScore score{sq_left * n_right + sq_right * n_left, static_cast<Wide>(n_left) * n_right};
        if (!found || score.better_than(best)) {
          double threshold = 0.5 * (column[i].first + column[i + 1].first);
          if (!(threshold < column[i + 1].first)) {
            threshold = column[i].first;
          }
          found = true;
          best = score;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }
    if (!found) {
      return id;
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      const double v = data_.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(best_feature));
      (v <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left_rows), depth + 1);
    const int r = grow(std::move(right_rows), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(best_feature);
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const LabeledDataset& data_;
  TreeConfig cfg_;
  std::vector<std::size_t> features_;
  int g_;
  DecisionTree tree_;
};

template <typename T>
void put(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

} // namespace

void TreeConfig::validate() const {
  if (max_depth < 1) {
    throw InputError(fmt::format("tree max_depth must be >= 1, got {}", max_depth));
  }
  if (min_leaf < 1) {
    throw InputError(fmt::format("tree min_leaf must be >= 1, got {}", min_leaf));
  }
}

int DecisionTree::depth() const {
  if (nodes.empty()) {
    return 0;
  }
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    deepest = std::max(deepest, level[i]);
    if (node.feature >= 0) {
      level[static_cast<std::size_t>(node.left)] = level[i] + 1;
      level[static_cast<std::size_t>(node.right)] = level[i] + 1;
    }
  }
  return deepest;
}

int DecisionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& node = nodes[at];
    at = static_cast<std::size_t>(x(node.feature) <= node.threshold ? node.left : node.right);
  }
  return nodes[at].label;
}

DecisionTree tree_fit(const LabeledDataset& data, std::span<const std::size_t> rows, const TreeConfig& cfg,
                      std::span<const std::size_t> allowed_features) {
  cfg.validate();
  if (rows.empty()) {
    throw FitError("tree_fit: empty data");
  }
  if (allowed_features.empty()) {
    throw FitError("tree_fit: no allowed features");
  }
  for (std::size_t f : allowed_features) {
    if (f >= data.p()) {
      throw InputError(fmt::format("tree_fit: feature index {} out of range (p = {})", f, data.p()));
    }
  }
  TreeBuilder builder(data, cfg, allowed_features);
  return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

DecisionTree tree_fit(const LabeledDataset& data, const TreeConfig& cfg, std::span<const std::size_t> allowed_features) {
  std::vector<std::size_t> rows(data.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return tree_fit(data, rows, cfg, allowed_features);
}

std::string ForestConfig::mode_string() const {
  switch (d_mode) {
  case SubspaceMode::fixed:
    return fmt::format("{}", d);
  case SubspaceMode::sqrt:
    return "sqrt";
  case SubspaceMode::uniform_random:
    return "uniform";
  case SubspaceMode::all_features:
    return "all";
  }
  return "sqrt";
}

ForestConfig ForestConfig::with_mode(const std::string& mode) {
  ForestConfig cfg;
  if (mode == "sqrt") {
    cfg.d_mode = SubspaceMode::sqrt;
  } else if (mode == "uniform") {
    cfg.d_mode = SubspaceMode::uniform_random;
  } else if (mode == "all") {
    cfg.d_mode = SubspaceMode::all_features;
  } else {
    char* end = nullptr;
    const long d = std::strtol(mode.c_str(), &end, 10);
    if (end == mode.c_str() || *end != '\0' || d < 1) {
      throw InputError(fmt::format("forest d mode '{}': expected sqrt, uniform, all or a positive integer", mode));
    }
    cfg.d_mode = SubspaceMode::fixed;
    cfg.d = static_cast<int>(d);
  }
  return cfg;
}

ForestModel rsl_fit(const LabeledDataset& train, const ForestConfig& cfg, const TreeConfig& tree_cfg) {
  tree_cfg.validate();
  if (cfg.B < 1) {
    throw InputError(fmt::format("forest needs B >= 1, got {}", cfg.B));
  }
  const std::size_t p = train.p();
  if (cfg.d_mode != SubspaceMode::all_features && p < 2) {
    throw FitError("random subspace modes need p >= 2");
  }
  if (cfg.d_mode == SubspaceMode::fixed && (cfg.d < 1 || static_cast<std::size_t>(cfg.d) >= p)) {
    throw FitError(fmt::format("fixed subspace size d = {} must satisfy 1 <= d < p = {}", cfg.d, p));
  }
  ForestModel model;
  model.config = cfg;
  model.tree_config = tree_cfg;
  model.num_classes = train.num_classes();
  model.num_features = p;
  model.trees.reserve(static_cast<std::size_t>(cfg.B));
  for (int b = 0; b < cfg.B; ++b) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(b)));
    const std::vector<std::size_t> rows = bootstrap_indices(rng, train.n());
    std::size_t d = p;
    switch (cfg.d_mode) {
    case SubspaceMode::fixed:
      d = static_cast<std::size_t>(cfg.d);
      break;
    case SubspaceMode::sqrt:
      d = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
      break;
    case SubspaceMode::uniform_random:
      d = 1 + uniform_index(rng, p - 1);
      break;
    case SubspaceMode::all_features:
      d = p;
      break;
    }
    const std::vector<std::size_t> features = sample_without_replacement(rng, p, d);
    model.trees.push_back(tree_fit(train, rows, tree_cfg, features));
  }
  return model;
}

int majority_vote(std::span<const int> votes) {
  if (votes.empty()) {
    throw InputError("majority_vote of an empty sequence");
  }
  const int top = *std::max_element(votes.begin(), votes.end());
  std::vector<int> counts(static_cast<std::size_t>(std::max(top, 0)) + 1, 0);
  for (int v : votes) {
    if (v < 1) {
      throw InputError(fmt::format("majority_vote: invalid label {}", v));
    }
    ++counts[static_cast<std::size_t>(v)];
  }
  std::size_t best = 1;
  for (std::size_t k = 2; k < counts.size(); ++k) {
    if (counts[k] > counts[best]) {
      best = k;
    }
  }
  return static_cast<int>(best);
}

int forest_predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.num_features) {
    throw InputError(fmt::format("dimension mismatch: model has p = {}, input has {}", model.num_features, x.size()));
  }
  std::vector<int> votes;
  votes.reserve(model.trees.size());
  for (const auto& tree : model.trees) {
    votes.push_back(tree.predict(x));
  }
  return majority_vote(votes);
}

double oob_probability(std::uint64_t n) {
  if (n == 0) {
    throw InputError("oob_probability needs n >= 1");
  }
  const auto nn = static_cast<double>(n);
  return std::pow(1.0 - 1.0 / nn, nn);
}

std::string serialize(const ForestModel& model) {
  std::string out = "HDRF";
  put<std::uint32_t>(out, 1); // format version
  put<std::int32_t>(out, model.config.B);
  put<std::int32_t>(out, static_cast<std::int32_t>(model.config.d_mode));
  put<std::int32_t>(out, model.config.d);
  put<std::uint64_t>(out, model.config.seed);
  put<std::int32_t>(out, model.tree_config.max_depth);
  put<std::int32_t>(out, model.tree_config.min_leaf);
  put<std::int32_t>(out, model.num_classes);
  put<std::uint64_t>(out, model.num_features);
  put<std::uint64_t>(out, model.trees.size());
  for (const auto& tree : model.trees) {
    put<std::uint64_t>(out, tree.feature_subset.size());
    for (std::size_t f : tree.feature_subset) {
      put<std::uint64_t>(out, f);
    }
    put<std::uint64_t>(out, tree.nodes.size());
    for (const auto& node : tree.nodes) {
      put<std::int32_t>(out, node.feature);
      put<double>(out, node.threshold);
      put<std::int32_t>(out, node.left);
      put<std::int32_t>(out, node.right);
      put<std::int32_t>(out, node.label);
    }
  }
  return out;
}

} // namespace hdlss
