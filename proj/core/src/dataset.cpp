#include "hdlss/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "hdlss/error.hpp"
#include "order_stats.hpp"

namespace hdlss {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_finite(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') {
    ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

} // namespace

int LabeledDataset::num_classes() const {
  if (labels.empty()) {
    return 0;
  }
  return *std::max_element(labels.begin(), labels.end());
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  out.feature_names = feature_names;
  out.label_names = label_names;
  out.name = name;
  return out;
}

Eigen::MatrixXd LabeledDataset::class_rows(int k) const {
  const auto count = static_cast<Eigen::Index>(std::count(labels.begin(), labels.end(), k));
  Eigen::MatrixXd out(count, features.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == k) {
      out.row(r++) = features.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

void LabeledDataset::validate() const {
  if (n() < 2) {
    throw InputError(fmt::format("dataset '{}': need at least 2 rows, got {}", name, n()));
  }
  if (p() < 1) {
    throw InputError(fmt::format("dataset '{}': need at least 1 feature", name));
  }
  if (labels.size() != n()) {
    throw InputError(fmt::format("dataset '{}': {} labels for {} rows", name, labels.size(), n()));
  }
  if (!feature_names.empty() && feature_names.size() != p()) {
    throw InputError(fmt::format("dataset '{}': {} feature names for {} columns", name,
                                 feature_names.size(), p()));
  }
  const int g = num_classes();
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(g, 0)), 0);
  for (int y : labels) {
    if (y < 1) {
      throw InputError(fmt::format("dataset '{}': label {} outside 1..G", name, y));
    }
    ++counts[static_cast<std::size_t>(y - 1)];
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      throw InputError(fmt::format("dataset '{}': class {} has no rows", name, k + 1));
    }
  }
  if (!features.allFinite()) {
    throw InputError(fmt::format("dataset '{}': non-finite feature value", name));
  }
}

ClassMembership class_membership(const LabeledDataset& ds) {
  const int g = ds.num_classes();
  ClassMembership m;
  m.indicators = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(ds.n()), g);
  m.counts.assign(static_cast<std::size_t>(g), 0);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const int k = ds.labels[i];
    m.indicators(static_cast<Eigen::Index>(i), k - 1) = 1;
    ++m.counts[static_cast<std::size_t>(k - 1)];
  }
  m.proportions.reserve(m.counts.size());
  for (std::size_t c : m.counts) {
    m.proportions.push_back(static_cast<double>(c) / static_cast<double>(ds.n()));
  }
  return m;
}

std::size_t train_count(std::size_t n_k, double train_fraction) {
  // the small offset keeps exact products such as (2/3)*9 from rounding up
  const double raw = train_fraction * static_cast<double>(n_k);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

SplitIndices split_indices(const LabeledDataset& ds, const SplitPlan& plan) {
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw InputError(fmt::format("train_fraction must lie in (0,1), got {}", plan.train_fraction));
  }
  const int g = ds.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(g));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i] - 1)].push_back(i);
  }
  Rng rng(derive_seed(plan.seed, plan.replication_index));
  SplitIndices out;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& rows = by_class[k];
    const std::size_t n_train = train_count(rows.size(), plan.train_fraction);
    if (n_train == 0 || n_train >= rows.size()) {
      throw InputError(fmt::format(
          "split of '{}': class {} with {} rows leaves an empty train or test part", ds.name, k + 1,
          rows.size()));
    }
    shuffle(std::span<std::size_t>(rows), rng);
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, const SplitPlan& plan) {
  const SplitIndices idx = split_indices(ds, plan);
  return {ds.subset(idx.train), ds.subset(idx.test)};
}

LabeledDataset parse_csv(std::istream& in, const std::string& label_column, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError(fmt::format("{}: empty file, header row expected", source));
  }
  std::vector<std::string> header = split_fields(line);
  for (auto& h : header) {
    h = trim(h);
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw InputError(fmt::format("{}: label column '{}' not found in header", source, label_column));
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t p = header.size() - 1;
  if (p == 0) {
    throw InputError(fmt::format("{}: no feature columns", source));
  }

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError(fmt::format("{}: line {} has {} fields, header has {}", source, line_no,
                                   fields.size(), header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string cell = trim(fields[c]);
      if (c == label_col) {
        raw_labels.push_back(cell);
        continue;
      }
      double v = 0.0;
      if (!parse_finite(cell, v)) {
        throw InputError(fmt::format("{}: cannot parse '{}' as a finite number at row {}, column '{}'",
                                     source, cell, raw_labels.size() + 1, header[c]));
      }
      values.push_back(v);
    }
  }

  const std::size_t n = raw_labels.size();
  std::map<std::string, int> codes;
  for (const auto& raw : raw_labels) {
    codes.emplace(raw, 0);
  }
  if (codes.size() < 2) {
    throw InputError(fmt::format("{}: fewer than 2 classes in column '{}'", source, label_column));
  }

  LabeledDataset ds;
  ds.name = source;
  int next = 1;
  for (auto& [raw, code] : codes) {
    code = next++;
    ds.label_names.push_back(raw);
  }
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * p + j];
    }
    ds.labels.push_back(codes.at(raw_labels[i]));
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) {
      ds.feature_names.push_back(header[c]);
    }
  }
  const ClassMembership m = class_membership(ds);
  for (std::size_t k = 0; k < m.counts.size(); ++k) {
    if (m.counts[k] < 2) {
      throw InputError(fmt::format("{}: class '{}' has fewer than 2 rows", source, ds.label_names[k]));
    }
  }
  ds.validate();
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open dataset file '{}'", path.string()));
  }
  return parse_csv(in, label_column, path.filename().string());
}

void write_csv(const LabeledDataset& ds, std::ostream& out, const std::string& label_column) {
  for (std::size_t j = 0; j < ds.p(); ++j) {
    const std::string name = ds.feature_names.empty() ? fmt::format("x{}", j + 1) : ds.feature_names[j];
    out << quote_field(name) << ',';
  }
  out << quote_field(label_column) << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.p(); ++j) {
      out << fmt::format("{}", ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
          << ',';
    }
    const int y = ds.labels[i];
    if (ds.label_names.empty()) {
      out << y << '\n';
    } else {
      out << quote_field(ds.label_names[static_cast<std::size_t>(y - 1)]) << '\n';
    }
  }
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) {
    throw InputError(fmt::format("cannot write '{}'", path.string()));
  }
  write_csv(ds, out, label_column);
}

LabeledDataset normalize_log_median(LabeledDataset ds) {
  const auto n = ds.features.rows();
  const auto p = ds.features.cols();
  std::vector<double> row(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = ds.features(i, j);
      if (!(v > 0.0)) {
        const std::string col =
            ds.feature_names.empty() ? fmt::format("{}", j + 1) : ds.feature_names[static_cast<std::size_t>(j)];
        throw InputError(fmt::format("log-median normalization of '{}': nonpositive value {} at row {}, column '{}'",
                                     ds.name, v, i + 1, col));
      }
      row[static_cast<std::size_t>(j)] = std::log(v);
    }
    const double med = detail::median(row);
    for (Eigen::Index j = 0; j < p; ++j) {
      ds.features(i, j) = row[static_cast<std::size_t>(j)] - med;
    }
  }
  return ds;
}

} // namespace hdlss
