#include "hdlss/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"design", {"n_per_class", "separation", "eta_shift", "tau", "cov"}},
      {"means", {}}, // keys are class numbers
      {"grid", {"epsilon", "kappa", "rho", "p", "G"}},
      {"eval", {"R", "train_fraction", "master_seed", "fixed_dataset"}},
      {"methods",
       {"list", "lda_regularization", "linda_h", "linda_regularization", "mcd_starts", "mcd_max_csteps",
        "pp_random_directions", "pp_pairwise_limit", "pp_refine_rounds", "pp_initial_step",
        "pp_refine_coordinates", "huber_c", "biweight_c", "biweight_b", "estimator_max_iter", "estimator_tol",
        "simca_variance", "simca_trim", "simca_quantile", "rf_trees", "rf_subspace", "tree_max_depth",
        "tree_min_leaf"}},
      {"data", {"path", "label", "log_median"}},
      {"output", {"dir", "workers", "record_runtime"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Maps "section.key" to its 1-based line for error messages.
class LineIndex {
public:
  explicit LineIndex(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') {
        continue;
      }
      if (t.front() == '[' && t.back() == ']') {
        section = trim(std::string_view(t).substr(1, t.size() - 2));
        lines_.emplace(section, number);
        continue;
      }
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        lines_.emplace(section + "." + trim(std::string_view(t).substr(0, eq)), number);
      }
    }
  }

  int line(const std::string& path) const {
    const auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
  }

private:
  std::map<std::string, int> lines_;
};

class Reader {
public:
  Reader(const pt::ptree& tree, const LineIndex& lines, std::string source)
      : tree_(tree), lines_(lines), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw InputError(fmt::format("{}({}): [{}] {}", source_, lines_.line(path), path, what));
  }

  std::optional<std::string> raw(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      return trim(*v);
    }
    return std::nullopt;
  }

  template <typename T>
  T number(const std::string& path, const std::string& text) const {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
      fail(path, fmt::format("cannot parse '{}' as a number", text));
    }
    return value;
  }

  template <typename T>
  void scalar(const std::string& path, T& out) const {
    if (auto v = raw(path)) {
      out = number<T>(path, *v);
    }
  }

  template <typename T>
  void list(const std::string& path, std::vector<T>& out) const {
    if (auto v = raw(path)) {
      out = parse_list<T>(path, *v);
    }
  }

  template <typename T>
  std::vector<T> parse_list(const std::string& path, const std::string& text) const {
    std::vector<T> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      values.push_back(number<T>(path, trim(item)));
    }
    if (values.empty()) {
      fail(path, "empty list");
    }
    return values;
  }

  void flag(const std::string& path, bool& out) const {
    if (auto v = raw(path)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        fail(path, fmt::format("expected true or false, got '{}'", *v));
      }
    }
  }

  void text(const std::string& path, std::string& out) const {
    if (auto v = raw(path)) {
      out = *v;
    }
  }

  template <typename F>
  void convert(const std::string& path, F&& apply) const {
    if (auto v = raw(path)) {
      try {
        apply(*v);
      } catch (const InputError& e) {
        fail(path, e.what());
      }
    }
  }

private:
  const pt::ptree& tree_;
  const LineIndex& lines_;
  std::string source_;
};

template <typename T>
std::string join(const std::vector<T>& values) {
  return fmt::format("{}", fmt::join(values, ", "));
}

std::string join_vector(const Eigen::VectorXd& v) {
  return fmt::format("{}", fmt::join(v.data(), v.data() + v.size(), ", "));
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string cell_name(int G, int p, double rho, double eps, double kappa) {
  return fmt::format("G{}-p{}-rho{}-eps{}-kappa{}", G, p, rho, eps, kappa);
}

SimDesign make_design(const RunConfig& cfg, int G, int p, double rho, double eps, double kappa, Seed seed) {
  std::vector<int> sizes = cfg.design.n_per_class;
  if (sizes.size() == 1) {
    sizes.assign(static_cast<std::size_t>(G), sizes.front());
  }
  SimDesign d = SimDesign::standard(G, p, sizes, rho, eps, kappa, seed, cfg.design.separation, cfg.design.eta_shift);
  d.cov.tau = cfg.design.tau;
  d.cov.kind = cfg.design.cov;
  for (const auto& [k, mu] : cfg.design.means) {
    if (k < 1 || k > G) {
      throw InputError(fmt::format("[means] class {} outside 1..{}", k, G));
    }
    if (mu.size() != p) {
      throw InputError(fmt::format("[means] class {} has length {}, grid cell has p = {}", k, mu.size(), p));
    }
    d.class_means[static_cast<std::size_t>(k - 1)] = mu;
  }
  return d;
}

} // namespace

std::size_t GridSpec::cell_count() const {
  return epsilon.size() * kappa.size() * rho.size() * p.size() * G.size();
}

std::vector<GridCell> expand_grid(const RunConfig& cfg) {
  std::vector<GridCell> cells;
  cells.reserve(cfg.grid.cell_count());
  for (int G : cfg.grid.G) {
    for (int p : cfg.grid.p) {
      for (double rho : cfg.grid.rho) {
        for (double eps : cfg.grid.epsilon) {
          for (double kappa : cfg.grid.kappa) {
            GridCell cell;
            cell.name = cell_name(G, p, rho, eps, kappa);
            // Keyed on the cell itself so a cell's data does not depend on the rest of the grid.
            const Seed seed = mix_seed(cfg.eval.master_seed ^ name_hash(cell.name));
            cell.design = make_design(cfg, G, p, rho, eps, kappa, seed);
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return cells;
}

void RunConfig::validate() const {
  eval.validate();
  if (workers < 1) {
    throw InputError(fmt::format("[output] workers must be >= 1, got {}", workers));
  }
  if (design.n_per_class.empty()) {
    throw InputError("[design] n_per_class is empty");
  }
  if (design.n_per_class.size() > 1) {
    for (int G : grid.G) {
      if (static_cast<std::size_t>(G) != design.n_per_class.size()) {
        throw InputError(fmt::format("[design] n_per_class lists {} sizes but the grid has G = {}",
                                     design.n_per_class.size(), G));
      }
    }
  }
  const MethodConfig& m = eval.method_config;
  m.lda_regularization.validate();
  m.linda.regularization.validate();
  if (m.linda.h && *m.linda.h < 1) {
    throw InputError("[methods] linda_h must be positive");
  }
  if (m.linda.mcd.n_starts < 1 || m.linda.mcd.max_csteps < 1) {
    throw InputError("[methods] mcd_starts and mcd_max_csteps must be >= 1");
  }
  if (m.pp.random_directions < 0 || m.pp.refine_rounds < 0 || m.pp.refine_coordinates < 1 ||
      !(m.pp.initial_step > 0.0)) {
    throw InputError("[methods] projection pursuit search settings out of range");
  }
  if (!(m.pp.tuning.huber_c > 0.0) || !(m.pp.tuning.biweight_c > 0.0) ||
      !(m.pp.tuning.biweight_b > 0.0 && m.pp.tuning.biweight_b < 1.0) || m.pp.tuning.max_iter < 1 ||
      !(m.pp.tuning.tol > 0.0)) {
    throw InputError("[methods] univariate estimator tuning out of range");
  }
  if (!(m.simca.variance_retained > 0.0 && m.simca.variance_retained <= 1.0) ||
      !(m.simca.trim >= 0.0 && m.simca.trim < 0.5) ||
      !(m.simca.cutoff_quantile > 0.0 && m.simca.cutoff_quantile < 1.0)) {
    throw InputError("[methods] simca settings out of range");
  }
  if (m.forest.B < 1) {
    throw InputError(fmt::format("[methods] rf_trees must be >= 1, got {}", m.forest.B));
  }
  if (m.forest.d_mode == SubspaceMode::fixed && m.forest.d < 1) {
    throw InputError(fmt::format("[methods] rf_subspace d must be >= 1, got {}", m.forest.d));
  }
  m.tree.validate();
  for (double e : grid.epsilon) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw InputError(fmt::format("[grid] epsilon {} outside [0,1]", e));
    }
  }
  for (const auto& cell : expand_grid(*this)) {
    try {
      cell.design.validate();
      if (cell.design.cov.p > 1) {
        build_cov(cell.design.cov);
      }
    } catch (const InputError& e) {
      throw InputError(fmt::format("grid cell {}: {}", cell.name, e.what()));
    }
  }
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  pt::ptree tree;
  try {
    std::istringstream body(text);
    pt::read_ini(body, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(fmt::format("{}({}): {}", source, e.line(), e.message()));
  }
  const LineIndex lines(text);
  const Reader r(tree, lines, source);

  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      throw InputError(fmt::format("{}({}): unknown section [{}]", source, lines.line(section), section));
    }
    if (body.empty() && !body.data().empty()) {
      throw InputError(fmt::format("{}({}): key '{}' outside any section", source, lines.line("." + section),
                                   section));
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (section != "means" && !known->second.contains(key)) {
        r.fail(section + "." + key, "unknown key");
      }
    }
  }

  RunConfig cfg;
  r.list("design.n_per_class", cfg.design.n_per_class);
  r.scalar("design.separation", cfg.design.separation);
  r.scalar("design.eta_shift", cfg.design.eta_shift);
  r.scalar("design.tau", cfg.design.tau);
  r.convert("design.cov", [&](const std::string& v) { cfg.design.cov = parse_cov_kind(v); });
  if (auto means = tree.get_child_optional("means")) {
    for (const auto& [key, value] : *means) {
      (void)value;
      const std::string path = "means." + key;
      const int k = r.number<int>(path, key);
      const auto values = r.parse_list<double>(path, *r.raw(path));
      cfg.design.means[k] = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
  }

  r.list("grid.epsilon", cfg.grid.epsilon);
  r.list("grid.kappa", cfg.grid.kappa);
  r.list("grid.rho", cfg.grid.rho);
  r.list("grid.p", cfg.grid.p);
  r.list("grid.G", cfg.grid.G);

  r.scalar("eval.R", cfg.eval.R);
  r.scalar("eval.train_fraction", cfg.eval.train_fraction);
  r.scalar("eval.master_seed", cfg.eval.master_seed);
  r.flag("eval.fixed_dataset", cfg.eval.fixed_dataset);

  MethodConfig& m = cfg.eval.method_config;
  r.convert("methods.list", [&](const std::string& v) {
    std::vector<std::string> names;
    std::istringstream items(v);
    std::string item;
    while (std::getline(items, item, ',')) {
      names.push_back(trim(item));
    }
    cfg.eval.methods = names;
  });
  r.convert("methods.lda_regularization",
            [&](const std::string& v) { m.lda_regularization = RegularizationSpec::parse(v); });
  r.convert("methods.linda_h", [&](const std::string& v) {
    if (v == "default") {
      m.linda.h.reset();
    } else {
      m.linda.h = r.number<int>("methods.linda_h", v);
    }
  });
  r.convert("methods.linda_regularization",
            [&](const std::string& v) { m.linda.regularization = RegularizationSpec::parse(v); });
  r.scalar("methods.mcd_starts", m.linda.mcd.n_starts);
  r.scalar("methods.mcd_max_csteps", m.linda.mcd.max_csteps);
  r.scalar("methods.pp_random_directions", m.pp.random_directions);
  r.scalar("methods.pp_pairwise_limit", m.pp.pairwise_limit);
  r.scalar("methods.pp_refine_rounds", m.pp.refine_rounds);
  r.scalar("methods.pp_initial_step", m.pp.initial_step);
  r.scalar("methods.pp_refine_coordinates", m.pp.refine_coordinates);
  r.scalar("methods.huber_c", m.pp.tuning.huber_c);
  r.scalar("methods.biweight_c", m.pp.tuning.biweight_c);
  r.scalar("methods.biweight_b", m.pp.tuning.biweight_b);
  r.scalar("methods.estimator_max_iter", m.pp.tuning.max_iter);
  r.scalar("methods.estimator_tol", m.pp.tuning.tol);
  r.scalar("methods.simca_variance", m.simca.variance_retained);
  r.scalar("methods.simca_trim", m.simca.trim);
  r.scalar("methods.simca_quantile", m.simca.cutoff_quantile);
  int trees = m.forest.B;
  r.scalar("methods.rf_trees", trees);
  r.convert("methods.rf_subspace", [&](const std::string& v) { m.forest = ForestConfig::with_mode(v); });
  m.forest.B = trees;
  r.scalar("methods.tree_max_depth", m.tree.max_depth);
  r.scalar("methods.tree_min_leaf", m.tree.min_leaf);

  r.text("data.path", cfg.data.path);
  r.text("data.label", cfg.data.label_column);
  r.flag("data.log_median", cfg.data.log_median);

  std::string dir = cfg.out_dir.string();
  r.text("output.dir", dir);
  cfg.out_dir = dir;
  r.scalar("output.workers", cfg.workers);
  r.flag("output.record_runtime", cfg.eval.record_runtime);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open config '{}'", path.string()));
  }
  return parse_run_config(in, path.string());
}

std::string dump_config(const RunConfig& cfg) {
  const MethodConfig& m = cfg.eval.method_config;
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };

  out += "[design]\n";
  line("n_per_class", join(cfg.design.n_per_class));
  line("separation", fmt::format("{}", cfg.design.separation));
  line("eta_shift", fmt::format("{}", cfg.design.eta_shift));
  line("tau", fmt::format("{}", cfg.design.tau));
  line("cov", to_string(cfg.design.cov));
  if (!cfg.design.means.empty()) {
    out += "\n[means]\n";
    for (const auto& [k, mu] : cfg.design.means) {
      line(std::to_string(k), join_vector(mu));
    }
  }

  out += "\n[grid]\n";
  line("epsilon", join(cfg.grid.epsilon));
  line("kappa", join(cfg.grid.kappa));
  line("rho", join(cfg.grid.rho));
  line("p", join(cfg.grid.p));
  line("G", join(cfg.grid.G));

  out += "\n[eval]\n";
  line("R", std::to_string(cfg.eval.R));
  line("train_fraction", fmt::format("{}", cfg.eval.train_fraction));
  line("master_seed", std::to_string(cfg.eval.master_seed));
  line("fixed_dataset", cfg.eval.fixed_dataset ? "true" : "false");

  out += "\n[methods]\n";
  line("list", join(cfg.eval.methods));
  line("lda_regularization", m.lda_regularization.to_string());
  line("linda_h", m.linda.h ? std::to_string(*m.linda.h) : "default");
  line("linda_regularization", m.linda.regularization.to_string());
  line("mcd_starts", std::to_string(m.linda.mcd.n_starts));
  line("mcd_max_csteps", std::to_string(m.linda.mcd.max_csteps));
  line("pp_random_directions", std::to_string(m.pp.random_directions));
  line("pp_pairwise_limit", std::to_string(m.pp.pairwise_limit));
  line("pp_refine_rounds", std::to_string(m.pp.refine_rounds));
  line("pp_initial_step", fmt::format("{}", m.pp.initial_step));
  line("pp_refine_coordinates", std::to_string(m.pp.refine_coordinates));
  line("huber_c", fmt::format("{}", m.pp.tuning.huber_c));
  line("biweight_c", fmt::format("{}", m.pp.tuning.biweight_c));
  line("biweight_b", fmt::format("{}", m.pp.tuning.biweight_b));
  line("estimator_max_iter", std::to_string(m.pp.tuning.max_iter));
  line("estimator_tol", fmt::format("{}", m.pp.tuning.tol));
  line("simca_variance", fmt::format("{}", m.simca.variance_retained));
  line("simca_trim", fmt::format("{}", m.simca.trim));
  line("simca_quantile", fmt::format("{}", m.simca.cutoff_quantile));
  line("rf_trees", std::to_string(m.forest.B));
  line("rf_subspace", m.forest.mode_string());
  line("tree_max_depth", std::to_string(m.tree.max_depth));
  line("tree_min_leaf", std::to_string(m.tree.min_leaf));

  if (!cfg.data.path.empty()) {
    out += "\n[data]\n";
    line("path", cfg.data.path);
    line("label", cfg.data.label_column);
    line("log_median", cfg.data.log_median ? "true" : "false");
  }

  out += "\n[output]\n";
  line("dir", cfg.out_dir.string());
  line("workers", std::to_string(cfg.workers));
  line("record_runtime", cfg.eval.record_runtime ? "true" : "false");
  return out;
}

} // namespace hdlss
