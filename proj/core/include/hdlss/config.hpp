#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdlss/evaluate.hpp"
#include "hdlss/synth.hpp"

namespace hdlss {

/// Axes of the simulation grid; every combination is one cell.
struct GridSpec {
  std::vector<double> epsilon{0.0};
  std::vector<double> kappa{9.0};
  std::vector<double> rho{0.0};
  std::vector<int> p{10};
  std::vector<int> G{2};

  std::size_t cell_count() const;
};

/// Settings shared by every generated design.
struct DesignDefaults {
  /// One entry (used for all classes) or one per class.
  std::vector<int> n_per_class{kDefaultClassSize};
  double separation = kDefaultMeanSeparation;
  double eta_shift = kDefaultEtaShift;
  double tau = 1.0;
  CovKind cov = CovKind::equicorrelation;
  /// Explicit class means keyed by 1-based class; each must have length p.
  std::map<int, Eigen::VectorXd> means;
};

/// Real-data input for eval-real.
struct DataSpec {
  std::string path;
  std::string label_column = "label";
  bool log_median = false;
};

struct RunConfig {
  DesignDefaults design;
  GridSpec grid;
  EvalConfig eval;
  DataSpec data;
  std::filesystem::path out_dir = "out";
  int workers = 1;

  /// Checks every grid cell against the module preconditions. Throws InputError.
  void validate() const;
};

struct GridCell {
  std::string name;
  SimDesign design;
};

/// Cells in row-major order over (G, p, rho, epsilon, kappa).
std::vector<GridCell> expand_grid(const RunConfig& cfg);

/// Parses the INI text. Syntax errors and bad values name the offending line.
RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved config as INI text; parsing it back yields the same config.
std::string dump_config(const RunConfig& cfg);

} // namespace hdlss
