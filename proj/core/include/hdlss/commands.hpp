#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdlss/config.hpp"

namespace hdlss {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<Seed> seed;
  std::optional<int> R;
  std::optional<std::vector<std::string>> methods;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> data_path;
  std::optional<std::string> label_column;
  bool log_median = false;
};

void apply_overrides(RunConfig& cfg, const Overrides& overrides);

/// Splits "a, b,c" into trimmed names.
std::vector<std::string> split_names(const std::string& csv);

/// Writes `<cell>.csv` and `<cell>.manifest` per grid cell; returns the paths written.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg, std::ostream& log);

struct BenchOutputs {
  std::filesystem::path report;
  std::filesystem::path plot_data;
  std::vector<BenchmarkReport> rows;
};

/// Runs every grid cell (bounded worker pool) and writes report.csv and plot_data.csv.
BenchOutputs cmd_bench(const RunConfig& cfg, std::ostream& log);

/// Re-split AVTE comparison on the dataset named by cfg.data.
BenchOutputs cmd_eval_real(const RunConfig& cfg, std::ostream& log);

/// Manifest text for a design: every SimDesign field plus the artifact version.
std::string design_manifest(const SimDesign& design, const std::string& name);

} // namespace hdlss
