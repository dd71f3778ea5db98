#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hdlss/classifier.hpp"
#include "hdlss/dataset.hpp"
#include "hdlss/synth.hpp"

namespace hdlss {

struct EvalConfig {
  int R = 200;
  double train_fraction = 2.0 / 3.0;
  Seed master_seed = 0;
  std::vector<std::string> methods = method_names();
  /// For simulated sources: draw one dataset and re-split it instead of
  /// simulating fresh data every replication.
  bool fixed_dataset = false;
  /// Wall-clock timing makes reports non-reproducible, so it is opt-in.
  bool record_runtime = false;
  MethodConfig method_config;

  void validate() const;
};

/// A fixed dataset (re-split every replication) or a simulation design.
struct Source {
  std::string name;
  std::variant<LabeledDataset, SimDesign> data;
};

double zero_one_loss(int y, int yhat);
double mean_zero_one_loss(std::span<const int> y, std::span<const int> yhat);

/// Training error of `method` fitted on `train`. Fit failures propagate.
double apparent_error(std::string_view method, const LabeledDataset& train, const MethodConfig& config, Seed seed);

struct MethodOutcome {
  bool ok = false;
  double test_error = 0.0;
  double apparent_error = 0.0;
  double runtime_ms = 0.0;
  std::string error;
};

struct ReplicationResult {
  std::uint64_t replication_index = 0;
  std::uint64_t split_hash = 0; // FNV-1a of the train and test index sets
  std::vector<MethodOutcome> outcomes; // one per EvalConfig::methods entry
};

/// The r-th train/test pair faced by every method, plus the fit seed.
struct Replication {
  LabeledDataset train;
  LabeledDataset test;
  std::uint64_t split_hash = 0;
  Seed fit_seed = 0;
};

std::uint64_t hash_split(const SplitIndices& split);

/// The r-th replication exactly as run_replications builds it.
Replication make_replication(const Source& source, const EvalConfig& cfg, std::uint64_t r);

/// Runs all configured methods on each of the R paired replications.
std::vector<ReplicationResult> run_replications(const Source& source, const EvalConfig& cfg);

struct AvteSummary {
  std::optional<double> mean; // empty when every replication failed
  double sd = 0.0;
  bool sd_defined = false; // false with fewer than 2 successful replications
  std::optional<double> apparent_mean;
  int failure_count = 0;
  std::vector<std::optional<double>> trace; // test error per replication
  std::vector<std::uint64_t> split_hashes;
  std::string first_error;
};

AvteSummary summarize(std::span<const ReplicationResult> results, std::size_t method_slot);

/// Average test error of one method; throws FitError if all R replications fail.
AvteSummary avte(std::string_view method, const Source& source, const EvalConfig& cfg);

struct BenchmarkReport {
  std::string source;
  std::string method;
  std::size_t n = 0;
  std::size_t p = 0;
  int G = 0;
  std::optional<double> epsilon;
  std::optional<double> kappa;
  std::optional<double> rho;
  int R = 0;
  AvteSummary summary;
  std::optional<double> runtime_ms;
  std::string marker; // "best", "second", "worst" or empty
};

/// One row per (source, method), in source order then method order.
std::vector<BenchmarkReport> compare(std::span<const Source> sources, const EvalConfig& cfg);

/// Fills `marker` per source: lowest mean "best", next "second", highest "worst".
void mark_ranks(std::span<BenchmarkReport> reports);

/// Report CSV. `resolved_config` lines are embedded as leading '#' comments.
void write_report_csv(std::ostream& out, std::span<const BenchmarkReport> reports,
                      const std::string& resolved_config = {});

/// Long format: source,method,replication,test_error.
void write_plot_csv(std::ostream& out, std::span<const BenchmarkReport> reports);

} // namespace hdlss
