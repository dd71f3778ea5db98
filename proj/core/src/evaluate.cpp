#include "hdlss/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    h ^= (value >> (8 * b)) & 0xFFU;
    h *= kFnvPrime;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += "\"\"";
    } else if (c == '\n' || c == '\r') {
      out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string percent(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", 100.0 * *v) : "NA";
}

std::string raw(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : "NA";
}

// Builds the r-th replication for a source. Simulated sources draw a fresh
// dataset per replication unless fixed_dataset is set.
class ReplicationFactory {
public:
  ReplicationFactory(const Source& source, const EvalConfig& cfg) : source_(source), cfg_(cfg) {
    if (const auto* design = std::get_if<SimDesign>(&source.data)) {
      sampler_ = std::make_unique<DesignSampler>(*design);
      if (cfg.fixed_dataset) {
        fixed_ = sampler_->generate(design->seed);
      }
    }
  }

  Replication make(std::uint64_t r) const {
    const Seed stream = derive_seed(cfg_.master_seed, r);
    const LabeledDataset* ds = nullptr;
    LabeledDataset fresh;
    if (const auto* data = std::get_if<LabeledDataset>(&source_.data)) {
      ds = data;
    } else if (cfg_.fixed_dataset) {
      ds = &fixed_;
    } else {
      fresh = sampler_->generate(mix_seed(stream));
      ds = &fresh;
    }
    const SplitPlan plan{cfg_.train_fraction, cfg_.master_seed, r};
    const SplitIndices idx = split_indices(*ds, plan);
    Replication rep;
    rep.train = ds->subset(idx.train);
    rep.test = ds->subset(idx.test);
    rep.split_hash = hash_split(idx);
    rep.fit_seed = mix_seed(mix_seed(stream));
    return rep;
  }

private:
  const Source& source_;
  const EvalConfig& cfg_;
  std::unique_ptr<DesignSampler> sampler_;
  LabeledDataset fixed_;
};

MethodOutcome run_method(const std::string& method, const Replication& rep, const MethodConfig& config) {
  MethodOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const FittedModel model = fit_method(method, rep.train, config, rep.fit_seed);
    const std::vector<int> test_pred = predict_rows(model, rep.test.features);
    const std::vector<int> train_pred = predict_rows(model, rep.train.features);
    out.test_error = mean_zero_one_loss(rep.test.labels, test_pred);
    out.apparent_error = mean_zero_one_loss(rep.train.labels, train_pred);
    out.ok = true;
  } catch (const FitError& e) {
    out.error = e.what();
  }
  const auto stop = std::chrono::steady_clock::now();
  out.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return out;
}

void describe_source(const Source& source, BenchmarkReport& row) {
  if (const auto* ds = std::get_if<LabeledDataset>(&source.data)) {
    row.n = ds->n();
    row.p = ds->p();
    row.G = ds->num_classes();
  } else {
    const auto& d = std::get<SimDesign>(source.data);
    row.n = static_cast<std::size_t>(d.total_n());
    row.p = static_cast<std::size_t>(d.p);
    row.G = d.G;
    row.epsilon = d.contamination.epsilon;
    row.kappa = d.contamination.kappa;
    row.rho = d.cov.rho;
  }
}

} // namespace

void EvalConfig::validate() const {
  if (R < 1) {
    throw InputError(fmt::format("R must be >= 1, got {}", R));
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError(fmt::format("train_fraction must lie in (0,1), got {}", train_fraction));
  }
  if (methods.empty()) {
    throw InputError("no methods selected");
  }
  for (const auto& m : methods) {
    if (!is_known_method(m)) {
      throw InputError(fmt::format("unknown method '{}'", m));
    }
  }
}

double zero_one_loss(int y, int yhat) {
  return y != yhat ? 1.0 : 0.0;
}

double mean_zero_one_loss(std::span<const int> y, std::span<const int> yhat) {
  if (y.size() != yhat.size() || y.empty()) {
    throw InputError("zero-one loss needs equally sized, nonempty label sequences");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += zero_one_loss(y[i], yhat[i]);
  }
  return total / static_cast<double>(y.size());
}

double apparent_error(std::string_view method, const LabeledDataset& train, const MethodConfig& config, Seed seed) {
  const FittedModel model = fit_method(method, train, config, seed);
  return mean_zero_one_loss(train.labels, predict_rows(model, train.features));
}

std::uint64_t hash_split(const SplitIndices& split) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, split.train.size());
  for (std::size_t i : split.train) {
    fnv_mix(h, i);
  }
  fnv_mix(h, split.test.size());
  for (std::size_t i : split.test) {
    fnv_mix(h, i);
  }
  return h;
}

Replication make_replication(const Source& source, const EvalConfig& cfg, std::uint64_t r) {
  return ReplicationFactory(source, cfg).make(r);
}

std::vector<ReplicationResult> run_replications(const Source& source, const EvalConfig& cfg) {
  cfg.validate();
  const ReplicationFactory factory(source, cfg);
  std::vector<ReplicationResult> results;
  results.reserve(static_cast<std::size_t>(cfg.R));
  for (int r = 0; r < cfg.R; ++r) {
    const Replication rep = factory.make(static_cast<std::uint64_t>(r));
    ReplicationResult res;
    res.replication_index = static_cast<std::uint64_t>(r);
    res.split_hash = rep.split_hash;
    for (const auto& method : cfg.methods) {
      res.outcomes.push_back(run_method(method, rep, cfg.method_config));
    }
    results.push_back(std::move(res));
  }
  return results;
}

AvteSummary summarize(std::span<const ReplicationResult> results, std::size_t method_slot) {
  AvteSummary s;
  std::vector<double> errors;
  double apparent = 0.0;
  for (const auto& res : results) {
    const MethodOutcome& o = res.outcomes.at(method_slot);
    s.split_hashes.push_back(res.split_hash);
    if (o.ok) {
      errors.push_back(o.test_error);
      apparent += o.apparent_error;
      s.trace.emplace_back(o.test_error);
    } else {
      ++s.failure_count;
      s.trace.emplace_back(std::nullopt);
      if (s.first_error.empty()) {
        s.first_error = o.error;
      }
    }
  }
  if (errors.empty()) {
    return s;
  }
  const auto k = static_cast<double>(errors.size());
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / k;
  s.mean = mean;
  s.apparent_mean = apparent / k;
  if (errors.size() >= 2) {
    double ss = 0.0;
    for (double e : errors) {
      ss += (e - mean) * (e - mean);
    }
    s.sd = std::sqrt(ss / (k - 1.0));
    s.sd_defined = true;
  }
  return s;
}

AvteSummary avte(std::string_view method, const Source& source, const EvalConfig& cfg) {
  EvalConfig single = cfg;
  single.methods = {std::string(method)};
  const std::vector<ReplicationResult> results = run_replications(source, single);
  AvteSummary s = summarize(results, 0);
  if (!s.mean) {
    throw FitError(fmt::format("{}: all {} replications failed: {}", method, cfg.R, s.first_error));
  }
  return s;
}

std::vector<BenchmarkReport> compare(std::span<const Source> sources, const EvalConfig& cfg) {
  cfg.validate();
  if (sources.empty()) {
    throw InputError("compare needs at least one source");
  }
  std::vector<BenchmarkReport> reports;
  for (const auto& source : sources) {
    const std::vector<ReplicationResult> results = run_replications(source, cfg);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      BenchmarkReport row;
      row.source = source.name;
      row.method = cfg.methods[m];
      row.R = cfg.R;
      describe_source(source, row);
      row.summary = summarize(results, m);
      if (cfg.record_runtime) {
        double total = 0.0;
        for (const auto& res : results) {
          total += res.outcomes[m].runtime_ms;
        }
        row.runtime_ms = total;
      }
      reports.push_back(std::move(row));
    }
  }
  mark_ranks(reports);
  return reports;
}

void mark_ranks(std::span<BenchmarkReport> reports) {
  std::size_t begin = 0;
  while (begin < reports.size()) {
    std::size_t end = begin;
    while (end < reports.size() && reports[end].source == reports[begin].source) {
      ++end;
    }
    std::vector<std::size_t> ranked;
    for (std::size_t i = begin; i < end; ++i) {
      reports[i].marker.clear();
      if (reports[i].summary.mean) {
        ranked.push_back(i);
      }
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return *reports[a].summary.mean < *reports[b].summary.mean;
    });
    if (!ranked.empty()) {
      reports[ranked.front()].marker = "best";
    }
    if (ranked.size() >= 3) {
      reports[ranked[1]].marker = "second";
    }
    if (ranked.size() >= 2) {
      reports[ranked.back()].marker = "worst";
    }
    begin = end;
  }
}

void write_report_csv(std::ostream& out, std::span<const BenchmarkReport> reports, const std::string& resolved_config) {
  if (!resolved_config.empty()) {
    std::istringstream lines(resolved_config);
    std::string line;
    while (std::getline(lines, line)) {
      out << "# " << line << '\n';
    }
  }
  out << "source,method,n,p,G,epsilon,kappa,rho,R,avte_mean,avte_sd,apparent_mean,failure_count,runtime_ms,"
         "avte_mean_raw,avte_sd_raw,apparent_mean_raw,sd_defined,marker,first_error\n";
  for (const auto& r : reports) {
    const auto& s = r.summary;
    const std::optional<double> sd = s.mean ? std::optional<double>(s.sd) : std::nullopt;
    out << csv_field(r.source) << ',' << csv_field(r.method) << ',' << r.n << ',' << r.p << ',' << r.G << ','
        << raw(r.epsilon) << ',' << raw(r.kappa) << ',' << raw(r.rho) << ',' << r.R << ',' << percent(s.mean) << ','
        << percent(sd) << ',' << percent(s.apparent_mean) << ',' << s.failure_count << ','
        << (r.runtime_ms ? fmt::format("{:.1f}", *r.runtime_ms) : std::string("NA")) << ',' << raw(s.mean) << ','
        << raw(sd) << ',' << raw(s.apparent_mean) << ',' << (s.sd_defined ? "true" : "false") << ',' << r.marker
        << ',' << csv_field(s.first_error) << '\n';
  }
}

void write_plot_csv(std::ostream& out, std::span<const BenchmarkReport> reports) {
  out << "source,method,replication,test_error\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.summary.trace.size(); ++i) {
      out << csv_field(r.source) << ',' << csv_field(r.method) << ',' << i << ',' << raw(r.summary.trace[i]) << '\n';
    }
  }
}

} // namespace hdlss
