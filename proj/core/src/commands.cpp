#include "hdlss/commands.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "hdlss/error.hpp"

namespace hdlss {

namespace {

std::string join_vector(const Eigen::VectorXd& v) {
  return fmt::format("{}", fmt::join(v.data(), v.data() + v.size(), ", "));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out) {
    throw Error(fmt::format("cannot write '{}'", path.string()));
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
}

BenchOutputs write_reports(const RunConfig& cfg, std::vector<BenchmarkReport> rows) {
  ensure_dir(cfg.out_dir);
  BenchOutputs out;
  out.report = cfg.out_dir / "report.csv";
  out.plot_data = cfg.out_dir / "plot_data.csv";
  std::ostringstream report;
  write_report_csv(report, rows, dump_config(cfg));
  write_file(out.report, report.str());
  std::ostringstream plot;
  write_plot_csv(plot, rows);
  write_file(out.plot_data, plot.str());
  out.rows = std::move(rows);
  return out;
}

} // namespace

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) {
      names.push_back(item.substr(b, e - b + 1));
    }
  }
  return names;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.eval.master_seed = *o.seed;
  }
  if (o.R) {
    cfg.eval.R = *o.R;
  }
  if (o.methods) {
    cfg.eval.methods = *o.methods;
  }
  if (o.out_dir) {
    cfg.out_dir = *o.out_dir;
  }
  if (o.data_path) {
    cfg.data.path = *o.data_path;
  }
  if (o.label_column) {
    cfg.data.label_column = *o.label_column;
  }
  if (o.log_median) {
    cfg.data.log_median = true;
  }
}

std::string design_manifest(const SimDesign& d, const std::string& name) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  out += "[artifact]\n";
  line("name", name);
  line("version", HDLSS_VERSION);
  line("format", "hdlss-dataset-csv/1");
  out += "\n[design]\n";
  line("G", std::to_string(d.G));
  line("p", std::to_string(d.p));
  line("n_per_class", fmt::format("{}", fmt::join(d.n_per_class, ", ")));
  line("cov", to_string(d.cov.kind));
  line("tau", fmt::format("{}", d.cov.tau));
  line("rho", fmt::format("{}", d.cov.rho));
  line("epsilon", fmt::format("{}", d.contamination.epsilon));
  line("kappa", fmt::format("{}", d.contamination.kappa));
  line("eta", join_vector(d.contamination.eta));
  line("seed", std::to_string(d.seed));
  out += "\n[means]\n";
  for (std::size_t k = 0; k < d.class_means.size(); ++k) {
    line(std::to_string(k + 1), join_vector(d.class_means[k]));
  }
  return out;
}

std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& cell : expand_grid(cfg)) {
    LabeledDataset ds = generate(cell.design);
    const auto csv = cfg.out_dir / (cell.name + ".csv");
    const auto manifest = cfg.out_dir / (cell.name + ".manifest");
    std::ostringstream body;
    write_csv(ds, body);
    write_file(csv, body.str());
    write_file(manifest, design_manifest(cell.design, cell.name));
    written.push_back(csv);
    written.push_back(manifest);
    log << fmt::format("simulate {}: n={} p={} -> {}\n", cell.name, ds.n(), ds.p(), csv.string());
  }
  return written;
}

BenchOutputs cmd_bench(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  const std::vector<GridCell> cells = expand_grid(cfg);
  std::vector<std::vector<BenchmarkReport>> per_cell(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        const Source source{cells[i].name, cells[i].design};
        per_cell[i] = compare(std::span<const Source>(&source, 1), cfg.eval);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::lock_guard lock(log_mutex);
      log << fmt::format("cell {}/{} {} done in {:.1f}s\n", i + 1, cells.size(), cells[i].name, seconds);
      log.flush();
    }
  };

  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), cells.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }

  std::vector<BenchmarkReport> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      throw Error(fmt::format("grid cell {}: {}", cells[i].name, errors[i]));
    }
    for (auto& row : per_cell[i]) {
      rows.push_back(std::move(row));
    }
  }
  return write_reports(cfg, std::move(rows));
}

BenchOutputs cmd_eval_real(const RunConfig& cfg, std::ostream& log) {
  cfg.eval.validate();
  if (cfg.data.path.empty()) {
    throw InputError("eval-real needs a dataset path ([data] path or --data)");
  }
  LabeledDataset ds = load_csv(cfg.data.path, cfg.data.label_column);
  if (cfg.data.log_median) {
    ds = normalize_log_median(std::move(ds));
  }
  EvalConfig eval = cfg.eval;
  eval.fixed_dataset = true;
  const auto start = std::chrono::steady_clock::now();
  const Source source{ds.name, std::move(ds)};
  std::vector<BenchmarkReport> rows = compare(std::span<const Source>(&source, 1), eval);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << fmt::format("eval-real {}: {} methods x R={} done in {:.1f}s\n", source.name, eval.methods.size(), eval.R,
                     seconds);
  return write_reports(cfg, std::move(rows));
}

} // namespace hdlss
