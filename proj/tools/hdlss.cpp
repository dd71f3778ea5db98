// hdlss: simulate datasets, run benchmark grids and evaluate real data.

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hdlss/commands.hpp"
#include "hdlss/error.hpp"

namespace {

struct Args {
  std::string config;
  std::string out;
  std::string data;
  std::string label;
  std::string methods;
  hdlss::Seed seed = 0;
  int R = 0;
  bool log_median = false;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config, "INI run configuration");
  cmd->add_option("--out", args.out, "output directory (overrides [output] dir)");
  cmd->add_option("--seed", args.seed, "master seed (overrides [eval] master_seed)");
}

void add_eval(CLI::App* cmd, Args& args) {
  cmd->add_option("--R", args.R, "replications (overrides [eval] R)")->check(CLI::PositiveNumber);
  cmd->add_option("--methods", args.methods, "comma-separated method list");
}

hdlss::RunConfig resolve(const CLI::App& cmd, const Args& args) {
  hdlss::RunConfig cfg = args.config.empty() ? hdlss::RunConfig{} : hdlss::load_run_config(args.config);
  hdlss::Overrides o;
  if (cmd.count("--seed") > 0) {
    o.seed = args.seed;
  }
  if (cmd.get_option_no_throw("--R") != nullptr && cmd.count("--R") > 0) {
    o.R = args.R;
  }
  if (!args.methods.empty()) {
    o.methods = hdlss::split_names(args.methods);
  }
  if (!args.out.empty()) {
    o.out_dir = args.out;
  }
  if (!args.data.empty()) {
    o.data_path = args.data;
  }
  if (!args.label.empty()) {
    o.label_column = args.label;
  }
  o.log_median = args.log_median;
  hdlss::apply_overrides(cfg, o);
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust classification benchmarks for high-dimension low-sample-size data"};
  app.set_version_flag("--version", HDLSS_VERSION);
  app.require_subcommand(1);

  Args args;
  auto* simulate = app.add_subcommand("simulate", "write one dataset CSV and manifest per grid cell");
  add_common(simulate, args);

  auto* bench = app.add_subcommand("bench", "run the AVTE comparison over the configured grid");
  add_common(bench, args);
  add_eval(bench, args);

  auto* real = app.add_subcommand("eval-real", "AVTE comparison on a CSV dataset (re-split mode)");
  add_common(real, args);
  add_eval(real, args);
  real->add_option("--data", args.data, "dataset CSV (overrides [data] path)");
  real->add_option("--label", args.label, "label column name (default: label)");
  real->add_flag("--log-median", args.log_median, "log-transform, then subtract each row's median");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      hdlss::cmd_simulate(resolve(*simulate, args), std::cerr);
    } else if (bench->parsed()) {
      const auto out = hdlss::cmd_bench(resolve(*bench, args), std::cerr);
      std::cout << out.report.string() << '\n' << out.plot_data.string() << '\n';
    } else {
      const auto out = hdlss::cmd_eval_real(resolve(*real, args), std::cerr);
      std::cout << out.report.string() << '\n' << out.plot_data.string() << '\n';
    }
  } catch (const hdlss::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
