#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pcn/config.hpp"
#include "pcn/errors.hpp"
#include "pcn/experiment.hpp"

namespace pcn::cli {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  int jobs = 1;
  bool force = false;
};

struct SweepArgs {
  std::string parameter;
  std::string values;
  std::string strategies = "all";
  std::string average_imbalance;
};

// Marks errors that should exit with the usage/config status.
struct UsageError : Error {
  using Error::Error;
};

void add_common(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("--config", args.config_path, "Config file (key = value lines)");
  cmd.add_option("--set", args.overrides, "Override KEY=VALUE (repeatable)")->allow_extra_args(false);
  cmd.add_option("--out", args.out_dir, "Output directory");
  cmd.add_option("--jobs", args.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
  cmd.add_flag("--force", args.force, "Overwrite existing result files");
}

ExperimentConfig load_config(const CommonArgs& args) {
  std::vector<std::string> overrides;
  if (const char* env = std::getenv("PCNSIM_SEED"); env != nullptr && *env != '\0') {
    overrides.push_back(std::string("seed=") + env);
  }
  overrides.insert(overrides.end(), args.overrides.begin(), args.overrides.end());
  if (args.config_path.empty()) return parse_config_text("", overrides);
  if (!fs::exists(args.config_path)) throw ParseError("config file not found: " + args.config_path);
  return parse_config(args.config_path, overrides);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in " + what);
    }
  }
  return out;
}

std::vector<StrategyKind> parse_strategies(const std::string& text) {
  if (text == "all") return {kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<StrategyKind> out;
  for (const auto& item : split_list(text)) {
    const auto kind = parse_strategy(item);
    if (!kind) throw UsageError("unknown strategy '" + item + "'");
    out.push_back(*kind);
  }
  return out;
}

fs::path prepare_output(const CommonArgs& args, const std::vector<std::string>& names) {
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  for (const auto& name : names) {
    if (fs::exists(dir / name) && !args.force) {
      throw UsageError("refusing to overwrite " + (dir / name).string() + " (use --force)");
    }
  }
  return dir;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  fn(out);
  if (!out) throw Error("write failed for " + path.string());
}

void log_line(const fs::path& dir, const std::string& message) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ofstream log(dir / "run.log", std::ios::app);
  log << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << message << '\n';
}

void print_summary(std::ostream& out, std::span<const AggregateRow> rows) {
  out << std::left << std::setw(20) << "strategy" << std::setw(6) << "conn" << std::setw(16) << "amount"
      << std::setw(8) << "imbal" << std::setw(22) << "success" << std::setw(22) << "rel_fee" << std::setw(22)
      << "hops" << "imbalance_final\n";
  const auto cell = [](const MetricSummary& m) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << m.mean << " +- " << m.stddev;
    return s.str();
  };
  for (const auto& r : rows) {
    std::ostringstream amount;
    amount << std::fixed << std::setprecision(1) << r.amount_min << "-" << r.amount_max;
    std::ostringstream imbalance;
    imbalance << std::fixed << std::setprecision(2) << r.imbalance;
    out << std::left << std::setw(20) << to_string(r.strategy) << std::setw(6) << r.connections << std::setw(16)
        << amount.str() << std::setw(8) << imbalance.str() << std::setw(22) << cell(r.success_rate)
        << std::setw(22) << cell(r.avg_relative_fee) << std::setw(22) << cell(r.avg_hop_count)
        << cell(r.final_imbalance) << '\n';
  }
}

int cmd_run(const CommonArgs& args, const std::string& payments_path, std::ostream& out) {
  const ExperimentConfig cfg = load_config(args);
  std::vector<PaymentRequest> imported;
  RunOptions options;
  options.jobs = args.jobs;
  if (!payments_path.empty()) {
    std::ifstream in(payments_path);
    if (!in) throw UsageError("cannot read payments file " + payments_path);
    imported = read_payments_csv(in);
    options.imported = &imported;
  }
  const auto dir = prepare_output(args, {"trials.csv", "aggregate.csv"});
  log_line(dir, "run started");
  const auto report = run_experiment(cfg, options);
  write_file(dir / "trials.csv", [&](std::ostream& f) { write_trials_csv(f, report.trials); });
  write_file(dir / "aggregate.csv", [&](std::ostream& f) {
    write_aggregate_csv(f, std::span<const AggregateRow>(&report.aggregate, 1));
  });
  log_line(dir, "run finished");
  print_summary(out, std::span<const AggregateRow>(&report.aggregate, 1));
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const SweepArgs& sweep, std::ostream& out) {
  const ExperimentConfig cfg = load_config(args);
  const auto parameter = parse_sweep_parameter(sweep.parameter);
  if (!parameter) throw UsageError("unknown sweep parameter '" + sweep.parameter + "'");
  const auto values = parse_doubles(sweep.values, "--values");
  const auto strategies = parse_strategies(sweep.strategies);
  SweepOptions options;
  options.jobs = args.jobs;
  options.average_imbalance = parse_doubles(sweep.average_imbalance, "--average-imbalance");

  const auto dir = prepare_output(args, {"trials.csv", "aggregate.csv"});
  log_line(dir, "sweep started");
  const auto report = run_sweep(cfg, *parameter, values, strategies, options);
  write_file(dir / "trials.csv", [&](std::ostream& f) { write_trials_csv(f, report.trials); });
  write_file(dir / "aggregate.csv", [&](std::ostream& f) { write_aggregate_csv(f, report.rows); });
  log_line(dir, "sweep finished");
  print_summary(out, report.rows);
  return kExitOk;
}

int cmd_gen_workload(const CommonArgs& args, std::ostream& out) {
  const ExperimentConfig cfg = load_config(args);
  const auto dir = prepare_output(args, {"payments.csv"});
  const SimNetwork sim = generate_network(cfg, cfg.seed);
  const auto payments = generate_workload(cfg, sim, cfg.seed);
  write_file(dir / "payments.csv", [&](std::ostream& f) { write_payments_csv(f, payments); });
  out << "wrote " << payments.size() << " payments to " << (dir / "payments.csv").string() << '\n';
  return kExitOk;
}

int cmd_validate(const CommonArgs& args, std::ostream& out) {
  const ExperimentConfig cfg = load_config(args);
  out << "config ok: nodes=" << cfg.nodes << " degree=" << cfg.degree << " payments=" << cfg.payments
      << " connections=" << cfg.connections << " strategy=" << to_string(cfg.strategy)
      << " replications=" << cfg.replications << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Payment channel network gateway-selection simulator", "pcnsim"};
  app.require_subcommand(1);

  CommonArgs common;
  SweepArgs sweep;
  std::string payments_path;

  auto* run_cmd = app.add_subcommand("run", "Run replicated trials of one configuration");
  add_common(*run_cmd, common);
  run_cmd->add_option("--payments", payments_path, "Replay this payment CSV in every trial");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter across strategies");
  add_common(*sweep_cmd, common);
  sweep_cmd->add_option("--param", sweep.parameter, "connections | amount | imbalance")->required();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required();
  sweep_cmd->add_option("--strategies", sweep.strategies, "Comma-separated strategy names or 'all'");
  sweep_cmd->add_option("--average-imbalance", sweep.average_imbalance,
                        "Average every cell over these comma-separated imbalance rates");

  auto* gen_cmd = app.add_subcommand("gen-workload", "Write the payment CSV for the config seed");
  add_common(*gen_cmd, common);

  auto* validate_cmd = app.add_subcommand("validate-config", "Check a configuration without running it");
  add_common(*validate_cmd, common);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("pcnsim");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(common, payments_path, out);
    if (sweep_cmd->parsed()) return cmd_sweep(common, sweep, out);
    if (gen_cmd->parsed()) return cmd_gen_workload(common, out);
    if (validate_cmd->parsed()) return cmd_validate(common, out);
  } catch (const UsageError& e) {
    err << "pcnsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "pcnsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnknownKey& e) {
    err << "pcnsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "pcnsim: invalid config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    err << "pcnsim: invalid config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "pcnsim: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pcn::cli
