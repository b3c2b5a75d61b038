// obmimo: link-level simulator and closed-form analysis for a multi-cell
// massive MIMO downlink with one-bit ADCs/DACs and zero-forcing precoding.
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "obmimo/config.hpp"
#include "obmimo/sweep.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::string format;
  long long seed = -1;
  long trials = -1;
  int parallel = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path,
                  "JSON config file; built-in defaults when omitted");
  cmd->add_option("--seed", a.seed, "root RNG seed (overrides config)");
  cmd->add_option("--out", a.out, "output file (default: stdout)");
  cmd->add_option("--format", a.format, "output format (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--trials", a.trials,
                  "Monte-Carlo trials (overrides config)");
  cmd->add_option("--parallel", a.parallel,
                  "worker threads for Monte-Carlo trials")
      ->check(CLI::PositiveNumber);
}

obmimo::ExperimentConfig make_cfg(const CommonArgs& a) {
  obmimo::ExperimentConfig cfg = a.config_path.empty()
                                     ? obmimo::default_config()
                                     : obmimo::load_config(a.config_path);
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (!a.out.empty()) cfg.out_path = a.out;
  if (!a.format.empty()) cfg.format = a.format;
  if (a.trials >= 1) cfg.trials = a.trials;
  return cfg;
}

int run_validate(const obmimo::ExperimentConfig& cfg, int parallel) {
  const obmimo::ValidationReport rep = obmimo::run_validation(cfg, parallel);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path);
    if (!file) {
      std::cerr << "cannot open output file '" << cfg.out_path << "'\n";
      return 1;
    }
    os = &file;
  }
  for (const auto& c : rep.checks)
    *os << "[" << c.status << "] " << c.name << ": " << c.detail << "\n";
  *os << (rep.failed() ? "RESULT: FAIL" : "RESULT: PASS") << "\n";
  return rep.failed() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "One-bit massive MIMO downlink: Monte-Carlo simulation and closed-form "
      "rate/antenna/energy analysis"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* rate = app.add_subcommand(
      "rate-sweep", "Sum average rate per user versus transmit power");
  CLI::App* antenna = app.add_subcommand(
      "antenna-sweep", "Sum average rate per user versus antenna count");
  CLI::App* kappa = app.add_subcommand(
      "kappa", "One-bit / full-resolution antenna ratio versus power");
  CLI::App* ee = app.add_subcommand(
      "ee", "Energy efficiency versus sampling frequency");
  CLI::App* validate = app.add_subcommand(
      "validate", "Run the invariant suite and report pass/fail");
  for (CLI::App* cmd : {rate, antenna, kappa, ee, validate})
    add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are a config error
  }

  try {
    const obmimo::ExperimentConfig cfg = make_cfg(args);
    if (validate->parsed()) return run_validate(cfg, args.parallel);
    obmimo::Table t;
    if (rate->parsed())
      t = obmimo::run_rate_sweep(cfg, args.parallel);
    else if (antenna->parsed())
      t = obmimo::run_antenna_sweep(cfg, args.parallel);
    else if (kappa->parsed())
      t = obmimo::run_kappa(cfg, args.parallel);
    else
      t = obmimo::run_ee(cfg, args.parallel);
    obmimo::write_table_file(t, cfg.format, cfg.out_path);
    return 0;
  } catch (const obmimo::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
