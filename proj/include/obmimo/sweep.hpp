// Experiment drivers behind the CLI subcommands, and the table writers.
// Identical (config, seed) must produce byte-identical output, including
// under parallel execution, so tables carry no timestamps and all floats are
// rendered with round-trip precision.
#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "obmimo/config.hpp"

namespace obmimo {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> meta;  // config_hash, seed, tool_version...
};

// CSV: "# key=value" metadata lines, a header row, then %.17g values.
// JSON: {"meta": {...}, "columns": [...], "rows": [[...], ...]}.
void write_table(const Table& t, const std::string& format, std::ostream& os);
void write_table_file(const Table& t, const std::string& format,
                      const std::string& path);  // empty path -> stdout

// Sum average rate per user vs transmit power (closed forms + Monte-Carlo).
Table run_rate_sweep(const ExperimentConfig& cfg, int threads);
// Sum average rate per user vs antenna count, plus the shared asymptote.
Table run_antenna_sweep(const ExperimentConfig& cfg, int threads);
// kappa for every (M_conv, P_t) pair in the config.
Table run_kappa(const ExperimentConfig& cfg, int threads);
// Energy efficiency vs sampling frequency, one-bit vs full resolution.
Table run_ee(const ExperimentConfig& cfg, int threads);

struct ValidationCheck {
  std::string name;
  std::string status;  // "PASS", "FAIL" or "INSUFFICIENT PRECISION"
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool failed() const {
    for (const auto& c : checks)
      if (c.status == "FAIL") return true;
    return false;
  }
};

// Invariant suite: algebraic identities, Bussgang statistics, ZF identity and
// the Monte-Carlo vs closed-form gap (with standard-error gating: a gap that
// the trial budget cannot resolve reports INSUFFICIENT PRECISION, not FAIL).
ValidationReport run_validation(const ExperimentConfig& cfg, int threads);

}  // namespace obmimo
