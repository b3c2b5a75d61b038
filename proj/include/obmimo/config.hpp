// Experiment configuration: JSON file in, validated struct out.
// dB/dBm units exist only here; everything downstream is linear.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obmimo/rates.hpp"
#include "obmimo/scenario.hpp"

namespace obmimo {

inline constexpr const char* kToolVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // scenario
  int L = 4, M = 128, K = 8;
  std::string placement_mode = "equal-spacing";  // or "random-circle"
  double placement_offset = 0.0;                 // radians, equal-spacing only
  double circle_radius = 250.0;
  double alpha = 3.0;            // pathloss exponent
  double pathloss_const = 1e-3;  // beta = pathloss_const / d^alpha
  std::vector<std::array<double, 2>> bs_positions;  // default: 525 m grid
  std::optional<arma::cube> beta_explicit;          // overrides geometry

  // power
  std::vector<double> pt_dbw = {-30, -25, -20, -15, -10, -5, 0, 5, 10, 15, 20};
  double sigma2_dbm = -80.0;
  std::string rho_p_rule = "1/sigma2";  // or "value"
  double rho_p_value = 0.0;             // linear, used when rule == "value"

  // mc
  long trials = 2000;
  int symbol_draws = 200;
  std::uint64_t seed = 1;
  std::string gain_model = "exact";  // or "statistical"

  // analysis
  double epsilon = 1e-3;
  std::vector<double> m_conv = {1e2, 1e3, 1e4, 1e5, 5e5, 1e6};
  std::vector<double> kappa_pt_dbw = {-30, -25, -20, -15, -10, -5,
                                      0,   5,   10,  15,  20};
  std::vector<double> fs_hz = {1e6,   2e6,   5e6,   1e7,   2e7,   5e7,  7.5e7,
                               1e8,   1.25e8, 1.5e8, 2e8,   3e8,  5e8,
                               7.5e8, 1e9};
  double p_rf_w = 0.040;
  double amp_efficiency = 0.39;
  int b_fr = 10;
  std::vector<double> antenna_grid = {50, 100, 200, 300, 400, 600, 800};
  double antenna_sweep_pt_dbw = 10.0;

  // output
  std::string format = "csv";  // or "json"
  std::string out_path;        // empty -> stdout

  double sigma2_watts() const;
  double rho_p() const;
  double pt_watts(double pt_dbw_value) const;

  // Scenario for a given transmit power; M overridable for antenna sweeps.
  NetworkScenario scenario_at(double pt_dbw_value, int M_override = -1) const;
  GainModel gain() const;
};

// Defaults above; file contents override field by field.
ExperimentConfig default_config();
ExperimentConfig load_config(const std::string& path);   // throws ConfigError
ExperimentConfig parse_config(const std::string& json);  // throws ConfigError

// FNV-1a over the canonical (sorted-key) JSON rendering of the config.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string canonical_json(const ExperimentConfig& cfg);

}  // namespace obmimo
