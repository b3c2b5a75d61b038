#include "obmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace obmimo {

namespace {

using nlohmann::json;

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer())
    throw ConfigError("config: '" + key + "' must be an integer");
  return j.get<long>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty())
    throw ConfigError("config: '" + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, key));
  return out;
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

double ExperimentConfig::sigma2_watts() const {
  return std::pow(10.0, (sigma2_dbm - 30.0) / 10.0);
}

double ExperimentConfig::rho_p() const {
  return rho_p_rule == "value" ? rho_p_value : 1.0 / sigma2_watts();
}

double ExperimentConfig::pt_watts(double pt_dbw_value) const {
  return std::pow(10.0, pt_dbw_value / 10.0);
}

NetworkScenario ExperimentConfig::scenario_at(double pt_dbw_value,
                                              int M_override) const {
  const int m = M_override > 0 ? M_override : M;
  const double pt = pt_watts(pt_dbw_value);
  const double s2 = sigma2_watts();
  if (beta_explicit)
    return make_scenario_from_beta(m, pt, s2, rho_p(), *beta_explicit);
  Geometry geom;
  if (bs_positions.empty()) {
    geom = default_geometry(L);
  } else {
    geom.bs_xy = bs_positions;
  }
  geom.circle_radius = circle_radius;
  geom.pathloss_exponent = alpha;
  geom.pathloss_const = pathloss_const;
  if (placement_mode == "random-circle")
    return make_scenario_random(L, m, K, pt, s2, rho_p(), geom,
                                RngStream(seed));
  return make_scenario(L, m, K, pt, s2, rho_p(), geom, placement_offset);
}

GainModel ExperimentConfig::gain() const {
  return gain_model == "statistical" ? GainModel::kStatistical : GainModel::kExactDiag;
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check(j.is_object(), "top level must be a JSON object");

  static const std::set<std::string> known = {
      "L", "M", "K", "placement_mode", "placement_offset", "circle_radius",
      "alpha", "pathloss_const", "bs_positions", "beta", "pt_dbw",
      "sigma2_dbm", "rho_p_rule", "rho_p_value", "trials", "symbol_draws",
      "seed", "gain_model", "epsilon", "m_conv", "kappa_pt_dbw", "fs_hz",
      "p_rf_w", "amp_efficiency", "b_fr", "antenna_grid",
      "antenna_sweep_pt_dbw", "format", "out_path"};
  for (const auto& item : j.items())
    check(known.count(item.key()) > 0, "unknown key '" + item.key() + "'");

  ExperimentConfig c;
  if (j.contains("L")) c.L = static_cast<int>(as_integer(j["L"], "L"));
  if (j.contains("M")) c.M = static_cast<int>(as_integer(j["M"], "M"));
  if (j.contains("K")) c.K = static_cast<int>(as_integer(j["K"], "K"));
  if (j.contains("placement_mode"))
    c.placement_mode = as_string(j["placement_mode"], "placement_mode");
  if (j.contains("placement_offset"))
    c.placement_offset = as_number(j["placement_offset"], "placement_offset");
  if (j.contains("circle_radius"))
    c.circle_radius = as_number(j["circle_radius"], "circle_radius");
  if (j.contains("alpha")) c.alpha = as_number(j["alpha"], "alpha");
  if (j.contains("pathloss_const"))
    c.pathloss_const = as_number(j["pathloss_const"], "pathloss_const");
  if (j.contains("bs_positions")) {
    const auto& arr = j["bs_positions"];
    check(arr.is_array(), "'bs_positions' must be an array of [x, y] pairs");
    for (const auto& p : arr) {
      check(p.is_array() && p.size() == 2, "'bs_positions' entries must be [x, y]");
      c.bs_positions.push_back(
          {as_number(p[0], "bs_positions"), as_number(p[1], "bs_positions")});
    }
  }
  if (j.contains("beta")) {
    const auto& b = j["beta"];
    check(b.is_array() && !b.empty(), "'beta' must be a nested [j][l][k] array");
    const auto Lj = b.size();
    arma::cube cube;
    for (size_t jj = 0; jj < Lj; ++jj) {
      const auto& bj = b[jj];
      check(bj.is_array() && bj.size() == Lj, "'beta' must be L x L x K");
      for (size_t ll = 0; ll < Lj; ++ll) {
        const auto& bl = bj[ll];
        check(bl.is_array() && !bl.empty(), "'beta' must be L x L x K");
        if (cube.n_elem == 0) cube.zeros(Lj, Lj, bl.size());
        check(bl.size() == cube.n_slices, "'beta' slices must share K");
        for (size_t kk = 0; kk < bl.size(); ++kk)
          cube(jj, ll, kk) = as_number(bl[kk], "beta");
      }
    }
    c.beta_explicit = cube;
  }
  if (j.contains("pt_dbw")) c.pt_dbw = as_number_list(j["pt_dbw"], "pt_dbw");
  if (j.contains("sigma2_dbm"))
    c.sigma2_dbm = as_number(j["sigma2_dbm"], "sigma2_dbm");
  if (j.contains("rho_p_rule"))
    c.rho_p_rule = as_string(j["rho_p_rule"], "rho_p_rule");
  if (j.contains("rho_p_value"))
    c.rho_p_value = as_number(j["rho_p_value"], "rho_p_value");
  if (j.contains("trials")) c.trials = as_integer(j["trials"], "trials");
  if (j.contains("symbol_draws"))
    c.symbol_draws = static_cast<int>(as_integer(j["symbol_draws"], "symbol_draws"));
  if (j.contains("seed")) {
    check(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0,
          "'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("gain_model"))
    c.gain_model = as_string(j["gain_model"], "gain_model");
  if (j.contains("epsilon")) c.epsilon = as_number(j["epsilon"], "epsilon");
  if (j.contains("m_conv")) c.m_conv = as_number_list(j["m_conv"], "m_conv");
  if (j.contains("kappa_pt_dbw"))
    c.kappa_pt_dbw = as_number_list(j["kappa_pt_dbw"], "kappa_pt_dbw");
  if (j.contains("fs_hz")) c.fs_hz = as_number_list(j["fs_hz"], "fs_hz");
  if (j.contains("p_rf_w")) c.p_rf_w = as_number(j["p_rf_w"], "p_rf_w");
  if (j.contains("amp_efficiency"))
    c.amp_efficiency = as_number(j["amp_efficiency"], "amp_efficiency");
  if (j.contains("b_fr")) c.b_fr = static_cast<int>(as_integer(j["b_fr"], "b_fr"));
  if (j.contains("antenna_grid"))
    c.antenna_grid = as_number_list(j["antenna_grid"], "antenna_grid");
  if (j.contains("antenna_sweep_pt_dbw"))
    c.antenna_sweep_pt_dbw =
        as_number(j["antenna_sweep_pt_dbw"], "antenna_sweep_pt_dbw");
  if (j.contains("format")) c.format = as_string(j["format"], "format");
  if (j.contains("out_path")) c.out_path = as_string(j["out_path"], "out_path");

  // Semantic validation; scenario-level checks (beta positivity, M > K)
  // re-run inside NetworkScenario::validate() as well.
  check(c.L >= 1, "'L' must be >= 1");
  check(c.K >= 1, "'K' must be >= 1");
  check(c.M > c.K, "'M' must exceed 'K' (zero-forcing needs M > K)");
  check(c.placement_mode == "equal-spacing" || c.placement_mode == "random-circle",
        "'placement_mode' must be 'equal-spacing' or 'random-circle'");
  check(c.circle_radius > 0, "'circle_radius' must be positive");
  check(c.pathloss_const > 0, "'pathloss_const' must be positive");
  check(c.bs_positions.empty() ||
            c.bs_positions.size() == static_cast<size_t>(c.L),
        "'bs_positions' must list one [x, y] per cell");
  if (c.beta_explicit) {
    check(c.beta_explicit->n_rows == static_cast<arma::uword>(c.L) &&
              c.beta_explicit->n_slices == static_cast<arma::uword>(c.K),
          "'beta' dimensions must match L and K");
    check(c.beta_explicit->min() > 0.0, "'beta' entries must be positive");
  }
  check(c.rho_p_rule == "1/sigma2" || c.rho_p_rule == "value",
        "'rho_p_rule' must be '1/sigma2' or 'value'");
  if (c.rho_p_rule == "value")
    check(c.rho_p_value > 0, "'rho_p_value' must be positive");
  check(c.trials >= 1, "'trials' must be >= 1");
  check(c.symbol_draws >= 1, "'symbol_draws' must be >= 1");
  check(c.gain_model == "exact" || c.gain_model == "statistical",
        "'gain_model' must be 'exact' or 'statistical'");
  check(c.epsilon > 0, "'epsilon' must be positive");
  for (double m : c.m_conv)
    check(m > c.K, "'m_conv' entries must exceed K");
  for (double fs : c.fs_hz) check(fs > 0, "'fs_hz' entries must be positive");
  check(c.p_rf_w > 0, "'p_rf_w' must be positive");
  check(c.amp_efficiency > 0 && c.amp_efficiency <= 1,
        "'amp_efficiency' must be in (0, 1]");
  check(c.b_fr >= 1, "'b_fr' must be >= 1");
  for (double m : c.antenna_grid)
    check(m > c.K, "'antenna_grid' entries must exceed K (zero-forcing)");
  check(c.format == "csv" || c.format == "json",
        "'format' must be 'csv' or 'json'");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_json(const ExperimentConfig& c) {
  // nlohmann::json's default object keeps keys sorted, and doubles render via
  // shortest round-trip, so dump() is already canonical.
  json j;
  j["L"] = c.L;
  j["M"] = c.M;
  j["K"] = c.K;
  j["placement_mode"] = c.placement_mode;
  j["placement_offset"] = c.placement_offset;
  j["circle_radius"] = c.circle_radius;
  j["alpha"] = c.alpha;
  j["pathloss_const"] = c.pathloss_const;
  if (!c.bs_positions.empty()) {
    json arr = json::array();
    for (const auto& p : c.bs_positions) arr.push_back({p[0], p[1]});
    j["bs_positions"] = arr;
  }
  if (c.beta_explicit) {
    json bj = json::array();
    for (arma::uword jj = 0; jj < c.beta_explicit->n_rows; ++jj) {
      json bl = json::array();
      for (arma::uword ll = 0; ll < c.beta_explicit->n_cols; ++ll) {
        json bk = json::array();
        for (arma::uword kk = 0; kk < c.beta_explicit->n_slices; ++kk)
          bk.push_back((*c.beta_explicit)(jj, ll, kk));
        bl.push_back(bk);
      }
      bj.push_back(bl);
    }
    j["beta"] = bj;
  }
  j["pt_dbw"] = c.pt_dbw;
  j["sigma2_dbm"] = c.sigma2_dbm;
  j["rho_p_rule"] = c.rho_p_rule;
  j["rho_p_value"] = c.rho_p_value;
  j["trials"] = c.trials;
  j["symbol_draws"] = c.symbol_draws;
  j["seed"] = c.seed;
  j["gain_model"] = c.gain_model;
  j["epsilon"] = c.epsilon;
  j["m_conv"] = c.m_conv;
  j["kappa_pt_dbw"] = c.kappa_pt_dbw;
  j["fs_hz"] = c.fs_hz;
  j["p_rf_w"] = c.p_rf_w;
  j["amp_efficiency"] = c.amp_efficiency;
  j["b_fr"] = c.b_fr;
  j["antenna_grid"] = c.antenna_grid;
  j["antenna_sweep_pt_dbw"] = c.antenna_sweep_pt_dbw;
  // format and out_path are rendering/destination choices, not part of the
  // experiment identity, so they stay out of the canonical form.
  j["tool_version"] = kToolVersion;
  return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = canonical_json(cfg);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;  // FNV prime
  }
  return h;
}

}  // namespace obmimo
