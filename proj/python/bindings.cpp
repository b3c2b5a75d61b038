// Python bindings for the core operations: scenario construction, closed-form
// and Monte-Carlo rates, antenna dimensioning and the energy-efficiency model.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <armadillo>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "obmimo/analysis.hpp"
#include "obmimo/quantize.hpp"
#include "obmimo/rates.hpp"
#include "obmimo/scenario.hpp"

namespace py = pybind11;
using namespace obmimo;

namespace {

// Armadillo is column-major; return C-ordered numpy copies.
py::array_t<double> to_np(const arma::mat& m) {
  py::array_t<double> out({m.n_rows, m.n_cols});
  auto r = out.mutable_unchecked<2>();
  for (arma::uword i = 0; i < m.n_rows; ++i)
    for (arma::uword j = 0; j < m.n_cols; ++j) r(i, j) = m(i, j);
  return out;
}

py::array_t<double> to_np(const arma::cube& c) {
  py::array_t<double> out({c.n_rows, c.n_cols, c.n_slices});
  auto r = out.mutable_unchecked<3>();
  for (arma::uword i = 0; i < c.n_rows; ++i)
    for (arma::uword j = 0; j < c.n_cols; ++j)
      for (arma::uword k = 0; k < c.n_slices; ++k) r(i, j, k) = c(i, j, k);
  return out;
}

py::array_t<double> to_np(const arma::vec& v) {
  // Note: the single-ssize_t array_t constructor in this pybind11 release
  // produces a zero-stride array; always pass an explicit shape.
  py::array_t<double> out(
      std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.n_elem)});
  std::memcpy(out.mutable_data(), v.memptr(), sizeof(double) * v.n_elem);
  return out;
}

arma::cube cube_from_np(const py::array_t<double, py::array::c_style |
                                                      py::array::forcecast>& a) {
  if (a.ndim() != 3) throw std::invalid_argument("beta must be a 3-d array");
  auto r = a.unchecked<3>();
  arma::cube c(static_cast<arma::uword>(a.shape(0)),
               static_cast<arma::uword>(a.shape(1)),
               static_cast<arma::uword>(a.shape(2)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j)
      for (py::ssize_t k = 0; k < a.shape(2); ++k)
        c(static_cast<arma::uword>(i), static_cast<arma::uword>(j),
          static_cast<arma::uword>(k)) = r(i, j, k);
  return c;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

NetworkScenario default_scenario(int L, int M, int K, double pt_dbw,
                                 double sigma2, double rho_p) {
  if (rho_p <= 0.0) rho_p = 1.0 / sigma2;
  return make_scenario(L, M, K, db_to_linear(pt_dbw), sigma2, rho_p,
                       default_geometry(L));
}

RateBreakdown mc_rates(const NetworkScenario& s, long trials, int symbol_draws,
                       bool onebit, std::uint64_t seed, bool exact_gain,
                       int threads) {
  return mc_rate_breakdown(
      s, trials, symbol_draws,
      onebit ? RateMode::kMcOneBit : RateMode::kMcFullRes, RngStream(seed),
      exact_gain ? GainModel::kExactDiag : GainModel::kStatistical, threads);
}

}  // namespace

PYBIND11_MODULE(_obmimo, m) {
  m.doc() =
      "Multi-cell massive MIMO downlink with one-bit converters: closed-form "
      "rate expressions, Monte-Carlo validation, antenna dimensioning and "
      "energy efficiency.";

  py::class_<NetworkScenario>(m, "Scenario")
      .def_readonly("L", &NetworkScenario::L)
      .def_readonly("M", &NetworkScenario::M)
      .def_readonly("K", &NetworkScenario::K)
      .def_readonly("Pt", &NetworkScenario::Pt)
      .def_readonly("sigma2", &NetworkScenario::sigma2)
      .def_readonly("rho_p", &NetworkScenario::rho_p)
      .def_property_readonly(
          "beta", [](const NetworkScenario& s) { return to_np(s.beta); })
      .def("__repr__", [](const NetworkScenario& s) {
        return "Scenario(L=" + std::to_string(s.L) +
               ", M=" + std::to_string(s.M) + ", K=" + std::to_string(s.K) +
               ", Pt=" + std::to_string(s.Pt) + " W)";
      });

  m.def("scenario", &default_scenario, py::arg("L") = 4, py::arg("M") = 128,
        py::arg("K") = 8, py::arg("pt_dbw") = 10.0, py::arg("sigma2") = 1e-11,
        py::arg("rho_p") = -1.0,
        "Square-grid cells, users equally spaced on a 250 m circle. rho_p < 0 "
        "picks 1/sigma2.");
  m.def(
      "scenario_from_beta",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             beta,
         int M, double pt_dbw, double sigma2, double rho_p) {
        if (rho_p <= 0.0) rho_p = 1.0 / sigma2;
        return make_scenario_from_beta(M, db_to_linear(pt_dbw), sigma2, rho_p,
                                       cube_from_np(beta));
      },
      py::arg("beta"), py::arg("M") = 128, py::arg("pt_dbw") = 10.0,
      py::arg("sigma2") = 1e-11, py::arg("rho_p") = -1.0,
      "Scenario from an explicit large-scale gain cube beta[j, l, k].");

  m.def(
      "training_stats",
      [](const NetworkScenario& s) {
        const TrainingStats ts = training_stats(s);
        py::dict d;
        d["abar"] = to_np(ts.abar);
        d["t_one"] = to_np(ts.t_one);
        d["t_fr"] = to_np(ts.t_fr);
        d["zeta_one"] = to_np(ts.zeta_one);
        d["zeta_fr"] = to_np(ts.zeta_fr);
        d["zeta_bar"] = to_np(ts.zeta_bar);
        return d;
      },
      py::arg("scenario"));

  m.def(
      "quantize",
      [](const py::array_t<std::complex<double>,
                           py::array::c_style | py::array::forcecast>& a) {
        py::array_t<std::complex<double>> out(
            std::vector<py::ssize_t>(a.shape(), a.shape() + a.ndim()));
        const auto* src = a.data();
        auto* dst = out.mutable_data();
        for (py::ssize_t i = 0; i < a.size(); ++i) dst[i] = quantize(src[i]);
        return out;
      },
      py::arg("a"),
      "Elementwise one-bit quantizer (1/sqrt(2))*(sign(Re) + 1j*sign(Im)).");

  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("sum_rate", &RateBreakdown::sum_rate)
      .def_readonly("sum_rate_per_user", &RateBreakdown::sum_rate_per_user)
      .def_readonly("sum_rate_per_user_se",
                    &RateBreakdown::sum_rate_per_user_se)
      .def_property_readonly(
          "rate", [](const RateBreakdown& r) { return to_np(r.rate); })
      .def_property_readonly(
          "rate_se", [](const RateBreakdown& r) { return to_np(r.rate_se); })
      .def_property_readonly(
          "gamma", [](const RateBreakdown& r) { return to_np(r.gamma); })
      .def_property_readonly(
          "ds", [](const RateBreakdown& r) { return to_np(r.ds); })
      .def_property_readonly(
          "cu", [](const RateBreakdown& r) { return to_np(r.cu); })
      .def_property_readonly(
          "qn", [](const RateBreakdown& r) { return to_np(r.qn); })
      .def_property_readonly(
          "iui", [](const RateBreakdown& r) { return to_np(r.iui); })
      .def_property_readonly(
          "pc", [](const RateBreakdown& r) { return to_np(r.pc); })
      .def_property_readonly(
          "tn", [](const RateBreakdown& r) { return to_np(r.tn); })
      .def("__repr__", [](const RateBreakdown& r) {
        return "RateBreakdown(sum_rate_per_user=" +
               std::to_string(r.sum_rate_per_user) + ")";
      });

  m.def("cf_rates_onebit", &cf_rates_onebit, py::arg("scenario"),
        "Closed-form per-user ergodic rates with one-bit converters.");
  m.def("cf_rates_fr", &cf_rates_fr, py::arg("scenario"),
        "Closed-form per-user ergodic rates at full resolution.");
  m.def("cf_rates_asymptotic", &cf_rates_asymptotic, py::arg("scenario"),
        "Pilot-contamination-limited rates in the infinite-antenna limit.");
  m.def("mc_rates", &mc_rates, py::arg("scenario"), py::arg("trials") = 2000,
        py::arg("symbol_draws") = 200, py::arg("onebit") = true,
        py::arg("seed") = 1, py::arg("exact_gain") = true,
        py::arg("threads") = 1,
        "Monte-Carlo rate breakdown; deterministic for fixed seed, "
        "independent of thread count.");

  m.def(
      "degradation_ratios",
      [](const NetworkScenario& s) {
        const DegradationRatios d = degradation_ratios(s);
        py::dict out;
        out["tn"] = to_np(d.tn);
        out["cu"] = to_np(d.cu);
        out["iui"] = to_np(d.iui);
        out["pc"] = to_np(d.pc);
        return out;
      },
      py::arg("scenario"),
      "One-bit/full-resolution ratios of the SQINR denominator terms.");

  py::class_<KappaResult>(m, "KappaResult")
      .def_readonly("M_conv", &KappaResult::M_conv)
      .def_readonly("M_one", &KappaResult::M_one)
      .def_readonly("M_one_int", &KappaResult::M_one_int)
      .def_readonly("kappa", &KappaResult::kappa)
      .def_readonly("achieved_gap", &KappaResult::achieved_gap)
      .def_readonly("epsilon", &KappaResult::epsilon)
      .def_readonly("iterations", &KappaResult::iterations)
      .def("__repr__", [](const KappaResult& k) {
        return "KappaResult(M_conv=" + std::to_string(k.M_conv) +
               ", kappa=" + std::to_string(k.kappa) + ")";
      });

  m.def("kappa_search", &kappa_search, py::arg("scenario"), py::arg("m_conv"),
        py::arg("epsilon") = 1e-3,
        "Antennas a one-bit system needs to match a full-resolution system "
        "with m_conv antennas, as a ratio kappa = M_one/m_conv.");
  m.def("low_snr_kappa", &low_snr_kappa,
        "Low-SNR limit of the antenna ratio, pi^2/4.");

  m.def(
      "p_dac",
      [](double f_s, int bits, double dac_const) {
        PowerModel pm;
        pm.dac_const = dac_const;
        return p_dac(f_s, bits, pm);
      },
      py::arg("f_s"), py::arg("bits"), py::arg("dac_const") = 494e-15,
      "Per-DAC power dac_const * f_s * 2^bits, watts.");

  m.def(
      "ee_sweep",
      [](const NetworkScenario& s, int m_conv, int b_fr,
         const std::vector<double>& fs_grid, double amp_efficiency,
         double p_rf, double dac_const) {
        PowerModel pm;
        pm.amp_efficiency = amp_efficiency;
        pm.P_RF = p_rf;
        pm.dac_const = dac_const;
        const auto pts = ee_sweep(s, m_conv, b_fr, fs_grid, pm);
        arma::vec fs(pts.size()), one(pts.size()), fr(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
          fs(i) = pts[i].f_s;
          one(i) = pts[i].ee_onebit;
          fr(i) = pts[i].ee_fr;
        }
        py::dict out;
        out["f_s"] = to_np(fs);
        out["ee_onebit"] = to_np(one);
        out["ee_fr"] = to_np(fr);
        return out;
      },
      py::arg("scenario"), py::arg("m_conv"), py::arg("b_fr"),
      py::arg("fs_grid"),
      py::arg("amp_efficiency") = 0.39, py::arg("p_rf") = 0.040,
      py::arg("dac_const") = 494e-15,
      "Energy efficiency versus sampling frequency for a full-resolution "
      "system at m_conv antennas and a rate-matched one-bit system.");
}
