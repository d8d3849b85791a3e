#include "resonance/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "resonance/errors.hpp"

namespace resonance {

using nlohmann::json;

json to_json(const TrigPoly& poly) {
  json modes = json::array();
  for (const auto& [key, c] : poly.modes()) {
    json coeffs = json::array();
    for (Eigen::Index d = 0; d < c.size(); ++d) coeffs.push_back({c(d).real(), c(d).imag()});
    modes.push_back({{"j", key.first}, {"l", key.second}, {"poly", coeffs}});
  }
  return modes;
}

json to_json(const AveragedSystem& avg) {
  json tables = json::array();
  auto add = [&](const char* target, const std::vector<TrigPoly>& seq) {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      TrigPoly p = seq[k];
      p.prune(1e-15);
      tables.push_back({{"k", k}, {"target", target}, {"modes", to_json(p)}});
    }
  };
  add("Lambda", avg.Lambda);
  add("Omega", avg.Omega);
  add("u", avg.u);
  add("v", avg.v);
  return {{"N", avg.N},         {"n", avg.n},     {"p", avg.p},   {"kappa", avg.kappa},
          {"varkappa", avg.varkappa}, {"s0", avg.s0}, {"r0", avg.r0}, {"eta", avg.eta},
          {"epsilon", avg.epsilon},   {"tables", tables}};
}

json to_json(const RegimeReport& r) {
  json eq = json::array();
  for (const auto& e : r.equilibria.roots) eq.push_back({{"psi0", e.psi0}, {"xi", e.xi}, {"stable", e.stable}});
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"regime", to_string(r.regime)},
          {"psi0", num(r.psi0)},
          {"xi", num(r.xi)},
          {"eta", r.eta},
          {"h", r.dissipation.h},
          {"gamma_h", r.dissipation.gamma_h},
          {"gamma_tilde_h", r.dissipation.gamma_tilde_h},
          {"z0", r.dissipation.z0},
          {"horizon", to_string(r.horizon)},
          {"degenerate", r.equilibria.degenerate},
          {"equilibria", eq},
          {"note", r.note}};
}

json to_json(const CaptureStats& s) {
  int escaped = 0;
  for (const auto& o : s.outcomes) escaped += o.escaped ? 1 : 0;
  return {{"n_paths", s.n_paths}, {"n_captured", s.n_captured}, {"p_hat", s.p_hat},
          {"ci_low", s.ci_low},   {"ci_high", s.ci_high},       {"delta1", s.delta1},
          {"eps2", s.eps2},       {"horizon", s.horizon},       {"horizon_clamped", s.horizon_clamped},
          {"n_escaped", escaped}, {"seed", s.seed}};
}

json to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.resolved) j[k] = v;
  return j;
}

json resonance_json(const PerturbedSystem& sys) {
  const ResonanceData& r = sys.resonance();
  return {{"system", sys.name()}, {"r0", r.r0},       {"eta", r.eta},  {"kappa", r.kappa},
          {"varkappa", r.varkappa}, {"n", r.n},       {"p", r.p},      {"nu_r0", sys.nu(r.r0)},
          {"r_bound", sys.r_bound()}, {"s0", sys.phase().s0}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_nu_table(std::ostream& os, const PerturbedSystem& sys, int points) {
  os << "r,nu\n" << std::setprecision(12);
  const double top = sys.r_bound() * (1.0 - 1e-9);
  for (int i = 0; i < points; ++i) {
    const double r = top * i / (points - 1);
    os << r << ',' << sys.nu(r) << '\n';
  }
}

void write_lambda_table(std::ostream& os, const AveragedSystem& avg, int points) {
  os << "psi,lambda\n" << std::setprecision(12);
  const TrigPoly& lam = avg.lambda();
  for (int i = 0; i < points; ++i) {
    const double psi = 2.0 * std::numbers::pi * i / (points - 1);
    os << psi << ',' << lam.evaluate(0.0, psi, 0.0) << '\n';
  }
}

}  // namespace resonance
