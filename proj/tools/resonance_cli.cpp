#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>

#include "resonance/averaging.hpp"
#include "resonance/config.hpp"
#include "resonance/dynamics.hpp"
#include "resonance/errors.hpp"
#include "resonance/report.hpp"
#include "resonance/stochastic.hpp"

using namespace resonance;
using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<int> order;
};

RunConfig load(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (f.out) cfg = with_override(cfg, "output.dir", *f.out);
  if (f.seed) cfg = with_override(cfg, "monte_carlo.seed", std::to_string(*f.seed));
  if (f.paths) cfg = with_override(cfg, "monte_carlo.n_paths", std::to_string(*f.paths));
  if (f.order) cfg = with_override(cfg, "averaging.order", std::to_string(*f.order));
  std::filesystem::create_directories(cfg.output.dir);
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.output.dir) / file).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  return os;
}

int emit(const RunConfig& cfg, const std::string& file, json j) {
  j["config"] = to_json(cfg);
  write_json(out_path(cfg, file), j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int solution_order(const RunConfig& cfg, const RegimeReport& rep) {
  if (cfg.monte_carlo.order > 0) return cfg.monte_carlo.order;
  return std::clamp(rep.dissipation.h, 1, 4);
}

int cmd_resonance(const Flags& f) {
  const RunConfig cfg = load(f);
  const auto sys = make_system(cfg);
  auto os = open_out(out_path(cfg, "nu.csv"));
  write_nu_table(os, *sys, cfg.output.nu_points);
  return emit(cfg, "resonance.json", resonance_json(*sys));
}

int cmd_averaged(const Flags& f) {
  const RunConfig cfg = load(f);
  const auto sys = make_system(cfg);
  const AveragedSystem avg = build_averaged(*sys, cfg.order);
  auto os = open_out(out_path(cfg, "lambda.csv"));
  write_lambda_table(os, avg);
  return emit(cfg, "averaged.json", to_json(avg));
}

int cmd_classify(const Flags& f) {
  const RunConfig cfg = load(f);
  const auto sys = make_system(cfg);
  const AveragedSystem avg = build_averaged(*sys, cfg.order);
  const RegimeReport rep = classify(avg);
  emit(cfg, "classify.json", to_json(rep));
  return rep.regime == Regime::Degenerate ? 3 : 0;
}

int cmd_simulate(const Flags& f) {
  const RunConfig cfg = load(f);
  const auto sys = make_system(cfg);
  const IntegrationBlock& ib = cfg.integration;
  const ResonanceData& res = sys->resonance();
  const double r_init = std::isnan(ib.r_init) ? res.r0 : ib.r_init;
  const double ratio = static_cast<double>(res.kappa) / res.varkappa;

  std::optional<AveragedSystem> avg;
  std::optional<ParticularSolution> ps;
  try {
    avg = build_averaged(*sys, cfg.order);
    const RegimeReport rep = classify(*avg);
    if (rep.regime == Regime::PhaseLocking) ps = particular_solution(*avg, rep.psi0, rep.xi, solution_order(cfg, rep));
  } catch (const Error&) {
    if (ib.mode == "truncated") throw;
  }

  json files = json::array();
  if (ib.mode == "truncated") {
    const double rho = (r_init - res.r0) / std::sqrt(cfg.envelope.mu(ib.t0));
    const TruncatedPath tp =
        integrate_truncated(*avg, Eigen::Vector2d(rho, ib.psi_init), ib.t0, ib.T, ib.dt, 0.0, ib.record_every);
    const std::string name = "truncated.csv";
    auto os = open_out(out_path(cfg, name));
    os << "t,rho,psi,M\n" << std::setprecision(12);
    for (std::size_t i = 0; i < tp.t.size(); ++i) {
      os << tp.t[i] << ',' << tp.state[i](0) << ',' << tp.state[i](1) << ',';
      if (ps) {
        os << resonance_metric(*avg, *ps, tp.state[i](0), tp.state[i](1), tp.t[i]) << '\n';
      } else {
        os << "nan\n";
      }
    }
    files.push_back({{"file", name}, {"left_domain", tp.left_domain}});
  } else {
    const Eigen::Vector2d init = sys->from_polar(r_init, ratio * sys->S(ib.t0) + ib.psi_init);
    for (int i = 0; i < ib.n_paths; ++i) {
      const NoiseStream stream(cfg.monte_carlo.seed, static_cast<std::uint64_t>(i));
      const SamplePath path = integrate_sde(*sys, init, ib.t0, ib.T, ib.dt, stream, ib.record_every);
      const std::string name = "path_" + std::to_string(i) + ".csv";
      auto os = open_out(out_path(cfg, name));
      write_path_csv(os, path, *sys, avg ? &*avg : nullptr, ps ? &*ps : nullptr);
      json entry = {{"file", name}, {"escaped", path.escaped}};
      entry["escape_time"] = path.escaped ? json(path.escape_time) : json(nullptr);
      files.push_back(entry);
    }
  }
  return emit(cfg, "simulate.json", {{"paths", files}});
}

int cmd_capture(const Flags& f) {
  const RunConfig cfg = load(f);
  const auto sys = make_system(cfg);
  const AveragedSystem avg = build_averaged(*sys, cfg.order);
  const RegimeReport rep = classify(avg);
  if (rep.regime == Regime::Degenerate) throw AssumptionViolated("degenerate equilibrium; capture is undefined");
  ParticularSolution ps;
  if (rep.regime == Regime::PhaseLocking) ps = particular_solution(avg, rep.psi0, rep.xi, solution_order(cfg, rep));

  const MonteCarloBlock& mc = cfg.monte_carlo;
  CaptureOptions opt;
  opt.n_paths = mc.n_paths;
  opt.delta1 = mc.delta1;
  opt.eps2 = mc.eps2;
  opt.t_star = mc.t_star;
  opt.horizon = mc.horizon_auto ? t_epsilon(cfg.envelope, avg.p, avg.n, avg.epsilon, mc.l, mc.t_star)
                                : Horizon{HorizonKind::TEpsilon, mc.horizon};
  opt.t_max = mc.t_max;
  opt.dt = mc.dt;
  opt.seed = mc.seed;
  opt.workers = mc.workers;
  opt.boundary = mc.boundary;
  opt.near_identity = mc.near_identity;
  opt.monitor_every = mc.monitor_every;
  opt.keep_paths = cfg.output.paths;
  const CaptureStats stats = capture_probability(*sys, avg, ps, opt);
  if (stats.horizon_clamped) std::cerr << "warning: infinite horizon clamped to t_max = " << mc.t_max << '\n';
  if (cfg.output.paths) {
    auto os = open_out(out_path(cfg, "capture_paths.csv"));
    write_capture_paths_csv(os, stats);
  }
  json j = to_json(stats);
  j["regime"] = to_string(rep.regime);
  return emit(cfg, "capture.json", j);
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NoResonanceError*>(&e) || dynamic_cast<const AssumptionViolated*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const UnsupportedOrderError*>(&e))
    return 3;
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance capture analysis and simulation"};
  app.require_subcommand(1);
  Flags flags;
  int (*handler)(const Flags&) = nullptr;

  auto add = [&](const char* name, const char* help, int (*fn)(const Flags&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Config file")->required();
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--paths", flags.paths, "Monte Carlo path count");
    sub->add_option("--order", flags.order, "Averaging order N");
    sub->callback([&handler, fn] { handler = fn; });
  };
  add("resonance", "Resonant amplitude and frequency table", cmd_resonance);
  add("averaged", "Averaged normal form coefficients", cmd_averaged);
  add("classify", "Phase locking or phase drift", cmd_classify);
  add("simulate", "Sample paths of the full or truncated system", cmd_simulate);
  add("capture", "Monte Carlo capture probability", cmd_capture);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return handler(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}
