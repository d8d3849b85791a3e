#include "resonance/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "resonance/errors.hpp"

namespace resonance {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double as_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return x;
}

template <typename Int>
Int as_int(const std::string& key, const std::string& v) {
  Int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  return x;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> as_list(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError("key '" + key + "': expected a list [a, b, ...]");
  }
  std::vector<double> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      if (!out.empty() || !ss.eof()) throw ConfigError("key '" + key + "': empty list entry");
      continue;
    }
    out.push_back(as_double(key, item));
  }
  return out;
}

std::map<std::string, std::string> defaults_for(const std::string& name) {
  std::map<std::string, std::string> d;
  d["system.name"] = name;
  if (name == "example1") {
    const Example1Params e;
    d["system.params.theta"] = fmt(e.theta);
    d["system.params.Q0"] = fmt(e.Q0);
    d["system.params.Q1"] = fmt(e.Q1);
    d["system.params.Z0"] = fmt(e.Z0);
    d["system.params.Z1"] = fmt(e.Z1);
    d["system.params.B0"] = fmt(e.B0);
    d["system.params.B1"] = fmt(e.B1);
    d["system.n"] = "2";
    d["system.p"] = std::to_string(e.p);
    d["system.kappa"] = std::to_string(e.kappa);
    d["system.varkappa"] = std::to_string(e.varkappa);
    d["system.epsilon"] = fmt(e.epsilon);
    d["envelope.kind"] = "power_log";
    d["envelope.q"] = "2";
    d["phase.s0"] = fmt(e.s0);
  } else if (name == "duffing") {
    const DuffingParams p;
    d["system.params.theta"] = fmt(p.theta);
    d["system.params.P0"] = fmt(p.P0);
    d["system.params.P1"] = fmt(p.P1);
    d["system.params.Q0"] = fmt(p.Q0);
    d["system.params.Q1"] = fmt(p.Q1);
    d["system.params.B0"] = fmt(p.B0);
    d["system.params.B1"] = fmt(p.B1);
    d["system.n"] = std::to_string(p.n);
    d["system.p"] = std::to_string(p.p);
    d["system.kappa"] = std::to_string(p.kappa);
    d["system.varkappa"] = std::to_string(p.varkappa);
    d["system.epsilon"] = fmt(p.epsilon);
    d["envelope.kind"] = "power";
    d["envelope.q"] = "4";
    d["phase.s0"] = fmt(p.s0);
  } else {
    throw ConfigError("system.name must be example1 or duffing, got '" + name + "'");
  }
  d["envelope.tau0"] = "auto";
  d["phase.s"] = "[]";
  d["averaging.order"] = "4";
  d["integration.t0"] = "auto";
  d["integration.T"] = "auto";
  d["integration.dt"] = "auto";
  d["integration.mode"] = "sde";
  d["integration.r_init"] = "auto";
  d["integration.psi_init"] = "0";
  d["integration.n_paths"] = "1";
  d["integration.record_every"] = "100";
  d["monte_carlo.n_paths"] = "200";
  d["monte_carlo.delta1"] = "0.2";
  d["monte_carlo.eps2"] = "1";
  d["monte_carlo.l"] = "0.5";
  d["monte_carlo.t_star"] = "auto";
  d["monte_carlo.seed"] = "1";
  d["monte_carlo.workers"] = "0";
  d["monte_carlo.boundary"] = "false";
  d["monte_carlo.near_identity"] = "false";
  d["monte_carlo.t_max"] = "10000";
  d["monte_carlo.dt"] = "auto";
  d["monte_carlo.monitor_every"] = "10";
  d["monte_carlo.order"] = "auto";
  d["monte_carlo.horizon"] = "auto";
  d["output.dir"] = ".";
  d["output.paths"] = "false";
  d["output.nu_points"] = "201";
  return d;
}

RunConfig resolve(const std::map<std::string, std::string>& raw) {
  const auto name_it = raw.find("system.name");
  const std::string name = name_it == raw.end() ? "example1" : name_it->second;
  std::map<std::string, std::string> v = defaults_for(name);
  for (const auto& [key, value] : raw) {
    if (!v.count(key)) throw ConfigError("unknown key '" + key + "' for system '" + name + "'");
    v[key] = value;
  }

  RunConfig cfg;
  cfg.resolved = v;
  cfg.system_name = name;
  auto num = [&](const std::string& k) { return as_double(k, v.at(k)); };
  auto integer = [&](const std::string& k) { return as_int<int>(k, v.at(k)); };
  auto flag = [&](const std::string& k) { return as_bool(k, v.at(k)); };
  auto is_auto = [&](const std::string& k) { return v.at(k) == "auto"; };

  const int n = integer("system.n");
  const int p = integer("system.p");
  const int kappa = integer("system.kappa");
  const int varkappa = integer("system.varkappa");
  if (n < 1 || p < 1) throw ConfigError("system.n and system.p must be positive");
  if (kappa < 1 || varkappa < 1) throw ConfigError("system.kappa and system.varkappa must be positive");
  const double s0 = num("phase.s0");
  const double eps = num("system.epsilon");
  if (eps < 0.0) throw ConfigError("system.epsilon must be nonnegative");

  const std::string kind = v.at("envelope.kind");
  const double q = num("envelope.q");
  const double tau0 = is_auto("envelope.tau0") ? 0.0 : num("envelope.tau0");
  try {
    if (kind == "power") {
      cfg.envelope = DecayEnvelope::power(q, tau0 > 0.0 ? tau0 : 1.0);
    } else if (kind == "power_log") {
      cfg.envelope = DecayEnvelope::power_log(q, tau0);
    } else {
      throw ConfigError("envelope.kind must be power or power_log, got '" + kind + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  cfg.phase_s = as_list("phase.s", v.at("phase.s"));

  if (name == "example1") {
    if (n != 2) throw ConfigError("example1 requires system.n = 2");
    Example1Params& e = cfg.example1;
    e.theta = num("system.params.theta");
    e.Q0 = num("system.params.Q0");
    e.Q1 = num("system.params.Q1");
    e.Z0 = num("system.params.Z0");
    e.Z1 = num("system.params.Z1");
    e.B0 = num("system.params.B0");
    e.B1 = num("system.params.B1");
    e.s0 = s0;
    e.p = p;
    e.kappa = kappa;
    e.varkappa = varkappa;
    e.epsilon = eps;
  } else {
    DuffingParams& d = cfg.duffing;
    d.theta = num("system.params.theta");
    d.P0 = num("system.params.P0");
    d.P1 = num("system.params.P1");
    d.Q0 = num("system.params.Q0");
    d.Q1 = num("system.params.Q1");
    d.B0 = num("system.params.B0");
    d.B1 = num("system.params.B1");
    d.s0 = s0;
    d.n = n;
    d.p = p;
    d.kappa = kappa;
    d.varkappa = varkappa;
    d.epsilon = eps;
  }

  cfg.order = integer("averaging.order");

  IntegrationBlock& ib = cfg.integration;
  ib.t0 = is_auto("integration.t0") ? cfg.envelope.tau0 : num("integration.t0");
  if (ib.t0 < cfg.envelope.tau0) throw ConfigError("integration.t0 must not precede envelope.tau0");
  ib.T = is_auto("integration.T") ? ib.t0 + 200.0 : num("integration.T");
  if (!(ib.T > ib.t0)) throw ConfigError("integration.T must exceed integration.t0");
  ib.dt = is_auto("integration.dt") ? 2e-3 * std::numbers::pi / s0 : num("integration.dt");
  if (!(ib.dt > 0.0)) throw ConfigError("integration.dt must be positive");
  ib.mode = v.at("integration.mode");
  if (ib.mode != "sde" && ib.mode != "truncated") throw ConfigError("integration.mode must be sde or truncated");
  ib.r_init = is_auto("integration.r_init") ? std::numeric_limits<double>::quiet_NaN() : num("integration.r_init");
  ib.psi_init = num("integration.psi_init");
  ib.n_paths = integer("integration.n_paths");
  ib.record_every = integer("integration.record_every");
  if (ib.n_paths < 1 || ib.record_every < 1) throw ConfigError("integration counts must be positive");

  MonteCarloBlock& mc = cfg.monte_carlo;
  mc.n_paths = integer("monte_carlo.n_paths");
  if (mc.n_paths < 1) throw ConfigError("monte_carlo.n_paths must be positive");
  mc.delta1 = num("monte_carlo.delta1");
  mc.eps2 = num("monte_carlo.eps2");
  if (mc.delta1 < 0.0 || !(mc.eps2 > 0.0)) throw ConfigError("monte_carlo thresholds out of range");
  mc.l = num("monte_carlo.l");
  if (!(mc.l > 0.0 && mc.l < 1.0)) throw ConfigError("monte_carlo.l must lie in (0, 1)");
  mc.t_star = is_auto("monte_carlo.t_star") ? cfg.envelope.tau0 : num("monte_carlo.t_star");
  if (mc.t_star < cfg.envelope.tau0) throw ConfigError("monte_carlo.t_star must not precede envelope.tau0");
  mc.seed = as_int<std::uint64_t>("monte_carlo.seed", v.at("monte_carlo.seed"));
  mc.workers = as_int<unsigned>("monte_carlo.workers", v.at("monte_carlo.workers"));
  mc.boundary = flag("monte_carlo.boundary");
  mc.near_identity = flag("monte_carlo.near_identity");
  mc.t_max = num("monte_carlo.t_max");
  if (!(mc.t_max > 0.0)) throw ConfigError("monte_carlo.t_max must be positive");
  mc.dt = is_auto("monte_carlo.dt") ? 0.0 : num("monte_carlo.dt");
  if (mc.dt < 0.0) throw ConfigError("monte_carlo.dt must be positive");
  mc.monitor_every = integer("monte_carlo.monitor_every");
  mc.order = is_auto("monte_carlo.order") ? 0 : integer("monte_carlo.order");
  if (mc.monitor_every < 1 || mc.order < 0) throw ConfigError("monte_carlo counts must be positive");
  mc.horizon_auto = is_auto("monte_carlo.horizon");
  mc.horizon = mc.horizon_auto ? 0.0 : num("monte_carlo.horizon");

  cfg.output.dir = v.at("output.dir");
  cfg.output.paths = flag("output.paths");
  cfg.output.nu_points = integer("output.nu_points");
  if (cfg.output.nu_points < 2) throw ConfigError("output.nu_points must be at least 2");
  return cfg;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (out.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

RunConfig parse_config(const std::string& text) { return resolve(parse_key_values(text)); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig with_override(const RunConfig& cfg, const std::string& key, const std::string& value) {
  auto raw = cfg.resolved;
  if (!raw.count(key)) throw ConfigError("unknown key '" + key + "'");
  raw[key] = value;
  return resolve(raw);
}

std::string to_text(const RunConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : cfg.resolved) s += k + " = " + v + "\n";
  return s;
}

std::unique_ptr<PerturbedSystem> make_system(const RunConfig& cfg) {
  std::unique_ptr<PerturbedSystem> sys;
  if (cfg.system_name == "example1") {
    sys = std::make_unique<Example1System>(cfg.example1, cfg.envelope);
  } else {
    sys = std::make_unique<DuffingSystem>(cfg.duffing, cfg.envelope);
  }
  sys->set_phase_corrections(cfg.phase_s);
  return sys;
}

}  // namespace resonance
