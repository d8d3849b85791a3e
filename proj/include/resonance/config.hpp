#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "resonance/envelope.hpp"
#include "resonance/systems.hpp"

namespace resonance {

// Flat "key = value" text; '#' starts a comment, lists are written [a, b, ...].
std::map<std::string, std::string> parse_key_values(const std::string& text);

struct IntegrationBlock {
  double t0 = 0.0;
  double T = 0.0;
  double dt = 0.0;
  std::string mode = "sde";  // sde | truncated
  double r_init = 0.0;
  double psi_init = 0.0;
  int n_paths = 1;
  int record_every = 100;
};

struct MonteCarloBlock {
  int n_paths = 200;
  double delta1 = 0.2;
  double eps2 = 1.0;
  double l = 0.5;
  double t_star = 0.0;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool boundary = false;
  bool near_identity = false;
  double t_max = 1e4;
  double dt = 0.0;
  int monitor_every = 10;
  int order = 0;  // particular-solution order H; 0 -> dissipation order h
  bool horizon_auto = true;
  double horizon = 0.0;
};

struct OutputBlock {
  std::string dir = ".";
  bool paths = false;
  int nu_points = 201;
};

struct RunConfig {
  // Every recognised key with its resolved value, in canonical text form.
  std::map<std::string, std::string> resolved;

  std::string system_name;
  Example1Params example1;
  DuffingParams duffing;
  DecayEnvelope envelope;
  std::vector<double> phase_s;
  int order = 4;
  IntegrationBlock integration;
  MonteCarloBlock monte_carlo;
  OutputBlock output;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Applies a single key = value override and re-resolves.
RunConfig with_override(const RunConfig& cfg, const std::string& key, const std::string& value);
std::string to_text(const RunConfig& cfg);

std::unique_ptr<PerturbedSystem> make_system(const RunConfig& cfg);

}  // namespace resonance
