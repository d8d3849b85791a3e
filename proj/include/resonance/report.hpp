#pragma once

#include <json.hpp>
#include <ostream>
#include <string>

#include "resonance/averaging.hpp"
#include "resonance/config.hpp"
#include "resonance/dynamics.hpp"
#include "resonance/stochastic.hpp"

namespace resonance {

nlohmann::json to_json(const TrigPoly& poly);
nlohmann::json to_json(const AveragedSystem& avg);
nlohmann::json to_json(const RegimeReport& report);
nlohmann::json to_json(const CaptureStats& stats);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json resonance_json(const PerturbedSystem& sys);

void write_json(const std::string& path, const nlohmann::json& j);
void write_nu_table(std::ostream& os, const PerturbedSystem& sys, int points);
void write_lambda_table(std::ostream& os, const AveragedSystem& avg, int points = 361);

}  // namespace resonance
