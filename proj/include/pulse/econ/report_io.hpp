#pragma once

#include "pulse/econ/simulation.hpp"

#include "json.hpp"

#include <string>

namespace pulse::econ {

/// Aligned text table of a cost report.
std::string format_cost_report(const CostReport& report);
/// care_level,person_periods,unit_cost,total
std::string cost_report_csv(const CostReport& report);
/// patient_id,t,S,care
std::string trajectories_csv(const std::vector<Trajectory>& trajectories);

/// Reads the optional keys of an econ config document over the defaults:
/// thresholds {S_l,S_m,S_h}, dynamics {drift,noise,ai_stabilization},
/// initial_severity {min,max}, unit_costs {Physician,Nurse,Caregiver,AI},
/// patients, periods, seed.
SimulationConfig simulation_config_from_json(const nlohmann::json& j, SimulationConfig base = {});

nlohmann::json to_json(const CostReport& report);
nlohmann::json to_json(const SimulationResult& result, bool include_samples);

}  // namespace pulse::econ
