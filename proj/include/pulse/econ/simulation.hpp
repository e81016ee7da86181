#pragma once

#include "pulse/econ/care_level.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pulse::econ {

struct Dynamics {
    double drift = -0.01;          ///< per-period change in severity
    double noise = 0.12;           ///< standard deviation of the Gaussian shock
    double ai_stabilization = 0.0; ///< subtracted each period spent under AI care
};

struct UnitCosts {
    std::map<CareLevel, double> per_period{{CareLevel::Physician, 500.0},
                                           {CareLevel::Nurse, 150.0},
                                           {CareLevel::Caregiver, 40.0},
                                           {CareLevel::AI, 5.0}};
};

struct SimulationConfig {
    int patients = 100;
    int periods = 52;
    std::uint64_t seed = 1;
    SeverityThresholds thresholds;
    Dynamics dynamics;
    /// Initial severity is drawn uniformly from [min, max].
    double initial_severity_min = 0.8;
    double initial_severity_max = 1.0;
    UnitCosts unit_costs;
};

/// Throws ValidationError on bad thresholds, negative noise or stabilization,
/// periods < 1, negative patients, or an initial range outside [0,1].
void validate(const SimulationConfig& cfg);

struct Sample {
    int t = 0;
    double S = 0.0;
    CareLevel care = CareLevel::AI;
};

struct Trajectory {
    std::string patient_id;
    std::vector<Sample> samples;
    /// Entries into Physician care after the first time the patient left it.
    int readmissions = 0;
};

struct CostLine {
    CareLevel care = CareLevel::AI;
    std::int64_t person_periods = 0;
    double unit_cost = 0.0;
    double total = 0.0;
};

struct CostReport {
    /// Physician first, AI last.
    std::vector<CostLine> lines;
    double total = 0.0;
};

struct SimulationResult {
    std::vector<Trajectory> trajectories;
    CostReport report;

    double mean_readmissions() const;
};

/// Severity walk per patient:
///   S_{t+1} = clamp(S_t + drift + e_t - ai_stabilization * [care_t = AI], 0, 1)
/// with e_t ~ N(0, noise). Each patient draws from its own generator seeded
/// from (seed, patient index), so patients are independent of each other and
/// two runs differing only in dynamics see the same shocks.
SimulationResult simulate_cohort(const SimulationConfig& cfg);

/// Walks one trajectory through a fixed shock sequence; the first sample is at
/// t = 0 with severity `initial`, one sample per shock follows.
Trajectory walk(const std::string& patient_id, double initial, const std::vector<double>& shocks,
                const SeverityThresholds& thresholds, const Dynamics& dynamics);

/// Counts readmissions in a sequence of care levels.
int count_readmissions(const std::vector<Sample>& samples);

CostReport cost_report(const std::vector<Trajectory>& trajectories, const UnitCosts& costs);

/// Three hand-made patients: two recover after treatment and stay under
/// lighter care, the second relapses once into Physician care.
SimulationResult three_patient_scenario(const SeverityThresholds& thresholds = {});

}  // namespace pulse::econ
