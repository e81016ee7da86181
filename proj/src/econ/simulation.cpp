#include "pulse/econ/simulation.hpp"

#include "pulse/econ/economics.hpp"
#include "pulse/error.hpp"

#include <algorithm>
#include <random>

namespace pulse::econ {

void validate(const SimulationConfig& cfg) {
    validate(cfg.thresholds);
    if (cfg.periods < 1) throw ValidationError("simulation needs at least one period");
    if (cfg.patients < 0) throw ValidationError("patient count must be non-negative");
    if (cfg.dynamics.noise < 0.0) throw ValidationError("noise scale must be non-negative");
    if (cfg.dynamics.ai_stabilization < 0.0) throw ValidationError("ai_stabilization must be non-negative");
    if (!(0.0 <= cfg.initial_severity_min && cfg.initial_severity_min <= cfg.initial_severity_max &&
          cfg.initial_severity_max <= 1.0)) {
        throw ValidationError("initial severity range must lie in [0,1]");
    }
}

double SimulationResult::mean_readmissions() const {
    if (trajectories.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : trajectories) sum += t.readmissions;
    return sum / static_cast<double>(trajectories.size());
}

int count_readmissions(const std::vector<Sample>& samples) {
    int readmissions = 0;
    bool was_admitted = false;
    bool discharged = false;
    for (const auto& s : samples) {
        const bool in = s.care == CareLevel::Physician;
        if (in && !was_admitted && discharged) ++readmissions;
        if (!in && was_admitted) discharged = true;
        was_admitted = in;
    }
    return readmissions;
}

Trajectory walk(const std::string& patient_id, double initial, const std::vector<double>& shocks,
                const SeverityThresholds& thresholds, const Dynamics& dynamics) {
    Trajectory tr;
    tr.patient_id = patient_id;
    double S = std::clamp(initial, 0.0, 1.0);
    tr.samples.reserve(shocks.size() + 1);
    tr.samples.push_back({0, S, assign_care_level(S, thresholds)});
    for (size_t i = 0; i < shocks.size(); ++i) {
        const bool ai = tr.samples.back().care == CareLevel::AI;
        S = std::clamp(S + dynamics.drift + shocks[i] - (ai ? dynamics.ai_stabilization : 0.0), 0.0, 1.0);
        tr.samples.push_back({static_cast<int>(i + 1), S, assign_care_level(S, thresholds)});
    }
    tr.readmissions = count_readmissions(tr.samples);
    return tr;
}

CostReport cost_report(const std::vector<Trajectory>& trajectories, const UnitCosts& costs) {
    std::map<CareLevel, std::int64_t> periods;
    for (const auto& t : trajectories) {
        for (const auto& s : t.samples) ++periods[s.care];
    }
    CostReport report;
    for (auto level : kCareLevelsDescending) {
        CostLine line;
        line.care = level;
        line.person_periods = periods[level];
        const auto it = costs.per_period.find(level);
        line.unit_cost = it == costs.per_period.end() ? 0.0 : it->second;
        line.total = round_currency(static_cast<double>(line.person_periods) * line.unit_cost);
        report.total += line.total;
        report.lines.push_back(line);
    }
    report.total = round_currency(report.total);
    return report;
}

SimulationResult simulate_cohort(const SimulationConfig& cfg) {
    validate(cfg);
    SimulationResult result;
    result.trajectories.reserve(static_cast<size_t>(cfg.patients));
    std::vector<double> shocks(static_cast<size_t>(cfg.periods - 1));
    for (int p = 0; p < cfg.patients; ++p) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(p)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> initial(cfg.initial_severity_min, cfg.initial_severity_max);
        std::normal_distribution<double> shock(0.0, 1.0);
        const double S0 = initial(rng);
        for (auto& e : shocks) e = cfg.dynamics.noise * shock(rng);
        result.trajectories.push_back(
            walk("patient-" + std::to_string(p + 1), S0, shocks, cfg.thresholds, cfg.dynamics));
    }
    result.report = cost_report(result.trajectories, cfg.unit_costs);
    return result;
}

SimulationResult three_patient_scenario(const SeverityThresholds& thresholds) {
    Dynamics d;
    d.drift = -0.04;
    d.noise = 0.0;
    d.ai_stabilization = 0.02;

    SimulationResult out;
    // Steady recovery to AI-supported self management.
    out.trajectories.push_back(walk("patient-1", 0.92, std::vector<double>(24, 0.0), thresholds, d));
    // Recovers, relapses around t = 8..10 and is readmitted, then recovers again.
    std::vector<double> relapse(24, 0.0);
    relapse[7] = 0.12;
    relapse[8] = 0.2;
    relapse[9] = 0.2;
    relapse[10] = 0.1;
    out.trajectories.push_back(walk("patient-2", 0.95, relapse, thresholds, d));
    // Slower recovery that settles under caregiver support.
    std::vector<double> plateau(24, 0.0);
    for (size_t i = 10; i < plateau.size(); ++i) plateau[i] = 0.04;
    out.trajectories.push_back(walk("patient-3", 0.88, plateau, thresholds, d));
    out.report = cost_report(out.trajectories, UnitCosts{});
    return out;
}

}  // namespace pulse::econ
