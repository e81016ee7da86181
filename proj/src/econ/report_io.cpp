#include "pulse/econ/report_io.hpp"

#include "pulse/error.hpp"

#include <cstdio>
#include <sstream>

namespace pulse::econ {

using nlohmann::json;

namespace {

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string format_cost_report(const CostReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %15s %12s %15s\n", "care_level", "person_periods",
                  "unit_cost", "total");
    out << line;
    for (const auto& l : report.lines) {
        std::snprintf(line, sizeof line, "%-10s %15lld %12s %15s\n", std::string(to_string(l.care)).c_str(),
                      static_cast<long long>(l.person_periods), money(l.unit_cost).c_str(),
                      money(l.total).c_str());
        out << line;
    }
    std::snprintf(line, sizeof line, "%-10s %15s %12s %15s\n", "TOTAL", "", "", money(report.total).c_str());
    out << line;
    return out.str();
}

std::string cost_report_csv(const CostReport& report) {
    std::ostringstream out;
    out << "care_level,person_periods,unit_cost,total\n";
    for (const auto& l : report.lines) {
        out << to_string(l.care) << ',' << l.person_periods << ',' << money(l.unit_cost) << ','
            << money(l.total) << '\n';
    }
    return out.str();
}

std::string trajectories_csv(const std::vector<Trajectory>& trajectories) {
    std::ostringstream out;
    out << "patient_id,t,S,care\n";
    char buf[32];
    for (const auto& tr : trajectories) {
        for (const auto& s : tr.samples) {
            std::snprintf(buf, sizeof buf, "%.6f", s.S);
            out << tr.patient_id << ',' << s.t << ',' << buf << ',' << to_string(s.care) << '\n';
        }
    }
    return out.str();
}

SimulationConfig simulation_config_from_json(const json& j, SimulationConfig cfg) {
    try {
        if (j.contains("patients")) cfg.patients = j.at("patients").get<int>();
        if (j.contains("periods")) cfg.periods = j.at("periods").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            cfg.thresholds.S_l = t.value("S_l", cfg.thresholds.S_l);
            cfg.thresholds.S_m = t.value("S_m", cfg.thresholds.S_m);
            cfg.thresholds.S_h = t.value("S_h", cfg.thresholds.S_h);
        }
        if (j.contains("dynamics")) {
            const auto& d = j.at("dynamics");
            cfg.dynamics.drift = d.value("drift", cfg.dynamics.drift);
            cfg.dynamics.noise = d.value("noise", cfg.dynamics.noise);
            cfg.dynamics.ai_stabilization = d.value("ai_stabilization", cfg.dynamics.ai_stabilization);
        }
        if (j.contains("initial_severity")) {
            const auto& s = j.at("initial_severity");
            cfg.initial_severity_min = s.value("min", cfg.initial_severity_min);
            cfg.initial_severity_max = s.value("max", cfg.initial_severity_max);
        }
        if (j.contains("unit_costs")) {
            for (const auto& [name, v] : j.at("unit_costs").items()) {
                cfg.unit_costs.per_period[care_level_from_string(name)] = v.get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad econ config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

json to_json(const CostReport& report) {
    json lines = json::array();
    for (const auto& l : report.lines) {
        lines.push_back({{"care_level", to_string(l.care)},
                         {"person_periods", l.person_periods},
                         {"unit_cost", l.unit_cost},
                         {"total", l.total}});
    }
    return json{{"lines", lines}, {"total", report.total}};
}

json to_json(const SimulationResult& result, bool include_samples) {
    json trajectories = json::array();
    for (const auto& tr : result.trajectories) {
        json t{{"patient_id", tr.patient_id}, {"readmissions", tr.readmissions}};
        if (include_samples) {
            json samples = json::array();
            for (const auto& s : tr.samples) {
                samples.push_back({{"t", s.t}, {"S", s.S}, {"care", to_string(s.care)}});
            }
            t["samples"] = samples;
        }
        trajectories.push_back(t);
    }
    return json{{"trajectories", trajectories},
                {"mean_readmissions", result.mean_readmissions()},
                {"cost_report", to_json(result.report)}};
}

}  // namespace pulse::econ
