#include "pulse/extraction/serialization.hpp"

#include "pulse/error.hpp"

#include <fstream>

namespace pulse::extraction {

using nlohmann::json;

json to_json(const AssessmentResult& r) {
    json j;
    j["session_id"] = r.session_id;
    j["patient_id"] = r.patient_id;
    j["assessed_at"] = format_utc(r.assessed_at);
    j["mhbi"] = r.mhbi;
    j["eq5d"] = r.eq5d;
    j["health_scale"] = r.health_scale ? json(*r.health_scale) : json(nullptr);
    j["notes"] = r.notes;
    j["recommended_action"] = to_string(r.recommended_action);
    return j;
}

AssessmentResult assessment_from_json(const json& j) {
    AssessmentResult r;
    r.session_id = j.at("session_id").get<std::string>();
    r.patient_id = j.at("patient_id").get<std::string>();
    r.assessed_at = parse_utc(j.at("assessed_at").get<std::string>());
    r.mhbi = j.at("mhbi").get<std::map<std::string, int>>();
    r.eq5d = j.at("eq5d").get<std::map<std::string, int>>();
    if (!j.at("health_scale").is_null()) r.health_scale = j.at("health_scale").get<int>();
    r.notes = j.at("notes").get<std::map<std::string, std::string>>();
    r.recommended_action = recommended_action_from_string(j.at("recommended_action").get<std::string>());
    validate(r);
    return r;
}

json to_json(const Alert& a) {
    return json{{"session_id", a.session_id},
                {"severity", to_string(a.severity)},
                {"trigger_text", a.trigger_text},
                {"created_at", format_utc(a.created_at)}};
}

Alert alert_from_json(const json& j) {
    Alert a;
    a.session_id = j.at("session_id").get<std::string>();
    a.severity = alert_severity_from_string(j.at("severity").get<std::string>());
    a.trigger_text = j.at("trigger_text").get<std::string>();
    a.created_at = parse_utc(j.at("created_at").get<std::string>());
    return a;
}

json to_json(const CompletenessReport& r) {
    json out = json::array();
    for (const auto& c : r.categories) {
        out.push_back({{"category", survey::to_string(c.category)},
                       {"asked", c.asked},
                       {"answered", c.answered},
                       {"rate", c.rate}});
    }
    return out;
}

json to_json(const TrendSummary& t) {
    json series = json::array();
    for (const auto& [at, v] : t.series) series.push_back({{"at", format_utc(at)}, {"score", v}});
    return json{{"patient_id", t.patient_id},
                {"dimension", t.dimension},
                {"series", series},
                {"direction", to_string(t.direction)},
                {"slope", t.slope}};
}

AlertFeed::AlertFeed(std::filesystem::path path) : path_(std::move(path)) {}

void AlertFeed::append(const Alert& alert) {
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw StorageError("cannot open alert feed " + path_.string());
    out << to_json(alert).dump() << '\n';
    out.flush();
    if (!out) throw StorageError("cannot write alert feed " + path_.string());
}

std::vector<Alert> AlertFeed::read_all() const {
    std::lock_guard lock(mu_);
    std::vector<Alert> out;
    std::ifstream in(path_);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(alert_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(e.what(), n, "");
        }
    }
    return out;
}

}  // namespace pulse::extraction
