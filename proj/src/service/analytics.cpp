#include "pulse/service/analytics.hpp"

#include "pulse/error.hpp"
#include "pulse/service/json_io.hpp"

#include <fstream>
#include <set>

namespace pulse::service {

using nlohmann::json;

std::string_view to_string(Preference p) {
    switch (p) {
        case Preference::AI: return "AI";
        case Preference::Zoom: return "Zoom";
        case Preference::Both: return "Both";
        case Preference::NoPreference: return "NoPreference";
        case Preference::Human: return "Human";
        case Preference::Neither: return "Neither";
    }
    return "?";
}

Preference preference_from_string(std::string_view name) {
    for (auto p : kPreferences) {
        if (to_string(p) == name) return p;
    }
    throw ValidationError("unknown preference '" + std::string(name) + "'");
}

PreferenceDistribution preference_analytics(const std::vector<PreferenceResponse>& responses) {
    if (responses.empty()) throw ValidationError("preference analytics needs a non-empty cohort");
    std::map<Preference, double> tally;
    double total = 0.0;
    for (const auto& r : responses) {
        if (!(r.weight >= 0.0)) throw ValidationError("preference weight must be non-negative");
        tally[r.label] += r.weight;
        total += r.weight;
    }
    if (!(total > 0.0)) throw ValidationError("preference weights sum to zero");
    PreferenceDistribution d;
    d.respondents = static_cast<int>(responses.size());
    for (auto p : kPreferences) d.share[p] = tally[p] / total;
    d.acceptance = d.share[Preference::AI] + d.share[Preference::Both] + d.share[Preference::NoPreference];
    return d;
}

json to_json(const PreferenceDistribution& d) {
    json share = json::object();
    for (const auto& [p, v] : d.share) share[std::string(to_string(p))] = v;
    return json{{"share", share}, {"acceptance", d.acceptance}, {"respondents", d.respondents}};
}

Cohort load_cohort(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read cohort " + path.string());
    Cohort c;
    try {
        const auto j = json::parse(in);
        c.flow_id = j.at("flow_id").get<std::string>();
        for (const auto& p : j.at("patients")) {
            c.patients.push_back(patient_from_json(p));
            if (p.contains("preference")) {
                c.preferences.push_back({c.patients.back().id,
                                         preference_from_string(p.at("preference").get<std::string>()),
                                         p.value("preference_weight", 1.0)});
            }
        }
        for (const auto& call : j.at("calls")) {
            c.calls.push_back({call.at("patient_id").get<std::string>(),
                               call.at("script").get<std::vector<std::string>>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError("malformed cohort " + path.string() + ": " + e.what());
    }
    std::set<std::string> ids;
    for (const auto& p : c.patients) {
        if (!ids.insert(p.id).second) throw ValidationError("duplicate cohort patient " + p.id);
    }
    for (const auto& call : c.calls) {
        if (!ids.count(call.patient_id)) throw ValidationError("cohort call for unknown patient " + call.patient_id);
    }
    return c;
}

}  // namespace pulse::service
