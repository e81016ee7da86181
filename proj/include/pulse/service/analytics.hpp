#pragma once

#include "pulse/survey/domain.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::service {

enum class Preference { AI, Zoom, Both, NoPreference, Human, Neither };

inline constexpr std::array<Preference, 6> kPreferences{Preference::AI,           Preference::Zoom,
                                                        Preference::Both,         Preference::NoPreference,
                                                        Preference::Human,        Preference::Neither};

std::string_view to_string(Preference p);
Preference preference_from_string(std::string_view name);

struct PreferenceResponse {
    std::string patient_id;
    Preference label = Preference::NoPreference;
    double weight = 1.0;
};

struct PreferenceDistribution {
    std::map<Preference, double> share;
    /// AI + Both + NoPreference: the patient did not refuse the AI modality.
    double acceptance = 0.0;
    int respondents = 0;
};

/// Weighted tally normalized to 1. Throws ValidationError on an empty cohort,
/// a negative weight or zero total weight.
PreferenceDistribution preference_analytics(const std::vector<PreferenceResponse>& responses);

nlohmann::json to_json(const PreferenceDistribution& d);

struct ScriptedCall {
    std::string patient_id;
    std::vector<std::string> script;
};

/// Synthetic pilot cohort: patient profiles, one preference answer each, and
/// scripted check-in calls run through a common flow.
struct Cohort {
    std::string flow_id;
    std::vector<survey::PatientProfile> patients;
    std::vector<PreferenceResponse> preferences;
    std::vector<ScriptedCall> calls;
};

/// Throws ValidationError on a malformed file, a call for a patient not in the
/// cohort, or a preference for an unknown patient.
Cohort load_cohort(const std::filesystem::path& path);

}  // namespace pulse::service
