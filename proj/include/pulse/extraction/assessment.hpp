#pragma once

#include "pulse/survey/escalation_terms.hpp"
#include "pulse/time.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::extraction {

enum class RecommendedAction { None, Callback, ProviderFollowUp, Emergency };

std::string_view to_string(RecommendedAction a);
RecommendedAction recommended_action_from_string(std::string_view name);

inline constexpr std::array<std::string_view, 4> kMhbiDimensions{
    "LiquidStools", "AbdominalPain", "GeneralWellbeing", "AdditionalManifestations"};
inline constexpr std::array<std::string_view, 5> kEq5dDimensions{
    "Mobility", "SelfCare", "UsualActivities", "PainDiscomfort", "AnxietyDepression"};
inline constexpr std::string_view kHealthScale = "HealthScale";

bool is_mhbi_dimension(std::string_view d);
bool is_eq5d_dimension(std::string_view d);

struct AssessmentResult {
    std::string session_id;
    std::string patient_id;
    /// When the underlying call ended; the x axis of trend analysis.
    Timestamp assessed_at{};
    /// Absent keys were not answered. They are never defaulted to 0.
    std::map<std::string, int> mhbi;
    std::map<std::string, int> eq5d;
    std::optional<int> health_scale;
    std::map<std::string, std::string> notes;
    RecommendedAction recommended_action = RecommendedAction::None;

    bool operator==(const AssessmentResult&) const = default;

    /// Score of any MHBI/EQ-5D dimension or "HealthScale".
    std::optional<int> score(std::string_view dimension) const;
};

/// Range checks: LiquidStools >= 0, AbdominalPain 0..3, GeneralWellbeing 0..4,
/// AdditionalManifestations >= 0, EQ-5D levels 1..3, health scale 0..100, and
/// notes only for dimensions that carry a score. Throws ValidationError.
void validate(const AssessmentResult& result);

using AlertSeverity = survey::EscalationLevel;

std::string_view to_string(AlertSeverity s);
AlertSeverity alert_severity_from_string(std::string_view name);

struct Alert {
    std::string session_id;
    AlertSeverity severity = AlertSeverity::Info;
    /// The patient utterance that raised the alert, verbatim.
    std::string trigger_text;
    Timestamp created_at{};

    bool operator==(const Alert&) const = default;
};

/// Two-table text rendering (dimension | score | note), MHBI first, then
/// EQ-5D-3L with the health scale, then the recommended action.
std::string format_tables(const AssessmentResult& result);

}  // namespace pulse::extraction
