#include "pulse/extraction/assessment.hpp"

#include "pulse/error.hpp"

#include <algorithm>
#include <sstream>

namespace pulse::extraction {

std::string_view to_string(RecommendedAction a) {
    switch (a) {
        case RecommendedAction::None: return "None";
        case RecommendedAction::Callback: return "Callback";
        case RecommendedAction::ProviderFollowUp: return "ProviderFollowUp";
        case RecommendedAction::Emergency: return "Emergency";
    }
    return "?";
}

RecommendedAction recommended_action_from_string(std::string_view name) {
    for (auto a : {RecommendedAction::None, RecommendedAction::Callback,
                   RecommendedAction::ProviderFollowUp, RecommendedAction::Emergency}) {
        if (to_string(a) == name) return a;
    }
    throw ValidationError("unknown recommended action '" + std::string(name) + "'");
}

std::string_view to_string(AlertSeverity s) {
    switch (s) {
        case AlertSeverity::Info: return "Info";
        case AlertSeverity::Callback: return "Callback";
        case AlertSeverity::Emergency: return "Emergency";
    }
    return "?";
}

AlertSeverity alert_severity_from_string(std::string_view name) {
    for (auto s : {AlertSeverity::Info, AlertSeverity::Callback, AlertSeverity::Emergency}) {
        if (to_string(s) == name) return s;
    }
    throw ValidationError("unknown alert severity '" + std::string(name) + "'");
}

bool is_mhbi_dimension(std::string_view d) {
    return std::find(kMhbiDimensions.begin(), kMhbiDimensions.end(), d) != kMhbiDimensions.end();
}

bool is_eq5d_dimension(std::string_view d) {
    return std::find(kEq5dDimensions.begin(), kEq5dDimensions.end(), d) != kEq5dDimensions.end();
}

std::optional<int> AssessmentResult::score(std::string_view dimension) const {
    if (dimension == kHealthScale) return health_scale;
    const auto& table = is_mhbi_dimension(dimension) ? mhbi : eq5d;
    const auto it = table.find(std::string(dimension));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

void validate(const AssessmentResult& r) {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) throw ValidationError("assessment out of range: " + what);
    };
    for (const auto& [dim, v] : r.mhbi) {
        check(is_mhbi_dimension(dim), "unknown MHBI dimension " + dim);
        if (dim == "AbdominalPain") {
            check(v >= 0 && v <= 3, dim);
        } else if (dim == "GeneralWellbeing") {
            check(v >= 0 && v <= 4, dim);
        } else {
            check(v >= 0, dim);
        }
    }
    for (const auto& [dim, v] : r.eq5d) {
        check(is_eq5d_dimension(dim), "unknown EQ-5D dimension " + dim);
        check(v >= 1 && v <= 3, dim);
    }
    if (r.health_scale) check(*r.health_scale >= 0 && *r.health_scale <= 100, "HealthScale");
    for (const auto& [dim, _] : r.notes) {
        check(r.score(dim).has_value(), "note for unscored dimension " + dim);
    }
}

std::string format_tables(const AssessmentResult& r) {
    std::ostringstream out;
    auto row = [&](std::string_view dim, const std::string& score) {
        out << dim << " | " << score << " | ";
        if (auto it = r.notes.find(std::string(dim)); it != r.notes.end()) out << it->second;
        out << '\n';
    };
    auto value = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };

    out << "Session " << r.session_id << '\n';
    out << "[MHBI]\n";
    for (auto d : kMhbiDimensions) row(d, value(r.score(d)));
    out << "[EQ-5D-3L]\n";
    for (auto d : kEq5dDimensions) row(d, value(r.score(d)));
    row(kHealthScale, r.health_scale ? std::to_string(*r.health_scale) + "/100" : "-");
    out << "Recommended action: " << to_string(r.recommended_action) << '\n';
    return out.str();
}

}  // namespace pulse::extraction
