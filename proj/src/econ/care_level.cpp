#include "pulse/econ/care_level.hpp"

#include "pulse/error.hpp"

#include <string>

namespace pulse::econ {

std::string_view to_string(CareLevel c) {
    switch (c) {
        case CareLevel::AI: return "AI";
        case CareLevel::Caregiver: return "Caregiver";
        case CareLevel::Nurse: return "Nurse";
        case CareLevel::Physician: return "Physician";
    }
    return "?";
}

CareLevel care_level_from_string(std::string_view name) {
    for (auto c : kCareLevelsDescending) {
        if (to_string(c) == name) return c;
    }
    throw ValidationError("unknown care level '" + std::string(name) + "'");
}

void validate(const SeverityThresholds& t) {
    if (!(0.0 < t.S_l && t.S_l < t.S_m && t.S_m < t.S_h && t.S_h < 1.0)) {
        throw ValidationError("thresholds must satisfy 0 < S_l < S_m < S_h < 1");
    }
}

CareLevel assign_care_level(double S, const SeverityThresholds& t) {
    validate(t);
    if (!(S >= 0.0 && S <= 1.0)) throw ValidationError("severity must lie in [0,1]");
    if (S > t.S_h) return CareLevel::Physician;
    if (S > t.S_m) return CareLevel::Nurse;
    if (S > t.S_l) return CareLevel::Caregiver;
    return CareLevel::AI;
}

}  // namespace pulse::econ
