#pragma once

#include <array>
#include <string_view>

namespace pulse::econ {

/// Declared from least to most intensive so that comparisons follow the care order.
enum class CareLevel { AI, Caregiver, Nurse, Physician };

inline constexpr std::array<CareLevel, 4> kCareLevelsDescending{
    CareLevel::Physician, CareLevel::Nurse, CareLevel::Caregiver, CareLevel::AI};

std::string_view to_string(CareLevel c);
CareLevel care_level_from_string(std::string_view name);

struct SeverityThresholds {
    double S_l = 0.2;
    double S_m = 0.5;
    double S_h = 0.8;
};

/// Requires 0 < S_l < S_m < S_h < 1. Throws ValidationError.
void validate(const SeverityThresholds& t);

/// S > S_h: Physician; S_m < S <= S_h: Nurse; S_l < S <= S_m: Caregiver;
/// S <= S_l: AI. Throws ValidationError for S outside [0,1] or bad thresholds.
CareLevel assign_care_level(double S, const SeverityThresholds& t);

}  // namespace pulse::econ
