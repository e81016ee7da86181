#pragma once

#include "pulse/extraction/assessment.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pulse::extraction {

enum class TrendDirection { Improving, Stable, Worsening, Insufficient };

std::string_view to_string(TrendDirection d);

struct TrendSummary {
    std::string patient_id;
    std::string dimension;
    std::vector<std::pair<Timestamp, int>> series;
    TrendDirection direction = TrendDirection::Insufficient;
    /// Least-squares slope in score units per day.
    double slope = 0.0;
};

/// +1 when a higher score is worse (MHBI, EQ-5D levels), -1 when higher is
/// better (health scale). Throws ValidationError for unknown dimensions.
int polarity(std::string_view dimension);

inline constexpr double kStableSlopePerDay = 0.05;

/// Results lacking the dimension are skipped. Throws ValidationError when the
/// results belong to more than one patient.
TrendSummary trend_analysis(const std::vector<AssessmentResult>& results, std::string_view dimension,
                            double stable_slope = kStableSlopePerDay);

}  // namespace pulse::extraction
