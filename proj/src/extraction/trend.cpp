#include "pulse/extraction/trend.hpp"

#include "pulse/error.hpp"

#include <cmath>

namespace pulse::extraction {

std::string_view to_string(TrendDirection d) {
    switch (d) {
        case TrendDirection::Improving: return "Improving";
        case TrendDirection::Stable: return "Stable";
        case TrendDirection::Worsening: return "Worsening";
        case TrendDirection::Insufficient: return "Insufficient";
    }
    return "?";
}

int polarity(std::string_view dimension) {
    if (dimension == kHealthScale) return -1;
    if (is_mhbi_dimension(dimension) || is_eq5d_dimension(dimension)) return 1;
    throw ValidationError("no trend polarity for dimension '" + std::string(dimension) + "'");
}

TrendSummary trend_analysis(const std::vector<AssessmentResult>& results, std::string_view dimension,
                            double stable_slope) {
    const int sign = polarity(dimension);
    TrendSummary out;
    out.dimension = std::string(dimension);
    for (const auto& r : results) {
        if (out.patient_id.empty()) {
            out.patient_id = r.patient_id;
        } else if (r.patient_id != out.patient_id) {
            throw ValidationError("trend over assessments of different patients");
        }
        if (auto v = r.score(dimension)) out.series.emplace_back(r.assessed_at, *v);
    }
    if (out.series.size() < 2) {
        out.direction = TrendDirection::Insufficient;
        return out;
    }

    const auto t0 = out.series.front().first;
    double sx = 0, sy = 0;
    for (const auto& [t, y] : out.series) {
        sx += std::chrono::duration<double>(t - t0).count() / 86400.0;
        sy += y;
    }
    const double n = static_cast<double>(out.series.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [t, y] : out.series) {
        const double x = std::chrono::duration<double>(t - t0).count() / 86400.0 - mx;
        sxx += x * x;
        sxy += x * (y - my);
    }
    out.slope = sxx > 0 ? sxy / sxx : 0.0;

    if (std::abs(out.slope) < stable_slope) {
        out.direction = TrendDirection::Stable;
    } else {
        out.direction = out.slope * sign < 0 ? TrendDirection::Improving : TrendDirection::Worsening;
    }
    return out;
}

}  // namespace pulse::extraction
