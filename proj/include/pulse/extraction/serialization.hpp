#pragma once

#include "pulse/extraction/assessment.hpp"
#include "pulse/extraction/completeness.hpp"
#include "pulse/extraction/trend.hpp"

#include "json.hpp"

#include <filesystem>
#include <mutex>
#include <vector>

namespace pulse::extraction {

nlohmann::json to_json(const AssessmentResult& r);
AssessmentResult assessment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Alert& a);
Alert alert_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CompletenessReport& r);
nlohmann::json to_json(const TrendSummary& t);

/// Append-only alert feed, one JSON record per line.
class AlertFeed {
public:
    explicit AlertFeed(std::filesystem::path path);

    /// Appends and flushes. Throws StorageError when the file cannot be written.
    void append(const Alert& alert);
    std::vector<Alert> read_all() const;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
};

}  // namespace pulse::extraction
