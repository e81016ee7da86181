#pragma once

#include "pulse/cache/session_cache.hpp"
#include "pulse/dialogue/engine.hpp"
#include "pulse/extraction/extractor.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pulse::service {

struct ServiceConfig {
    std::filesystem::path data_dir;
    /// Event log file; in-memory when empty. Relative paths are taken from the
    /// working directory.
    std::optional<std::filesystem::path> event_log;
    /// Patients upserted at startup when missing from the store (relative to data_dir).
    std::string seed_patients = "fixtures/patients.json";
    /// Cohort file behind the preference analytics (relative to data_dir).
    std::string cohort = "fixtures/pilot_cohort.json";

    dialogue::DialogueConfig dialogue;
    extraction::RubricConfig rubric;
    double answered_confidence = 0.6;
    double stable_slope_per_day = 0.05;

    std::string default_flow = "mhbi+eq5d3l";
    std::vector<std::string> flows{"mhbi+eq5d3l", "mhbi", "eq5d3l", "pulse_pilot"};

    int capacity = 4;
    int queue_band = 2;
    int period_minutes = 60;
    int horizon = 24;

    std::int64_t cache_budget = 2'000'000;
    std::int64_t system_prompt_tokens = 400;
    cache::TtftModel ttft;

    /// Overrides for the econ simulator, same keys as `econ simulate --config`.
    nlohmann::json econ = nlohmann::json::object();

    std::string host = "127.0.0.1";
    int port = 8080;
    /// Static bearer token; empty disables the check.
    std::string api_token;
};

/// Data directory: explicit value, else $PULSE_DATA_DIR, else the directory the
/// build was configured with.
std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir = std::nullopt);

/// Reads a JSON config over the defaults. Unknown keys are rejected so typos
/// surface. Throws ValidationError.
ServiceConfig config_from_json(const nlohmann::json& j, ServiceConfig base = {});
ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base = {});

}  // namespace pulse::service
