#pragma once

#include "pulse/extraction/completeness.hpp"
#include "pulse/extraction/trend.hpp"
#include "pulse/sched/planner.hpp"
#include "pulse/service/analytics.hpp"
#include "pulse/service/catalog.hpp"
#include "pulse/service/config.hpp"
#include "pulse/service/state.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pulse::service {

struct CallOutcome {
    survey::ConversationTranscript transcript;
    extraction::AssessmentResult assessment;
    std::vector<AlertRecord> alerts;
    cache::SessionCache cache{""};
    /// A write failed mid-call; the session was closed Abandoned with the turns
    /// stored so far.
    bool storage_failed = false;
};

nlohmann::json to_json(const CallOutcome& o, const cache::TtftModel& model);

struct PlanRequest {
    Timestamp start{};
    int period_minutes = 60;
    int horizon = 24;
    int capacity = 4;
    sched::InboundForecast forecast;
    /// Empty means every stored patient.
    std::vector<std::string> patient_ids;
};

PlanRequest plan_request_from_json(const nlohmann::json& j, const ServiceConfig& defaults);
nlohmann::json to_json(const PlanRequest& r);

struct ImportSummary {
    int patients = 0;
    int calls = 0;
    std::vector<std::string> sessions;
};

/// The pipeline behind the CLI and the HTTP API. Calls and other writes are
/// serialized; reads work on immutable snapshots and may run in parallel.
class Service {
public:
    explicit Service(ServiceConfig config, Clock clock = system_clock());

    const ServiceConfig& config() const { return config_; }
    const Catalog& catalog() const { return catalog_; }
    Store& store() { return store_; }
    std::shared_ptr<const State> snapshot() const { return store_.snapshot(); }

    survey::PatientProfile upsert_patient(const survey::PatientProfile& patient);

    /// Runs a scripted call end to end: dialogue, both extractors, escalation,
    /// persistence and the per-turn cache ledger. Throws NotFound for an
    /// unknown patient or flow.
    CallOutcome run_call(const std::string& patient_id, const std::optional<std::string>& flow_id,
                         const std::vector<std::string>& script);

    PlanRecord plan_calls(const PlanRequest& request);

    /// Throws NotFound for an unknown alert and StateError when already acknowledged.
    AlertRecord acknowledge_alert(const std::string& alert_id, const std::string& by);

    /// Upserts the cohort's patients and runs its scripted calls.
    ImportSummary import_cohort(const Cohort& cohort);

    /// Every scorable dimension with at least one stored score, or just `dimension`.
    std::vector<extraction::TrendSummary> trends(const std::string& patient_id,
                                                 const std::optional<std::string>& dimension) const;
    /// Over closed sessions, optionally restricted to one flow.
    extraction::CompletenessReport completeness(const std::optional<std::string>& flow_id) const;
    /// From the configured cohort file. Throws NotFound when it is missing.
    PreferenceDistribution preferences() const;

private:
    std::string next_session_id(const State& s) const;

    ServiceConfig config_;
    Clock clock_;
    Catalog catalog_;
    Store store_;
    std::mutex write_mu_;
};

}  // namespace pulse::service
