#pragma once

#include "pulse/cache/session_cache.hpp"
#include "pulse/extraction/assessment.hpp"
#include "pulse/sched/planner.hpp"
#include "pulse/service/event_log.hpp"
#include "pulse/survey/domain.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pulse::service {

struct PatientRecord {
    std::uint64_t seq = 0;  ///< first upsert
    survey::PatientProfile profile;
};

struct SessionRecord {
    std::uint64_t seq = 0;  ///< CallStarted
    std::string session_id;
    std::string patient_id;
    std::string flow_id;
    Timestamp started_at{};
    std::vector<survey::Turn> turns;
    /// Set once the session is closed.
    std::optional<survey::ConversationTranscript> transcript;
};

struct AssessmentRecord {
    std::uint64_t seq = 0;
    extraction::AssessmentResult result;
};

struct AlertRecord {
    std::uint64_t seq = 0;
    std::string alert_id;
    std::string patient_id;
    extraction::Alert alert;
    bool acknowledged = false;
    std::string acknowledged_by;
    std::optional<Timestamp> acknowledged_at;
};

struct PlanRecord {
    std::uint64_t seq = 0;
    std::string plan_id;
    nlohmann::json request;
    sched::CallPlan plan;
};

/// Everything derivable from the event log.
struct State {
    std::uint64_t last_seq = 0;
    std::map<std::string, PatientRecord> patients;
    std::map<std::string, SessionRecord> sessions;
    std::map<std::string, AssessmentRecord> assessments;
    std::vector<AlertRecord> alerts;
    std::vector<PlanRecord> plans;
    /// Token ledger per session, one extend per recorded turn.
    std::map<std::string, cache::SessionCache> caches;

    const AlertRecord* find_alert(const std::string& alert_id) const;
};

/// Rough token count of a text: ceil(chars / 4).
std::int64_t approx_tokens(std::string_view text);

/// Applies one event. Throws StateError for an event that does not fit the
/// state (unknown session, double close, ...), leaving `state` unspecified.
void apply(State& state, const EventRecord& event);

State replay(const std::vector<EventRecord>& events);

/// Canonical serialization: object keys sorted, fixed array orders.
nlohmann::json state_json(const State& state);
/// Lower-case hex SHA-256 of state_json(state).dump().
std::string state_hash(const State& state);

/// Event-sourced store: one writer, any number of readers holding immutable
/// snapshots.
class Store {
public:
    /// Opens (and replays) a log file, or an in-memory log when `path` is empty.
    explicit Store(std::optional<std::filesystem::path> path = std::nullopt);

    /// Applies the batch to a copy of the state, persists it, then publishes the
    /// new snapshot. Nothing changes when either step throws.
    std::vector<EventRecord> commit(const std::vector<std::pair<EventKind, nlohmann::json>>& batch, Timestamp at);

    std::shared_ptr<const State> snapshot() const;
    EventLog& log() { return log_; }

private:
    EventLog log_;
    std::mutex writer_;
    mutable std::mutex snap_mu_;
    std::shared_ptr<const State> state_;
};

}  // namespace pulse::service
