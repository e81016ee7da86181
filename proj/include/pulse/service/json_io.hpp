#pragma once

#include "pulse/cache/session_cache.hpp"
#include "pulse/sched/planner.hpp"
#include "pulse/survey/domain.hpp"

#include "json.hpp"

namespace pulse::service {

// Wire formats shared by the event log and the HTTP API. Timestamps are
// ISO-8601 UTC strings; call windows are "HH:MM" local times.
// Every *_from_json throws ValidationError on a malformed document.

nlohmann::json to_json(const survey::PatientProfile& p);
survey::PatientProfile patient_from_json(const nlohmann::json& j);

nlohmann::json to_json(const survey::Turn& t);
survey::Turn turn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const survey::ConversationTranscript& t);
survey::ConversationTranscript transcript_from_json(const nlohmann::json& j);

nlohmann::json to_json(const survey::ConsolidatedFlow& f);

nlohmann::json to_json(const sched::CallPlan& plan);
sched::CallPlan plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const cache::SessionCache& c, const cache::TtftModel& model);

std::string format_minute(int minute_of_day);
/// "HH:MM", 00:00..24:00.
int parse_minute(const std::string& text);

}  // namespace pulse::service
