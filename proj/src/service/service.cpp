#include "pulse/service/service.hpp"

#include "pulse/dialogue/engine.hpp"
#include "pulse/error.hpp"
#include "pulse/extraction/escalation.hpp"
#include "pulse/extraction/extractor.hpp"
#include "pulse/extraction/serialization.hpp"
#include "pulse/service/json_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace pulse::service {

using nlohmann::json;

json to_json(const CallOutcome& o, const cache::TtftModel& model) {
    json alerts = json::array();
    for (const auto& a : o.alerts) {
        auto j = extraction::to_json(a.alert);
        j["alert_id"] = a.alert_id;
        alerts.push_back(j);
    }
    return json{{"session_id", o.transcript.session_id},
                {"transcript", to_json(o.transcript)},
                {"assessment", extraction::to_json(o.assessment)},
                {"alerts", alerts},
                {"cache", to_json(o.cache, model)},
                {"storage_failed", o.storage_failed}};
}

PlanRequest plan_request_from_json(const json& j, const ServiceConfig& defaults) {
    PlanRequest r;
    r.period_minutes = defaults.period_minutes;
    r.horizon = defaults.horizon;
    r.capacity = defaults.capacity;
    try {
        r.start = parse_utc(j.at("start").get<std::string>());
        r.period_minutes = j.value("period_minutes", r.period_minutes);
        r.horizon = j.value("horizon", r.horizon);
        r.capacity = j.value("capacity", r.capacity);
        if (j.contains("forecast")) {
            const auto& f = j.at("forecast");
            r.forecast.expected = f.value("expected", std::vector<double>{});
            r.forecast.spike_multiplier = f.value("spike_multiplier", 1.0);
        }
        r.patient_ids = j.value("patient_ids", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed plan request: ") + e.what());
    }
    sched::validate(r.forecast);
    if (r.period_minutes <= 0 || r.horizon < 1 || r.capacity <= 0) {
        throw ValidationError("plan request needs positive period, horizon and capacity");
    }
    return r;
}

json to_json(const PlanRequest& r) {
    return json{{"start", format_utc(r.start)},
                {"period_minutes", r.period_minutes},
                {"horizon", r.horizon},
                {"capacity", r.capacity},
                {"forecast", {{"expected", r.forecast.expected}, {"spike_multiplier", r.forecast.spike_multiplier}}},
                {"patient_ids", r.patient_ids}};
}

Service::Service(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), catalog_(config_.data_dir), store_(config_.event_log) {
    dialogue::DialogueEngine probe(catalog_.generator(), config_.dialogue, clock_);  // validates the dialogue config
    const auto seed = config_.data_dir / config_.seed_patients;
    if (!config_.seed_patients.empty() && std::filesystem::exists(seed)) {
        std::ifstream in(seed);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ValidationError("malformed seed patients " + seed.string() + ": " + e.what());
        }
        const auto snap = snapshot();
        std::vector<std::pair<EventKind, json>> batch;
        for (const auto& p : j.at("patients")) {
            const auto profile = patient_from_json(p);
            if (!snap->patients.count(profile.id)) batch.emplace_back(EventKind::PatientUpserted, to_json(profile));
        }
        if (!batch.empty()) store_.commit(batch, clock_());
    }
}

survey::PatientProfile Service::upsert_patient(const survey::PatientProfile& patient) {
    if (patient.id.empty()) throw ValidationError("patient id must not be empty");
    survey::validate(patient);
    std::lock_guard lock(write_mu_);
    store_.commit({{EventKind::PatientUpserted, to_json(patient)}}, clock_());
    return patient;
}

std::string Service::next_session_id(const State& s) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s-%06zu", s.sessions.size() + 1);
    return buf;
}

CallOutcome Service::run_call(const std::string& patient_id, const std::optional<std::string>& flow_id,
                              const std::vector<std::string>& script) {
    std::lock_guard lock(write_mu_);
    const auto snap = snapshot();
    const auto patient = snap->patients.find(patient_id);
    if (patient == snap->patients.end()) throw NotFound("unknown patient " + patient_id);
    const auto flow = catalog_.flow(flow_id.value_or(config_.default_flow));
    const auto session_id = next_session_id(*snap);

    dialogue::DialogueEngine engine(catalog_.generator(), config_.dialogue, clock_);
    auto [state, first] = engine.start_session(patient->second.profile, flow, session_id);
    store_.commit({{EventKind::CallStarted,
                    {{"session_id", session_id},
                     {"patient_id", patient_id},
                     {"flow_id", flow.id},
                     {"started_at", format_utc(state.started_at)},
                     {"system_prompt_tokens", config_.system_prompt_tokens}}}},
                  state.started_at);

    CallOutcome out;
    size_t stored = 0;
    auto persist_new_turns = [&] {
        std::vector<std::pair<EventKind, json>> batch;
        for (size_t i = stored; i < state.turn_log.size(); ++i) {
            batch.emplace_back(EventKind::TurnRecorded, json{{"session_id", session_id}, {"turn", to_json(state.turn_log[i])}});
        }
        if (batch.empty()) return;
        store_.commit(batch, state.turn_log.back().timestamp);
        stored = state.turn_log.size();
    };

    try {
        persist_new_turns();
        for (const auto& utterance : script) {
            if (state.finished) break;
            engine.advance(state, utterance);
            persist_new_turns();
        }
    } catch (const StorageError&) {
        out.storage_failed = true;
    }

    const auto status = out.storage_failed             ? survey::CompletionStatus::Abandoned
                        : state.escalation_requested   ? survey::CompletionStatus::Escalated
                        : state.status == dialogue::SessionStatus::WrapUp ? survey::CompletionStatus::Completed
                                                                          : survey::CompletionStatus::Abandoned;
    auto transcript = engine.close_session(state, status);
    if (out.storage_failed) {
        transcript.turns.resize(stored);
        if (!transcript.turns.empty()) transcript.ended_at = std::max(transcript.started_at, transcript.turns.back().timestamp);
    }

    extraction::RuleExtractor extractor(flow, config_.rubric);
    auto assessment = extractor.extract(transcript);
    const auto alerts = extraction::detect_escalation(transcript);

    std::vector<std::pair<EventKind, json>> batch;
    batch.emplace_back(EventKind::SessionClosed, json{{"session_id", session_id}, {"transcript", to_json(transcript)}});
    for (size_t i = 0; i < alerts.size(); ++i) {
        batch.emplace_back(EventKind::AlertRaised, json{{"alert_id", session_id + "-a" + std::to_string(i + 1)},
                                                        {"patient_id", patient_id},
                                                        {"alert", extraction::to_json(alerts[i])}});
    }
    batch.emplace_back(EventKind::AssessmentStored, extraction::to_json(assessment));
    // Transcript, alerts and assessment become visible together or not at all.
    store_.commit(batch, transcript.ended_at);

    const auto after = snapshot();
    for (const auto& a : after->alerts) {
        if (a.alert.session_id == session_id) out.alerts.push_back(a);
    }
    out.transcript = std::move(transcript);
    out.assessment = std::move(assessment);
    out.cache = after->caches.at(session_id);
    return out;
}

PlanRecord Service::plan_calls(const PlanRequest& request) {
    std::lock_guard lock(write_mu_);
    const auto snap = snapshot();
    std::vector<survey::PatientProfile> patients;
    if (request.patient_ids.empty()) {
        std::vector<const PatientRecord*> all;
        for (const auto& [id, r] : snap->patients) all.push_back(&r);
        std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
        for (auto* r : all) patients.push_back(r->profile);
    } else {
        for (const auto& id : request.patient_ids) {
            const auto it = snap->patients.find(id);
            if (it == snap->patients.end()) throw NotFound("unknown patient " + id);
            patients.push_back(it->second.profile);
        }
    }
    sched::PlanningWindow window{request.start, std::chrono::minutes{request.period_minutes}, request.horizon};
    const auto plan = sched::plan_outbound(patients, window, request.capacity, request.forecast);
    sched::check_plan(plan, patients, window);
    const auto plan_id = "plan-" + std::to_string(snap->plans.size() + 1);
    store_.commit({{EventKind::CallPlanned, {{"plan_id", plan_id}, {"request", to_json(request)}, {"plan", to_json(plan)}}}},
                  clock_());
    return snapshot()->plans.back();
}

AlertRecord Service::acknowledge_alert(const std::string& alert_id, const std::string& by) {
    std::lock_guard lock(write_mu_);
    const auto* a = snapshot()->find_alert(alert_id);
    if (!a) throw NotFound("unknown alert " + alert_id);
    if (a->acknowledged) throw StateError("alert " + alert_id + " is already acknowledged");
    store_.commit({{EventKind::AlertAcknowledged, {{"alert_id", alert_id}, {"by", by}}}}, clock_());
    return *snapshot()->find_alert(alert_id);
}

ImportSummary Service::import_cohort(const Cohort& cohort) {
    ImportSummary summary;
    catalog_.flow(cohort.flow_id);
    for (const auto& p : cohort.patients) {
        upsert_patient(p);
        ++summary.patients;
    }
    for (const auto& call : cohort.calls) {
        const auto outcome = run_call(call.patient_id, cohort.flow_id, call.script);
        summary.sessions.push_back(outcome.transcript.session_id);
        ++summary.calls;
    }
    return summary;
}

std::vector<extraction::TrendSummary> Service::trends(const std::string& patient_id,
                                                      const std::optional<std::string>& dimension) const {
    const auto snap = snapshot();
    if (!snap->patients.count(patient_id)) throw NotFound("unknown patient " + patient_id);
    std::vector<extraction::AssessmentResult> results;
    for (const auto& [id, r] : snap->assessments) {
        if (r.result.patient_id == patient_id) results.push_back(r.result);
    }
    std::vector<std::string> dims;
    if (dimension) {
        extraction::polarity(*dimension);  // rejects unknown names
        dims.push_back(*dimension);
    } else {
        for (auto d : extraction::kMhbiDimensions) dims.emplace_back(d);
        for (auto d : extraction::kEq5dDimensions) dims.emplace_back(d);
        dims.emplace_back(extraction::kHealthScale);
    }
    std::vector<extraction::TrendSummary> out;
    for (const auto& d : dims) {
        auto t = extraction::trend_analysis(results, d, config_.stable_slope_per_day);
        if (t.patient_id.empty()) t.patient_id = patient_id;
        if (dimension || !t.series.empty()) out.push_back(std::move(t));
    }
    return out;
}

extraction::CompletenessReport Service::completeness(const std::optional<std::string>& flow_id) const {
    const auto snap = snapshot();
    std::vector<survey::ConversationTranscript> transcripts;
    std::map<std::string, survey::ConsolidatedFlow> flows;
    std::vector<const SessionRecord*> closed;
    for (const auto& [id, r] : snap->sessions) {
        if (r.transcript && (!flow_id || r.flow_id == *flow_id)) closed.push_back(&r);
    }
    std::sort(closed.begin(), closed.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
    for (auto* r : closed) {
        transcripts.push_back(*r->transcript);
        if (!flows.count(r->flow_id)) flows.emplace(r->flow_id, catalog_.flow(r->flow_id));
    }
    if (transcripts.empty()) throw NotFound("no closed sessions to report on");
    return extraction::completeness_report(transcripts, flows, config_.answered_confidence);
}

PreferenceDistribution Service::preferences() const {
    const auto path = config_.data_dir / config_.cohort;
    if (!std::filesystem::exists(path)) throw NotFound("no cohort file at " + path.string());
    return preference_analytics(load_cohort(path).preferences);
}

}  // namespace pulse::service
