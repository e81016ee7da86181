#include "pulse/service/state.hpp"

#include "pulse/error.hpp"
#include "pulse/extraction/serialization.hpp"
#include "pulse/service/json_io.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace pulse::service {

using nlohmann::json;

const AlertRecord* State::find_alert(const std::string& alert_id) const {
    for (const auto& a : alerts) {
        if (a.alert_id == alert_id) return &a;
    }
    return nullptr;
}

std::int64_t approx_tokens(std::string_view text) { return static_cast<std::int64_t>((text.size() + 3) / 4); }

namespace {

SessionRecord& session(State& s, const std::string& id) {
    const auto it = s.sessions.find(id);
    if (it == s.sessions.end()) throw StateError("event for unknown session " + id);
    return it->second;
}

void apply_payload(State& s, const EventRecord& e) {
    const auto& p = e.payload;
    switch (e.kind) {
        case EventKind::PatientUpserted: {
            auto profile = patient_from_json(p);
            auto [it, inserted] = s.patients.try_emplace(profile.id, PatientRecord{e.seq, profile});
            if (!inserted) it->second.profile = std::move(profile);
            break;
        }
        case EventKind::CallPlanned: {
            PlanRecord r{e.seq, p.at("plan_id").get<std::string>(), p.at("request"), plan_from_json(p.at("plan"))};
            s.plans.push_back(std::move(r));
            break;
        }
        case EventKind::CallStarted: {
            SessionRecord r;
            r.seq = e.seq;
            r.session_id = p.at("session_id").get<std::string>();
            r.patient_id = p.at("patient_id").get<std::string>();
            r.flow_id = p.at("flow_id").get<std::string>();
            r.started_at = parse_utc(p.at("started_at").get<std::string>());
            if (!s.patients.count(r.patient_id)) throw StateError("call for unknown patient " + r.patient_id);
            if (s.sessions.count(r.session_id)) throw StateError("session " + r.session_id + " already started");
            cache::SessionCache c(r.session_id);
            c.prime(p.at("system_prompt_tokens").get<std::int64_t>());
            s.caches.emplace(r.session_id, std::move(c));
            s.sessions.emplace(r.session_id, std::move(r));
            break;
        }
        case EventKind::TurnRecorded: {
            auto& r = session(s, p.at("session_id").get<std::string>());
            if (r.transcript) throw StateError("turn recorded after session " + r.session_id + " closed");
            r.turns.push_back(turn_from_json(p.at("turn")));
            s.caches.at(r.session_id).extend(approx_tokens(r.turns.back().text));
            break;
        }
        case EventKind::SessionClosed: {
            auto t = transcript_from_json(p.at("transcript"));
            auto& r = session(s, t.session_id);
            if (r.transcript) throw StateError("session " + r.session_id + " closed twice");
            if (t.turns != r.turns) throw StateError("closing transcript disagrees with recorded turns");
            r.transcript = std::move(t);
            break;
        }
        case EventKind::AssessmentStored: {
            auto result = extraction::assessment_from_json(p);
            if (!s.sessions.count(result.session_id)) {
                throw StateError("assessment for unknown session " + result.session_id);
            }
            const auto id = result.session_id;
            s.assessments[id] = {e.seq, std::move(result)};
            break;
        }
        case EventKind::AlertRaised: {
            AlertRecord a;
            a.seq = e.seq;
            a.alert_id = p.at("alert_id").get<std::string>();
            a.patient_id = p.at("patient_id").get<std::string>();
            a.alert = extraction::alert_from_json(p.at("alert"));
            if (s.find_alert(a.alert_id)) throw StateError("duplicate alert id " + a.alert_id);
            s.alerts.push_back(std::move(a));
            break;
        }
        case EventKind::AlertAcknowledged: {
            const auto id = p.at("alert_id").get<std::string>();
            AlertRecord* a = nullptr;
            for (auto& r : s.alerts) {
                if (r.alert_id == id) a = &r;
            }
            if (!a) throw StateError("acknowledging unknown alert " + id);
            if (a->acknowledged) throw StateError("alert " + id + " already acknowledged");
            a->acknowledged = true;
            a->acknowledged_by = p.value("by", "");
            a->acknowledged_at = e.at;
            break;
        }
    }
}

}  // namespace

void apply(State& s, const EventRecord& e) {
    if (e.seq <= s.last_seq) throw StateError("event seq " + std::to_string(e.seq) + " is not after the state");
    try {
        apply_payload(s, e);
    } catch (const json::exception& ex) {
        throw StateError(std::string(to_string(e.kind)) + " payload malformed: " + ex.what());
    } catch (const ValidationError& ex) {
        throw StateError(std::string(to_string(e.kind)) + " payload invalid: " + ex.what());
    }
    s.last_seq = e.seq;
}

State replay(const std::vector<EventRecord>& events) {
    State s;
    for (const auto& e : events) apply(s, e);
    return s;
}

json state_json(const State& s) {
    json patients = json::object();
    for (const auto& [id, r] : s.patients) patients[id] = {{"seq", r.seq}, {"profile", to_json(r.profile)}};
    json sessions = json::object();
    for (const auto& [id, r] : s.sessions) {
        json turns = json::array();
        for (const auto& t : r.turns) turns.push_back(to_json(t));
        sessions[id] = {{"seq", r.seq},
                        {"patient_id", r.patient_id},
                        {"flow_id", r.flow_id},
                        {"started_at", format_utc(r.started_at)},
                        {"turns", turns},
                        {"transcript", r.transcript ? to_json(*r.transcript) : json(nullptr)}};
    }
    json assessments = json::object();
    for (const auto& [id, r] : s.assessments) {
        assessments[id] = {{"seq", r.seq}, {"result", extraction::to_json(r.result)}};
    }
    json alerts = json::array();
    for (const auto& a : s.alerts) {
        alerts.push_back({{"seq", a.seq},
                          {"alert_id", a.alert_id},
                          {"patient_id", a.patient_id},
                          {"alert", extraction::to_json(a.alert)},
                          {"acknowledged", a.acknowledged},
                          {"acknowledged_by", a.acknowledged_by},
                          {"acknowledged_at", a.acknowledged_at ? json(format_utc(*a.acknowledged_at)) : json(nullptr)}});
    }
    json plans = json::array();
    for (const auto& p : s.plans) {
        plans.push_back({{"seq", p.seq}, {"plan_id", p.plan_id}, {"request", p.request}, {"plan", to_json(p.plan)}});
    }
    json caches = json::object();
    for (const auto& [id, c] : s.caches) caches[id] = to_json(c, cache::TtftModel{});
    return json{{"last_seq", s.last_seq}, {"patients", patients},   {"sessions", sessions},
                {"assessments", assessments}, {"alerts", alerts}, {"plans", plans},
                {"caches", caches}};
}

std::string state_hash(const State& s) {
    const auto text = state_json(s).dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

Store::Store(std::optional<std::filesystem::path> path) : log_(path) {
    auto s = std::make_shared<State>();
    if (path && std::filesystem::exists(*path)) *s = replay(EventLog::read(*path));
    state_ = std::move(s);
}

std::vector<EventRecord> Store::commit(const std::vector<std::pair<EventKind, json>>& batch, Timestamp at) {
    std::lock_guard writer(writer_);
    auto next = std::make_shared<State>(*snapshot());
    std::uint64_t seq = log_.last_seq();
    for (const auto& [kind, payload] : batch) apply(*next, EventRecord{++seq, kind, payload, at});
    auto records = log_.append(batch, at);
    std::lock_guard lock(snap_mu_);
    state_ = std::move(next);
    return records;
}

std::shared_ptr<const State> Store::snapshot() const {
    std::lock_guard lock(snap_mu_);
    return state_;
}

}  // namespace pulse::service
