#include "pulse/service/json_io.hpp"

#include "pulse/error.hpp"

#include <cstdio>

namespace pulse::service {

using nlohmann::json;

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

std::string format_minute(int minute_of_day) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minute_of_day / 60, minute_of_day % 60);
    return buf;
}

int parse_minute(const std::string& text) {
    int h = -1, m = -1;
    char tail = 0;
    if (text.size() != 5 || std::sscanf(text.c_str(), "%2d:%2d%c", &h, &m, &tail) != 2 || h < 0 || m < 0 ||
        m > 59 || h * 60 + m > 1440) {
        throw ValidationError("bad time of day '" + text + "', expected HH:MM");
    }
    return h * 60 + m;
}

json to_json(const survey::PatientProfile& p) {
    return json{{"id", p.id},
                {"display_name", p.display_name},
                {"timezone", p.timezone},
                {"language", p.language},
                {"allowed_call_window",
                 {{"start", format_minute(p.allowed_call_window.start_minute)},
                  {"end", format_minute(p.allowed_call_window.end_minute)}}},
                {"cohort_tags", p.cohort_tags}};
}

survey::PatientProfile patient_from_json(const json& j) {
    auto p = guarded("patient", [&] {
        survey::PatientProfile p;
        p.id = j.at("id").get<std::string>();
        p.display_name = j.value("display_name", p.id);
        p.timezone = j.value("timezone", p.timezone);
        p.language = j.value("language", p.language);
        if (j.contains("allowed_call_window")) {
            const auto& w = j.at("allowed_call_window");
            p.allowed_call_window.start_minute = parse_minute(w.at("start").get<std::string>());
            p.allowed_call_window.end_minute = parse_minute(w.at("end").get<std::string>());
        }
        if (j.contains("cohort_tags")) p.cohort_tags = j.at("cohort_tags").get<std::set<std::string>>();
        return p;
    });
    if (p.id.empty()) throw ValidationError("patient id must not be empty");
    survey::validate(p);
    return p;
}

json to_json(const survey::Turn& t) {
    json j{{"speaker", survey::to_string(t.speaker)}, {"text", t.text}, {"timestamp", format_utc(t.timestamp)}};
    j["step_id"] = t.step_id ? json(*t.step_id) : json(nullptr);
    j["parse_confidence"] = t.parse_confidence ? json(*t.parse_confidence) : json(nullptr);
    return j;
}

survey::Turn turn_from_json(const json& j) {
    return guarded("turn", [&] {
        survey::Turn t;
        t.speaker = survey::speaker_from_string(j.at("speaker").get<std::string>());
        t.text = j.at("text").get<std::string>();
        t.timestamp = parse_utc(j.at("timestamp").get<std::string>());
        if (j.contains("step_id") && !j["step_id"].is_null()) t.step_id = j["step_id"].get<std::string>();
        if (j.contains("parse_confidence") && !j["parse_confidence"].is_null()) {
            t.parse_confidence = j["parse_confidence"].get<double>();
        }
        return t;
    });
}

json to_json(const survey::ConversationTranscript& t) {
    json turns = json::array();
    for (const auto& turn : t.turns) turns.push_back(to_json(turn));
    return json{{"session_id", t.session_id},
                {"patient_id", t.patient_id},
                {"flow_id", t.flow_id},
                {"turns", turns},
                {"started_at", format_utc(t.started_at)},
                {"ended_at", format_utc(t.ended_at)},
                {"completion_status", survey::to_string(t.completion_status)}};
}

survey::ConversationTranscript transcript_from_json(const json& j) {
    auto t = guarded("transcript", [&] {
        survey::ConversationTranscript t;
        t.session_id = j.at("session_id").get<std::string>();
        t.patient_id = j.at("patient_id").get<std::string>();
        t.flow_id = j.at("flow_id").get<std::string>();
        for (const auto& turn : j.at("turns")) t.turns.push_back(turn_from_json(turn));
        t.started_at = parse_utc(j.at("started_at").get<std::string>());
        t.ended_at = parse_utc(j.at("ended_at").get<std::string>());
        t.completion_status = survey::completion_status_from_string(j.at("completion_status").get<std::string>());
        return t;
    });
    survey::validate(t);
    return t;
}

json to_json(const survey::ConsolidatedFlow& f) {
    json steps = json::array();
    for (const auto& s : f.steps) {
        json covers = json::array();
        const auto it = f.coverage_map.find(s.id);
        if (it != f.coverage_map.end()) {
            for (const auto& ref : it->second) covers.push_back(ref.instrument_id + "/" + ref.item_id);
        }
        steps.push_back({{"id", s.id},
                         {"category", survey::to_string(s.category)},
                         {"answer_kind", survey::to_string(s.answer_kind)},
                         {"required", s.required},
                         {"prompt", s.prompt_template},
                         {"dimensions", f.dimensions_of(s.id)},
                         {"covers", covers}});
    }
    return json{{"id", f.id}, {"source_instruments", f.source_instruments}, {"steps", steps}};
}

json to_json(const sched::CallPlan& plan) {
    json slots = json::array();
    for (const auto& s : plan.slots) {
        slots.push_back({{"patient_id", s.patient_id}, {"start", format_utc(s.start)}, {"period", s.period}});
    }
    return json{{"slots", slots},
                {"capacity_profile", plan.capacity_profile},
                {"inbound_reserve", plan.inbound_reserve},
                {"unplaced", plan.unplaced}};
}

sched::CallPlan plan_from_json(const json& j) {
    return guarded("plan", [&] {
        sched::CallPlan plan;
        for (const auto& s : j.at("slots")) {
            plan.slots.push_back({s.at("patient_id").get<std::string>(), parse_utc(s.at("start").get<std::string>()),
                                  s.at("period").get<int>()});
        }
        plan.capacity_profile = j.at("capacity_profile").get<std::vector<int>>();
        plan.inbound_reserve = j.at("inbound_reserve").get<std::vector<int>>();
        plan.unplaced = j.at("unplaced").get<std::vector<std::string>>();
        return plan;
    });
}

json to_json(const cache::SessionCache& c, const cache::TtftModel& model) {
    json calls = json::array();
    for (const auto& call : c.calls()) {
        const auto s = call.speedup();
        calls.push_back({{"call_index", call.call_index},
                         {"reused", call.stats.reused_tokens},
                         {"processed", call.stats.processed()},
                         {"recomputed", call.stats.recomputed_tokens},
                         {"baseline", call.stats.baseline_tokens},
                         {"speedup", s ? json(*s) : json(nullptr)}});
    }
    json out{{"session_id", c.session_id()}, {"cached_prefix_len", c.cached_prefix_len()}, {"calls", calls}};
    if (c.primed()) {
        const auto m = c.metrics(model);
        out["metrics"] = {{"redundancy_avoided", m.redundancy_avoided},
                          {"speedup_factor", m.speedup_factor},
                          {"ttft_model", m.ttft_model}};
    }
    return out;
}

}  // namespace pulse::service
