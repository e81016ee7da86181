#include "pulse/dialogue/engine.hpp"

#include "pulse/error.hpp"
#include "pulse/survey/escalation_terms.hpp"
#include "pulse/survey/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pulse::dialogue {

using survey::ConversationTranscript;
using survey::QuestionSpec;
using survey::Speaker;
using survey::Turn;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    for (size_t pos = text.find(from); pos != std::string::npos;
         pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

std::string join(std::string_view a, std::string_view b) {
    if (a.empty()) return std::string(b);
    if (b.empty()) return std::string(a);
    return std::string(a) + " " + std::string(b);
}

size_t agent_turn_count(const SessionState& s) {
    return static_cast<size_t>(std::count_if(s.turn_log.begin(), s.turn_log.end(), [](const Turn& t) {
        return t.speaker == Speaker::Agent;
    }));
}

QuestionSpec wrap_up_spec() {
    QuestionSpec spec;
    spec.id = "wrap_up";
    spec.category = survey::Category::Wrapup;
    spec.answer_kind = survey::AnswerKind::FreeText;
    spec.required = false;
    spec.dimension = "WrapUp";
    return spec;
}

bool is_emergency(std::string_view utterance) {
    const auto hit = survey::strongest_escalation(utterance);
    return hit && hit->level == survey::EscalationLevel::Emergency;
}

}  // namespace

std::string_view to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::Active: return "Active";
        case SessionStatus::WrapUp: return "WrapUp";
        case SessionStatus::Closed: return "Closed";
    }
    return "?";
}

std::string_view to_string(Intent i) {
    switch (i) {
        case Intent::Ask: return "Ask";
        case Intent::Clarify: return "Clarify";
        case Intent::Acknowledge: return "Acknowledge";
        case Intent::WrapUp: return "WrapUp";
    }
    return "?";
}

const QuestionSpec* SessionState::current() const {
    return current_step ? flow.find_step(*current_step) : nullptr;
}

const ParsedAnswer* SessionState::last_accepted() const {
    const auto it = answered.find(last_accepted_step_);
    return it == answered.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// ScriptedGenerator

ScriptedGenerator::ScriptedGenerator(std::vector<Record> records) : records_(std::move(records)) {
    for (const auto key : {"Ask", "Clarify", "Acknowledge", "WrapUp"}) {
        const bool present = std::any_of(records_.begin(), records_.end(),
                                         [&](const Record& r) { return r.key == key; });
        if (!present) {
            throw ValidationError(std::string("generator script has no '") + key + "' record");
        }
    }
}

ScriptedGenerator ScriptedGenerator::parse(std::string_view document) {
    std::vector<Record> records;
    std::istringstream in{std::string(document)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        const auto bar = text.find('|');
        if (bar == std::string::npos) throw ParseError("expected 'Intent | template'", line, "");
        Record r{trim(std::string_view(text).substr(0, bar)),
                 trim(std::string_view(text).substr(bar + 1))};
        const std::string intent = r.key.substr(0, r.key.find('.'));
        if (intent != "Ask" && intent != "Clarify" && intent != "Acknowledge" &&
            intent != "WrapUp") {
            throw ParseError("unknown intent '" + intent + "'", line, "intent");
        }
        records.push_back(std::move(r));
    }
    return ScriptedGenerator(std::move(records));
}

ScriptedGenerator ScriptedGenerator::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open generator script " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ScriptedGenerator::pick(std::string_view key, std::string_view fallback_key,
                                    const SessionState& context) const {
    std::vector<const Record*> matches;
    for (const auto& r : records_) {
        if (r.key == key) matches.push_back(&r);
    }
    if (matches.empty()) {
        for (const auto& r : records_) {
            if (r.key == fallback_key) matches.push_back(&r);
        }
    }
    if (matches.empty()) return {};
    return matches[agent_turn_count(context) % matches.size()]->text;
}

std::string ScriptedGenerator::generate(const SessionState& context, Intent intent) const {
    std::string text;
    switch (intent) {
        case Intent::Ask:
            text = pick(context.turn_log.empty() ? "Ask.opening" : "Ask", "Ask", context);
            break;
        case Intent::Clarify:
            text = pick("Clarify", "Clarify", context);
            break;
        case Intent::WrapUp:
            text = pick("WrapUp", "WrapUp", context);
            break;
        case Intent::Acknowledge:
            if (context.finished) {
                std::string key = "Acknowledge.farewell";
                if (context.escalation_requested) {
                    key = "Acknowledge.emergency";
                } else if (context.abandon_requested) {
                    key = "Acknowledge.abandon";
                } else if (context.callback_requested) {
                    key = "Acknowledge.callback";
                }
                text = pick(key, "Acknowledge.farewell", context);
            } else {
                const ParsedAnswer* last = context.last_accepted();
                std::string key = "Acknowledge";
                if (last && !last->volunteered) {
                    if (std::holds_alternative<Rating>(last->normalized)) key = "Acknowledge.rating";
                    if (std::holds_alternative<Count>(last->normalized)) key = "Acknowledge.count";
                }
                text = pick(key, "Acknowledge", context);
            }
            break;
    }

    const QuestionSpec* step = context.current();
    replace_all(text, "{prompt}", step ? render_prompt(*step, context.patient) : "");
    replace_all(text, "{name}", context.patient.display_name);
    if (const ParsedAnswer* last = context.last_accepted()) {
        replace_all(text, "{answer}", describe(last->normalized));
    }
    return text;
}

std::string render_prompt(const QuestionSpec& step, const survey::PatientProfile& patient) {
    std::string text = step.prompt_template;
    replace_all(text, "{name}", patient.display_name);
    return text;
}

// ---------------------------------------------------------------------------
// DialogueEngine

std::set<std::string> volunteered_dimensions(const std::vector<survey::LexiconHit>& hits,
                                             const std::set<std::string>& step_dimensions) {
    std::set<std::string> out;
    for (const auto& hit : hits) {
        if (hit.negated || hit.entry->dimensions.empty()) continue;
        const bool consumed = std::any_of(
            hit.entry->dimensions.begin(), hit.entry->dimensions.end(),
            [&](const std::string& d) { return step_dimensions.count(d) > 0; });
        if (consumed) continue;
        out.insert(hit.entry->dimensions.begin(), hit.entry->dimensions.end());
    }
    return out;
}

DialogueEngine::DialogueEngine(std::shared_ptr<const ResponseGenerator> generator,
                               DialogueConfig config, Clock clock, const survey::Lexicon& lexicon)
    : generator_(std::move(generator)), config_(config), clock_(std::move(clock)), lexicon_(lexicon) {
    if (!generator_) throw ValidationError("dialogue engine needs a response generator");
    if (config_.max_clarifications < 0 || config_.silence_budget < 1 ||
        config_.confidence_threshold < 0.0 || config_.confidence_threshold > 1.0) {
        throw ValidationError("invalid dialogue configuration");
    }
}

std::pair<SessionState, Turn> DialogueEngine::start_session(const survey::PatientProfile& patient,
                                                            const survey::ConsolidatedFlow& flow,
                                                            std::string session_id) const {
    if (flow.empty()) throw ValidationError("cannot start a session on an empty flow");
    SessionState s;
    s.session_id = std::move(session_id);
    s.patient = patient;
    s.flow = flow;
    s.started_at = clock_();
    Turn first = ask_next(s, "");
    return {std::move(s), std::move(first)};
}

Turn DialogueEngine::agent_turn(SessionState& s, std::string text,
                                std::optional<std::string> step_id) const {
    Turn t;
    t.speaker = Speaker::Agent;
    t.text = std::move(text);
    t.step_id = std::move(step_id);
    t.timestamp = clock_();
    s.turn_log.push_back(t);
    return t;
}

Turn DialogueEngine::ask_next(SessionState& s, std::string prefix) const {
    const auto next = std::find_if(s.flow.steps.begin(), s.flow.steps.end(), [&](const QuestionSpec& q) {
        return !s.asked.count(q.id) && !s.answered.count(q.id) && !s.skipped.count(q.id);
    });
    s.clarifications_for_current = 0;
    s.pending_clarification.reset();
    if (next == s.flow.steps.end()) {
        s.current_step.reset();
        s.status = SessionStatus::WrapUp;
        return agent_turn(s, join(prefix, generator_->generate(s, Intent::WrapUp)), std::nullopt);
    }
    s.current_step = next->id;
    s.asked.insert(next->id);
    return agent_turn(s, join(prefix, generator_->generate(s, Intent::Ask)), next->id);
}

void DialogueEngine::cover_volunteered(SessionState& s, const ConfusionResult& parsed,
                                       std::string_view utterance) const {
    const auto volunteered = volunteered_dimensions(parsed.hits, s.flow.dimensions_of(*s.current_step));
    if (volunteered.empty()) return;
    for (const auto& step : s.flow.steps) {
        if (s.asked.count(step.id) || s.answered.count(step.id) || s.skipped.count(step.id)) continue;
        const auto& dims = s.flow.dimensions_of(step.id);
        const bool covered = !dims.empty() && std::all_of(dims.begin(), dims.end(), [&](const std::string& d) {
            return volunteered.count(d) > 0;
        });
        if (!covered) continue;
        ParsedAnswer a;
        a.raw_text = std::string(utterance);
        a.normalized = FreeText{std::string(utterance)};
        a.confidence = parsed.confidence;
        a.lexicon_corrections = parsed.corrections;
        a.volunteered = true;
        s.answered[step.id] = std::move(a);
        s.asked.insert(step.id);
    }
}

Turn DialogueEngine::advance(SessionState& s, std::string_view utterance) const {
    if (s.status == SessionStatus::Closed) throw StateError("session " + s.session_id + " is closed");
    if (s.finished) {
        throw StateError("session " + s.session_id + " has finished; close it instead");
    }

    if (survey::requests_callback(utterance)) s.callback_requested = true;

    if (s.status == SessionStatus::WrapUp) {
        const auto parsed = detect_confusion(utterance, wrap_up_spec(), lexicon_);
        Turn reply{Speaker::Patient, std::string(utterance), std::nullopt, parsed.confidence, clock_()};
        s.turn_log.push_back(std::move(reply));
        s.finished = true;
        return agent_turn(s, generator_->generate(s, Intent::Acknowledge), std::nullopt);
    }

    const QuestionSpec* step = s.current();
    if (!step) throw StateError("session " + s.session_id + " has no open question");
    const std::string step_id = step->id;

    s.consecutive_silence = survey::is_blank(utterance) ? s.consecutive_silence + 1 : 0;
    const auto parsed = detect_confusion(utterance, *step, lexicon_);
    s.turn_log.push_back(Turn{Speaker::Patient, std::string(utterance), step_id, parsed.confidence, clock_()});

    if (is_emergency(utterance)) {
        s.escalation_requested = true;
        s.finished = true;
        return agent_turn(s, generator_->generate(s, Intent::Acknowledge), std::nullopt);
    }
    if (s.consecutive_silence >= config_.silence_budget) {
        s.abandon_requested = true;
        s.finished = true;
        return agent_turn(s, generator_->generate(s, Intent::Acknowledge), std::nullopt);
    }

    if (parsed.confidence >= config_.confidence_threshold) {
        ParsedAnswer a;
        a.raw_text = std::string(utterance);
        a.normalized = parsed.normalized.value_or(FreeText{std::string(utterance)});
        a.confidence = parsed.confidence;
        a.lexicon_corrections = parsed.corrections;
        s.answered[step_id] = std::move(a);
        s.last_accepted_step_ = step_id;
        cover_volunteered(s, parsed, utterance);
        return ask_next(s, generator_->generate(s, Intent::Acknowledge));
    }

    if (s.clarifications_for_current < config_.max_clarifications) {
        ++s.clarifications_for_current;
        s.pending_clarification = step_id;
        return agent_turn(s, generator_->generate(s, Intent::Clarify), step_id);
    }

    s.skipped.insert(step_id);
    return ask_next(s, "");
}

ConversationTranscript DialogueEngine::close_session(SessionState& s,
                                                     survey::CompletionStatus reason) const {
    if (s.status == SessionStatus::Closed) {
        throw StateError("session " + s.session_id + " is already closed");
    }
    ConversationTranscript t;
    t.session_id = s.session_id;
    t.patient_id = s.patient.id;
    t.flow_id = s.flow.id;
    t.turns = s.turn_log;
    t.started_at = s.started_at;
    t.ended_at = std::max(clock_(), s.turn_log.empty() ? s.started_at : s.turn_log.back().timestamp);
    t.completion_status = reason;
    survey::validate(t);
    s.status = SessionStatus::Closed;
    return t;
}

}  // namespace pulse::dialogue
