#pragma once

#include "pulse/dialogue/answer.hpp"
#include "pulse/survey/domain.hpp"
#include "pulse/time.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pulse::dialogue {

enum class SessionStatus { Active, WrapUp, Closed };
enum class Intent { Ask, Clarify, Acknowledge, WrapUp };

std::string_view to_string(SessionStatus s);
std::string_view to_string(Intent i);

struct DialogueConfig {
    /// Answers below this confidence get a clarification turn.
    double confidence_threshold = 0.6;
    /// Clarifications per step before the step is skipped as unanswered.
    int max_clarifications = 2;
    /// Consecutive blank utterances after which the call is treated as abandoned.
    int silence_budget = 3;
};

/// Survey conversation state. Single writer: one advance at a time per session.
struct SessionState {
    std::string session_id;
    survey::PatientProfile patient;
    survey::ConsolidatedFlow flow;

    /// Steps put to the patient, or covered by a volunteered answer.
    std::set<std::string> asked;
    std::map<std::string, ParsedAnswer> answered;
    /// Steps given up on after the clarification budget ran out.
    std::set<std::string> skipped;
    std::optional<std::string> pending_clarification;
    /// Step the last agent turn asked, awaiting an answer.
    std::optional<std::string> current_step;
    int clarifications_for_current = 0;
    int consecutive_silence = 0;

    bool callback_requested = false;
    bool abandon_requested = false;
    /// An emergency phrase was heard; the call ends with a safety message.
    bool escalation_requested = false;
    /// The final agent turn has been spoken; only close_session remains.
    bool finished = false;

    std::vector<survey::Turn> turn_log;
    SessionStatus status = SessionStatus::Active;
    Timestamp started_at{};

    const survey::QuestionSpec* current() const;
    const ParsedAnswer* last_accepted() const;

private:
    friend class DialogueEngine;
    std::string last_accepted_step_;
};

/// Produces the agent's wording. The engine decides what to say; the
/// generator decides how to say it.
class ResponseGenerator {
public:
    virtual ~ResponseGenerator() = default;
    virtual std::string generate(const SessionState& context, Intent intent) const = 0;
};

/// Template-driven generator. Records are `Key | template` lines where Key is
/// an intent name optionally followed by a variant:
///
///   Ask.opening      first question of the call
///   Ask              any later question
///   Clarify          re-asking after an unclear answer
///   Acknowledge      short acknowledgment prefixed to the next question
///   Acknowledge.rating / Acknowledge.count
///                    acknowledgment after a numeric answer
///   Acknowledge.callback / Acknowledge.farewell / Acknowledge.abandon /
///   Acknowledge.emergency
///                    final turn of the call
///   WrapUp           "anything else?" turn after the last step
///
/// Placeholders: {name} patient display name, {prompt} the step prompt,
/// {answer} the last accepted answer. When a key has several records they are
/// used in rotation by agent-turn count, so output is a pure function of state.
class ScriptedGenerator final : public ResponseGenerator {
public:
    struct Record {
        std::string key;
        std::string text;
    };

    explicit ScriptedGenerator(std::vector<Record> records);

    static ScriptedGenerator parse(std::string_view document);
    static ScriptedGenerator load(const std::filesystem::path& path);

    std::string generate(const SessionState& context, Intent intent) const override;

    const std::vector<Record>& records() const { return records_; }

private:
    std::string pick(std::string_view key, std::string_view fallback_key,
                     const SessionState& context) const;
    std::vector<Record> records_;
};

/// Fills {name} in a step prompt.
std::string render_prompt(const survey::QuestionSpec& step, const survey::PatientProfile& patient);

class DialogueEngine {
public:
    DialogueEngine(std::shared_ptr<const ResponseGenerator> generator, DialogueConfig config = {},
                   Clock clock = system_clock(),
                   const survey::Lexicon& lexicon = survey::default_lexicon());

    /// Opens a session and asks the first step. Throws ValidationError on an empty flow.
    std::pair<SessionState, survey::Turn> start_session(const survey::PatientProfile& patient,
                                                        const survey::ConsolidatedFlow& flow,
                                                        std::string session_id) const;

    /// Records the patient's utterance and returns the agent's next turn.
    /// Throws StateError on a closed or finished session.
    survey::Turn advance(SessionState& session, std::string_view utterance) const;

    /// Assembles the transcript and closes the session. Throws StateError when
    /// the session is already closed.
    survey::ConversationTranscript close_session(SessionState& session,
                                                 survey::CompletionStatus reason) const;

    const DialogueConfig& config() const { return config_; }

private:
    survey::Turn agent_turn(SessionState& s, std::string text,
                            std::optional<std::string> step_id) const;
    survey::Turn ask_next(SessionState& s, std::string prefix) const;
    void cover_volunteered(SessionState& s, const ConfusionResult& parsed,
                           std::string_view utterance) const;

    std::shared_ptr<const ResponseGenerator> generator_;
    DialogueConfig config_;
    Clock clock_;
    const survey::Lexicon& lexicon_;
};

/// Evidence routing shared with extraction: dimensions an utterance volunteers
/// beyond the step it answers. A lexicon term that bears on any dimension of
/// the answered step is attributed to that step and never spills over.
std::set<std::string> volunteered_dimensions(const std::vector<survey::LexiconHit>& hits,
                                             const std::set<std::string>& step_dimensions);

}  // namespace pulse::dialogue
