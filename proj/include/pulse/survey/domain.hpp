#pragma once

#include "pulse/time.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::survey {

enum class Category {
    DailyActivities,
    DailyLifeImpact,
    Symptoms,
    ExtraIntestinal,
    Mobility,
    SelfCare,
    Emotional,
    TreatmentFeedback,
    ResearchSolutions,
    EnvironmentalTriggers,
    CareBarriers,
    Wrapup,
};

enum class AnswerKind { NumericRating0to100, Count24h, FreeText, YesNo };

std::string_view to_string(Category c);
std::string_view to_string(AnswerKind k);
/// Throws ValidationError on an unknown name.
Category category_from_string(std::string_view name);
AnswerKind answer_kind_from_string(std::string_view name);

const std::vector<Category>& all_categories();

/// Position of a category in the fatigue-aware survey order: clinically critical
/// symptom and daily-life questions first, research and feedback questions last.
int category_priority(Category c);

struct QuestionSpec {
    std::string id;
    Category category = Category::Symptoms;
    std::string prompt_template;
    AnswerKind answer_kind = AnswerKind::FreeText;
    bool required = true;
    /// Score dimension the item feeds (e.g. "LiquidStools", "Mobility").
    std::string dimension;

    bool operator==(const QuestionSpec&) const = default;
};

struct Instrument {
    std::string id;
    std::string name;
    std::vector<QuestionSpec> items;
    std::string scale_docs;

    bool operator==(const Instrument&) const = default;

    /// Distinct score dimensions, in first-appearance order.
    std::vector<std::string> dimensions() const;
    const QuestionSpec* find_item(std::string_view item_id) const;
};

/// Throws ValidationError when an Instrument invariant is broken.
void validate(const Instrument& instrument);

struct ItemRef {
    std::string instrument_id;
    std::string item_id;

    auto operator<=>(const ItemRef&) const = default;
};

struct ConsolidatedFlow {
    std::string id;
    std::vector<std::string> source_instruments;
    std::vector<QuestionSpec> steps;
    std::map<std::string, std::set<ItemRef>> coverage_map;
    /// Score dimensions answered by each step (derived from the covered items).
    std::map<std::string, std::set<std::string>> step_dimensions;

    bool empty() const { return steps.empty(); }
    const QuestionSpec* find_step(std::string_view step_id) const;
    /// Index of a step in `steps`, or -1.
    int index_of(std::string_view step_id) const;
    const std::set<std::string>& dimensions_of(std::string_view step_id) const;
};

/// Local time-of-day interval [start, end) in minutes after midnight.
struct CallWindow {
    int start_minute = 9 * 60;
    int end_minute = 17 * 60;

    bool contains(int minute_of_day) const {
        return minute_of_day >= start_minute && minute_of_day < end_minute;
    }
    bool operator==(const CallWindow&) const = default;
};

struct PatientProfile {
    std::string id;
    std::string display_name;
    std::string timezone = "UTC";
    std::string language = "en-US";
    CallWindow allowed_call_window;
    std::set<std::string> cohort_tags;

    bool operator==(const PatientProfile&) const = default;
};

/// Checks the window ordering and that the timezone name resolves.
void validate(const PatientProfile& patient);

enum class Speaker { Agent, Patient };
enum class CompletionStatus { Completed, Abandoned, Escalated };

std::string_view to_string(Speaker s);
std::string_view to_string(CompletionStatus s);
Speaker speaker_from_string(std::string_view name);
CompletionStatus completion_status_from_string(std::string_view name);

struct Turn {
    Speaker speaker = Speaker::Agent;
    std::string text;
    std::optional<std::string> step_id;
    std::optional<double> parse_confidence;
    Timestamp timestamp{};

    bool operator==(const Turn&) const = default;
};

struct ConversationTranscript {
    std::string session_id;
    std::string patient_id;
    std::string flow_id;
    std::vector<Turn> turns;
    Timestamp started_at{};
    Timestamp ended_at{};
    CompletionStatus completion_status = CompletionStatus::Completed;

    bool operator==(const ConversationTranscript&) const = default;

    std::vector<const Turn*> patient_turns() const;
};

/// Alternation starting with Agent, ended_at >= started_at, confidence only on
/// patient turns, agent turns carry a step id unless they are wrap-up turns.
void validate(const ConversationTranscript& transcript);

}  // namespace pulse::survey
