#include "pulse/survey/domain.hpp"

#include "pulse/error.hpp"

#include <absl/time/time.h>

#include <algorithm>
#include <array>
#include <utility>

namespace pulse::survey {

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 12> kCategoryNames{{
    {Category::DailyActivities, "DailyActivities"},
    {Category::DailyLifeImpact, "DailyLifeImpact"},
    {Category::Symptoms, "Symptoms"},
    {Category::ExtraIntestinal, "ExtraIntestinal"},
    {Category::Mobility, "Mobility"},
    {Category::SelfCare, "SelfCare"},
    {Category::Emotional, "Emotional"},
    {Category::TreatmentFeedback, "TreatmentFeedback"},
    {Category::ResearchSolutions, "ResearchSolutions"},
    {Category::EnvironmentalTriggers, "EnvironmentalTriggers"},
    {Category::CareBarriers, "CareBarriers"},
    {Category::Wrapup, "Wrapup"},
}};

// Fatigue-aware order. Later questions get shorter answers, so the items
// care teams depend on go first.
constexpr std::array<Category, 12> kPriority{
    Category::DailyLifeImpact,
    Category::Symptoms,
    Category::ExtraIntestinal,
    Category::Mobility,
    Category::DailyActivities,
    Category::SelfCare,
    Category::Emotional,
    Category::EnvironmentalTriggers,
    Category::CareBarriers,
    Category::TreatmentFeedback,
    Category::ResearchSolutions,
    Category::Wrapup,
};

constexpr std::array<std::pair<AnswerKind, std::string_view>, 4> kAnswerKindNames{{
    {AnswerKind::NumericRating0to100, "NumericRating0to100"},
    {AnswerKind::Count24h, "Count24h"},
    {AnswerKind::FreeText, "FreeText"},
    {AnswerKind::YesNo, "YesNo"},
}};

template <typename Table, typename Enum>
std::string_view lookup_name(const Table& table, Enum value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

template <typename Enum, typename Table>
Enum lookup_value(const Table& table, std::string_view name, std::string_view what) {
    for (const auto& [v, n] : table) {
        if (n == name) return v;
    }
    throw ValidationError("unknown " + std::string(what) + " '" + std::string(name) + "'");
}

const std::set<std::string> kNoDimensions;

}  // namespace

std::string_view to_string(Category c) { return lookup_name(kCategoryNames, c); }
std::string_view to_string(AnswerKind k) { return lookup_name(kAnswerKindNames, k); }

Category category_from_string(std::string_view name) {
    return lookup_value<Category>(kCategoryNames, name, "category");
}

AnswerKind answer_kind_from_string(std::string_view name) {
    return lookup_value<AnswerKind>(kAnswerKindNames, name, "answer kind");
}

const std::vector<Category>& all_categories() {
    static const std::vector<Category> all = [] {
        std::vector<Category> out;
        for (const auto& [c, _] : kCategoryNames) out.push_back(c);
        return out;
    }();
    return all;
}

int category_priority(Category c) {
    const auto it = std::find(kPriority.begin(), kPriority.end(), c);
    return static_cast<int>(it - kPriority.begin());
}

std::vector<std::string> Instrument::dimensions() const {
    std::vector<std::string> out;
    for (const auto& item : items) {
        if (std::find(out.begin(), out.end(), item.dimension) == out.end()) {
            out.push_back(item.dimension);
        }
    }
    return out;
}

const QuestionSpec* Instrument::find_item(std::string_view item_id) const {
    for (const auto& item : items) {
        if (item.id == item_id) return &item;
    }
    return nullptr;
}

void validate(const Instrument& instrument) {
    if (instrument.id.empty()) throw ValidationError("instrument id is empty");
    if (instrument.items.empty()) {
        throw ValidationError("instrument '" + instrument.id + "' must have at least one item");
    }
    std::set<std::string> seen;
    for (const auto& item : instrument.items) {
        if (item.id.empty()) throw ValidationError("item id is empty");
        if (!seen.insert(item.id).second) {
            throw ValidationError("duplicate item id '" + item.id + "' in instrument '" +
                                  instrument.id + "'");
        }
        if (item.dimension.empty()) {
            throw ValidationError("item '" + item.id + "' maps to no score dimension");
        }
    }
}

const QuestionSpec* ConsolidatedFlow::find_step(std::string_view step_id) const {
    const int i = index_of(step_id);
    return i < 0 ? nullptr : &steps[static_cast<size_t>(i)];
}

int ConsolidatedFlow::index_of(std::string_view step_id) const {
    for (size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].id == step_id) return static_cast<int>(i);
    }
    return -1;
}

const std::set<std::string>& ConsolidatedFlow::dimensions_of(std::string_view step_id) const {
    const auto it = step_dimensions.find(std::string(step_id));
    return it == step_dimensions.end() ? kNoDimensions : it->second;
}

void validate(const PatientProfile& patient) {
    if (patient.id.empty()) throw ValidationError("patient id is empty");
    const auto& w = patient.allowed_call_window;
    if (w.start_minute < 0 || w.end_minute > 24 * 60 || w.start_minute >= w.end_minute) {
        throw ValidationError("patient '" + patient.id + "': call window start must precede end");
    }
    absl::TimeZone tz;
    if (!absl::LoadTimeZone(patient.timezone, &tz)) {
        throw ValidationError("patient '" + patient.id + "': unknown timezone '" +
                              patient.timezone + "'");
    }
}

std::string_view to_string(Speaker s) { return s == Speaker::Agent ? "Agent" : "Patient"; }

std::string_view to_string(CompletionStatus s) {
    switch (s) {
        case CompletionStatus::Completed: return "Completed";
        case CompletionStatus::Abandoned: return "Abandoned";
        case CompletionStatus::Escalated: return "Escalated";
    }
    return "?";
}

Speaker speaker_from_string(std::string_view name) {
    if (name == "Agent") return Speaker::Agent;
    if (name == "Patient") return Speaker::Patient;
    throw ValidationError("unknown speaker '" + std::string(name) + "'");
}

CompletionStatus completion_status_from_string(std::string_view name) {
    for (auto s : {CompletionStatus::Completed, CompletionStatus::Abandoned,
                   CompletionStatus::Escalated}) {
        if (to_string(s) == name) return s;
    }
    throw ValidationError("unknown completion status '" + std::string(name) + "'");
}

std::vector<const Turn*> ConversationTranscript::patient_turns() const {
    std::vector<const Turn*> out;
    for (const auto& t : turns) {
        if (t.speaker == Speaker::Patient) out.push_back(&t);
    }
    return out;
}

void validate(const ConversationTranscript& transcript) {
    if (transcript.ended_at < transcript.started_at) {
        throw ValidationError("transcript '" + transcript.session_id + "' ends before it starts");
    }
    bool wrap_up_seen = false;
    for (size_t i = 0; i < transcript.turns.size(); ++i) {
        const Turn& t = transcript.turns[i];
        const Speaker expected = i % 2 == 0 ? Speaker::Agent : Speaker::Patient;
        if (t.speaker != expected) {
            throw ValidationError("transcript '" + transcript.session_id +
                                  "': turns must alternate starting with Agent (turn " +
                                  std::to_string(i) + ")");
        }
        if (t.speaker == Speaker::Agent) {
            if (t.parse_confidence) {
                throw ValidationError("agent turn " + std::to_string(i) + " carries a confidence");
            }
            if (!t.step_id) {
                wrap_up_seen = true;
            } else if (wrap_up_seen) {
                throw ValidationError("agent turn " + std::to_string(i) +
                                      " asks a step after the wrap-up");
            }
        } else if (t.parse_confidence &&
                   (*t.parse_confidence < 0.0 || *t.parse_confidence > 1.0)) {
            throw ValidationError("patient turn " + std::to_string(i) +
                                  " confidence outside [0,1]");
        }
    }
}

}  // namespace pulse::survey
