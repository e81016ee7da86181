#include "pulse/dialogue/answer.hpp"

#include "pulse/survey/text.hpp"

#include <algorithm>

namespace pulse::dialogue {

using survey::AnswerKind;

ConfusionResult detect_confusion(std::string_view utterance, const survey::QuestionSpec& step,
                                 const survey::Lexicon& lexicon) {
    ConfusionResult out;
    if (survey::is_blank(utterance)) return out;

    out.hits = lexicon.scan(utterance);
    int total_distance = 0;
    for (const auto& hit : out.hits) {
        if (!hit.is_correction()) continue;
        out.corrections.push_back({hit.heard, hit.entry->canonical()});
        total_distance += hit.distance;
    }

    switch (step.answer_kind) {
        case AnswerKind::NumericRating0to100:
            if (auto n = survey::parse_first_number(utterance); n && *n >= 0 && *n <= 100) {
                out.normalized = Rating{*n};
            }
            break;
        case AnswerKind::Count24h:
            if (auto n = survey::parse_first_number(utterance, true); n && *n >= 0) {
                out.normalized = Count{*n};
            }
            break;
        case AnswerKind::YesNo:
            if (auto p = survey::parse_polar(utterance)) out.normalized = Polar{*p};
            break;
        case AnswerKind::FreeText:
            if (!out.hits.empty()) out.normalized = FreeText{std::string(utterance)};
            break;
    }

    const double base = out.normalized ? kParsedConfidence : kUnparsedConfidence;
    const double c = base - kPenaltyPerCorrection * static_cast<double>(out.corrections.size()) -
                     kPenaltyPerEdit * total_distance;
    out.confidence = std::clamp(c, 0.0, 1.0);
    return out;
}

std::string describe(const AnswerValue& value) {
    struct Visitor {
        std::string operator()(const Rating& r) const { return std::to_string(r.value); }
        std::string operator()(const Count& c) const { return std::to_string(c.value); }
        std::string operator()(const Polar& p) const { return p.yes ? "yes" : "no"; }
        std::string operator()(const FreeText& f) const { return f.text; }
    };
    return std::visit(Visitor{}, value);
}

}  // namespace pulse::dialogue
