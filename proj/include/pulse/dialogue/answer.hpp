#pragma once

#include "pulse/survey/domain.hpp"
#include "pulse/survey/lexicon.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pulse::dialogue {

struct Rating {
    int value = 0;  ///< 0..100
    bool operator==(const Rating&) const = default;
};
struct Count {
    int value = 0;  ///< >= 0
    bool operator==(const Count&) const = default;
};
struct Polar {
    bool yes = false;
    bool operator==(const Polar&) const = default;
};
struct FreeText {
    std::string text;
    bool operator==(const FreeText&) const = default;
};

using AnswerValue = std::variant<Rating, Count, Polar, FreeText>;

struct Correction {
    std::string heard;
    std::string corrected;
    bool operator==(const Correction&) const = default;
};

struct ParsedAnswer {
    std::string raw_text;
    AnswerValue normalized;
    double confidence = 0.0;
    std::vector<Correction> lexicon_corrections;
    /// Covered by an answer to a different question rather than asked.
    bool volunteered = false;
};

/// Confidence given to an answer that parsed for its question kind.
inline constexpr double kParsedConfidence = 0.95;
/// Confidence for non-empty text that did not parse.
inline constexpr double kUnparsedConfidence = 0.35;
inline constexpr double kPenaltyPerCorrection = 0.10;
inline constexpr double kPenaltyPerEdit = 0.05;

struct ConfusionResult {
    double confidence = 0.0;
    std::vector<Correction> corrections;
    /// Present when the utterance parsed for the step's answer kind.
    std::optional<AnswerValue> normalized;
    std::vector<survey::LexiconHit> hits;
};

/// Scores how well an utterance answers a step:
///   confidence = base - 0.10 * corrections - 0.05 * total edit distance, in [0,1]
/// where base is 0.95 when the text parses for the answer kind, 0.35 otherwise,
/// and blank input scores 0. Free-text answers parse when they contain any
/// lexicon term.
ConfusionResult detect_confusion(std::string_view utterance, const survey::QuestionSpec& step,
                                 const survey::Lexicon& lexicon = survey::default_lexicon());

std::string describe(const AnswerValue& value);

}  // namespace pulse::dialogue
