#pragma once

#include "pulse/extraction/assessment.hpp"
#include "pulse/survey/domain.hpp"
#include "pulse/survey/lexicon.hpp"

#include <string>
#include <vector>

namespace pulse::extraction {

/// Keyword tables behind the scoring rubric. Every list can be overridden from
/// the service config.
struct RubricConfig {
    /// GeneralWellbeing = 4 - round(rating / rating_band), clamped to 0..4.
    double rating_band = 25.0;

    std::vector<std::string> pain_severe{"severe", "severely", "excruciating", "unbearable",
                                         "terrible", "agony", "worst"};
    std::vector<std::string> pain_mild{"mild", "mildly", "slight", "slightly", "little", "bit",
                                       "twinge", "twinges", "minor"};
    std::vector<std::string> pain_moderate{"some", "moderate", "quite", "pain", "painful"};

    std::vector<std::string> stool_formed{"formed", "solid", "normal"};
    std::vector<std::string> stool_liquid{"diarrhea", "diarrhoea", "loose", "watery", "liquid",
                                          "runny"};

    std::vector<std::string> eq5d_extreme{"unable", "can't", "cannot", "extreme", "extremely",
                                          "confined", "bedridden", "bedbound", "impossible",
                                          "severe"};
    std::vector<std::string> eq5d_some{"some", "help", "helps", "helping", "pain", "tired",
                                       "difficulty", "difficult", "trouble", "slow", "slowly",
                                       "moderate", "bit", "little", "struggle", "struggling"};
    std::vector<std::string> eq5d_none{"fine", "independent", "independently", "myself",
                                       "okay", "ok", "normal", "great"};

    /// Wellbeing keyword bands used when no 0..100 rating was given.
    std::vector<std::string> wellbeing_0{"excellent", "great", "fantastic", "wonderful"};
    std::vector<std::string> wellbeing_1{"good", "well", "fine", "okay", "ok", "alright"};
    std::vector<std::string> wellbeing_2{"tired", "poor", "bad", "meh", "rough", "fatigued"};
    std::vector<std::string> wellbeing_3{"awful", "exhausted", "miserable", "worse"};
    std::vector<std::string> wellbeing_4{"terrible", "horrible", "worst", "dreadful"};
};

/// Converts a finished transcript into questionnaire scores.
class Extractor {
public:
    virtual ~Extractor() = default;
    virtual AssessmentResult extract(const survey::ConversationTranscript& transcript) const = 0;
};

/// Deterministic keyword rubric over the lexicon.
///
/// Every patient turn is evidence for the dimensions of the step it answers,
/// plus any dimensions it volunteers (lexicon terms unrelated to that step,
/// the same routing the dialogue engine uses for spontaneous coverage). For
/// each dimension the latest evidence turn that yields a score wins, so a
/// later turn only ever adds or overwrites the dimensions it addresses.
/// AdditionalManifestations instead counts distinct manifestation families
/// across all patient turns.
class RuleExtractor final : public Extractor {
public:
    explicit RuleExtractor(survey::ConsolidatedFlow flow, RubricConfig rubric = {},
                           const survey::Lexicon& lexicon = survey::default_lexicon());

    /// MHBI table, health scale and their notes.
    AssessmentResult extract_mhbi(const survey::ConversationTranscript& transcript) const;
    /// EQ-5D-3L table and its notes.
    AssessmentResult extract_eq5d(const survey::ConversationTranscript& transcript) const;
    /// Both tables plus the recommended action from escalation detection.
    AssessmentResult extract(const survey::ConversationTranscript& transcript) const override;

    const survey::ConsolidatedFlow& flow() const { return flow_; }

private:
    struct Evidence;
    std::vector<Evidence> collect(const survey::ConversationTranscript& transcript) const;

    survey::ConsolidatedFlow flow_;
    RubricConfig rubric_;
    const survey::Lexicon& lexicon_;
};

}  // namespace pulse::extraction
