#pragma once

#include "pulse/survey/domain.hpp"

#include <map>
#include <string>
#include <vector>

namespace pulse::extraction {

struct CategoryCompleteness {
    survey::Category category = survey::Category::Symptoms;
    int asked = 0;
    int answered = 0;
    double rate = 0.0;

    bool operator==(const CategoryCompleteness&) const = default;
};

struct CompletenessReport {
    /// Highest rate first; equal rates keep the survey's category order.
    std::vector<CategoryCompleteness> categories;

    const CategoryCompleteness* find(survey::Category c) const;
};

/// A step counts as asked when an agent turn carries its id, and as answered
/// when a patient turn for it reached `answered_confidence`. Steps are mapped
/// to categories through the transcript's flow. Throws ValidationError on an
/// empty list and NotFound for a flow id missing from `flows`.
CompletenessReport completeness_report(const std::vector<survey::ConversationTranscript>& transcripts,
                                       const std::map<std::string, survey::ConsolidatedFlow>& flows,
                                       double answered_confidence = 0.6);

}  // namespace pulse::extraction
