#include "pulse/extraction/completeness.hpp"

#include "pulse/error.hpp"

#include <algorithm>
#include <set>

namespace pulse::extraction {

const CategoryCompleteness* CompletenessReport::find(survey::Category c) const {
    const auto it = std::find_if(categories.begin(), categories.end(),
                                 [&](const CategoryCompleteness& x) { return x.category == c; });
    return it == categories.end() ? nullptr : &*it;
}

CompletenessReport completeness_report(const std::vector<survey::ConversationTranscript>& transcripts,
                                       const std::map<std::string, survey::ConsolidatedFlow>& flows,
                                       double answered_confidence) {
    if (transcripts.empty()) throw ValidationError("completeness report needs at least one transcript");

    std::map<survey::Category, CategoryCompleteness> tally;
    for (const auto& t : transcripts) {
        const auto flow = flows.find(t.flow_id);
        if (flow == flows.end()) throw NotFound("unknown flow '" + t.flow_id + "'");

        std::set<std::string> asked;
        std::set<std::string> answered;
        for (const auto& turn : t.turns) {
            if (!turn.step_id || !flow->second.find_step(*turn.step_id)) continue;
            if (turn.speaker == survey::Speaker::Agent) {
                asked.insert(*turn.step_id);
            } else if (turn.parse_confidence.value_or(0.0) >= answered_confidence) {
                answered.insert(*turn.step_id);
            }
        }
        for (const auto& id : asked) {
            auto& c = tally[flow->second.find_step(id)->category];
            ++c.asked;
            if (answered.count(id)) ++c.answered;
        }
    }

    CompletenessReport report;
    for (auto& [cat, c] : tally) {
        c.category = cat;
        c.rate = c.asked > 0 ? static_cast<double>(c.answered) / c.asked : 0.0;
        report.categories.push_back(c);
    }
    std::stable_sort(report.categories.begin(), report.categories.end(),
                     [](const CategoryCompleteness& a, const CategoryCompleteness& b) {
                         if (a.rate != b.rate) return a.rate > b.rate;
                         return survey::category_priority(a.category) < survey::category_priority(b.category);
                     });
    return report;
}

}  // namespace pulse::extraction
