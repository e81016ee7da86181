#include "pulse/survey/escalation_terms.hpp"

#include "pulse/survey/lexicon.hpp"
#include "pulse/survey/text.hpp"

namespace pulse::survey {

const std::vector<EscalationTerm>& escalation_terms() {
    using L = EscalationLevel;
    static const std::vector<EscalationTerm> terms{
        {"chest pain", L::Emergency},
        {"can't breathe", L::Emergency},
        {"cannot breathe", L::Emergency},
        {"trouble breathing", L::Emergency},
        {"kill myself", L::Emergency},
        {"end my life", L::Emergency},
        {"suicide", L::Emergency},
        {"suicidal", L::Emergency},
        {"passed out", L::Emergency},
        {"fainted", L::Emergency},
        {"vomiting blood", L::Emergency},
        {"heavy bleeding", L::Emergency},
        {"bleeding heavily", L::Emergency},
        {"emergency", L::Emergency},
        {"call me back", L::Callback},
        {"call back", L::Callback},
        {"callback", L::Callback},
        {"call me", L::Callback},
        {"contact me", L::Callback},
        {"speak to a nurse", L::Callback},
        {"speak to a doctor", L::Callback},
        {"talk to a nurse", L::Callback},
        {"talk to a doctor", L::Callback},
        {"talk to someone", L::Callback},
        {"speak to someone", L::Callback},
        {"real person", L::Callback},
        {"blood", L::Info},
        {"bleeding", L::Info},
        {"fever", L::Info},
        {"unbearable", L::Info},
        {"severe", L::Info},
        {"getting worse", L::Info},
        {"weight loss", L::Info},
        {"losing weight", L::Info},
    };
    return terms;
}

std::optional<EscalationTerm> strongest_escalation(std::string_view text) {
    std::optional<EscalationTerm> best;
    for (const auto& words : clauses(text)) {
        for (const auto& term : escalation_terms()) {
            const auto pw = tokenize(term.phrase);
            for (size_t i = 0; i + pw.size() <= words.size(); ++i) {
                bool match = true;
                for (size_t k = 0; k < pw.size() && match; ++k) match = words[i + k] == pw[k];
                if (!match) continue;
                bool negated = false;
                for (size_t k = i >= 3 ? i - 3 : 0; k < i; ++k) negated = negated || is_negator(words[k]);
                if (negated) continue;
                if (!best || static_cast<int>(term.level) > static_cast<int>(best->level)) best = term;
            }
        }
    }
    return best;
}

}  // namespace pulse::survey
