#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::survey {

enum class EscalationLevel { Info, Callback, Emergency };

struct EscalationTerm {
    std::string phrase;  ///< lower-case, space separated words
    EscalationLevel level;
};

/// Phrase table scanned by escalation detection. Emergency entries are
/// listed before callback and informational ones.
const std::vector<EscalationTerm>& escalation_terms();

/// Highest-level non-negated phrase found in the text, if any.
std::optional<EscalationTerm> strongest_escalation(std::string_view text);

inline bool requests_callback(std::string_view text) {
    const auto hit = strongest_escalation(text);
    return hit && hit->level == EscalationLevel::Callback;
}

}  // namespace pulse::survey
