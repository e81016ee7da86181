#include "pulse/extraction/escalation.hpp"

#include <algorithm>

namespace pulse::extraction {

std::vector<Alert> detect_escalation(const survey::ConversationTranscript& transcript) {
    std::vector<Alert> alerts;
    for (const auto& turn : transcript.turns) {
        if (turn.speaker != survey::Speaker::Patient) continue;
        const auto hit = survey::strongest_escalation(turn.text);
        if (!hit) continue;
        alerts.push_back(Alert{transcript.session_id, hit->level, turn.text, turn.timestamp});
    }
    return alerts;
}

RecommendedAction recommended_action(const std::vector<Alert>& alerts) {
    if (alerts.empty()) return RecommendedAction::None;
    const auto top = std::max_element(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
                         return static_cast<int>(a.severity) < static_cast<int>(b.severity);
                     })->severity;
    switch (top) {
        case AlertSeverity::Emergency: return RecommendedAction::Emergency;
        case AlertSeverity::Callback: return RecommendedAction::Callback;
        case AlertSeverity::Info: return RecommendedAction::ProviderFollowUp;
    }
    return RecommendedAction::None;
}

}  // namespace pulse::extraction
