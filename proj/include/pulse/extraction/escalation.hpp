#pragma once

#include "pulse/extraction/assessment.hpp"
#include "pulse/survey/domain.hpp"

#include <vector>

namespace pulse::extraction {

/// One alert per patient turn that contains a non-negated escalation phrase,
/// at the strongest level found in that turn.
std::vector<Alert> detect_escalation(const survey::ConversationTranscript& transcript);

/// Emergency > Callback > ProviderFollowUp (any Info alert) > None.
RecommendedAction recommended_action(const std::vector<Alert>& alerts);

}  // namespace pulse::extraction
