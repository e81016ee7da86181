#pragma once

#include "pulse/survey/domain.hpp"

#include <vector>

namespace pulse::survey {

/// Merges several instruments into one conversational flow.
///
/// Items from different instruments that declare the same category share a
/// step (first fit: a step holds at most one item per instrument, so items of
/// a single instrument are never merged with each other). The primary item of
/// a step, and so its prompt and answer kind, is the first one placed. Steps
/// are then stably ordered by category priority.
///
/// Throws ValidationError on an empty list or repeated instrument ids.
ConsolidatedFlow consolidate(const std::vector<Instrument>& instruments);

}  // namespace pulse::survey
