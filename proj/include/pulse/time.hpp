#pragma once

#include <chrono>
#include <functional>
#include <string>

namespace pulse {

using Timestamp = std::chrono::sys_seconds;

/// ISO-8601 UTC rendering, e.g. 2025-03-04T09:00:00Z.
std::string format_utc(Timestamp t);
Timestamp parse_utc(const std::string& text);

/// Source of "now". Injected everywhere a timestamp is stamped so runs can be replayed.
using Clock = std::function<Timestamp()>;

Clock system_clock();

/// Deterministic clock: start, start + step, start + 2*step, ...
Clock stepping_clock(Timestamp start, std::chrono::seconds step = std::chrono::seconds{1});

}  // namespace pulse
