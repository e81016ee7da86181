#include "pulse/time.hpp"

#include "pulse/error.hpp"

#include <absl/time/time.h>

#include <atomic>
#include <cstdint>
#include <memory>

namespace pulse {

std::string format_utc(Timestamp t) {
    return absl::FormatTime("%Y-%m-%dT%H:%M:%SZ", absl::FromChrono(t), absl::UTCTimeZone());
}

Timestamp parse_utc(const std::string& text) {
    absl::Time parsed;
    std::string err;
    if (!absl::ParseTime("%Y-%m-%dT%H:%M:%SZ", text, absl::UTCTimeZone(), &parsed, &err)) {
        throw ValidationError("bad UTC timestamp '" + text + "': " + err);
    }
    return std::chrono::time_point_cast<std::chrono::seconds>(absl::ToChronoTime(parsed));
}

Clock system_clock() {
    return [] {
        return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    };
}

Clock stepping_clock(Timestamp start, std::chrono::seconds step) {
    auto ticks = std::make_shared<std::atomic<std::int64_t>>(0);
    return [ticks, start, step] {
        return start + step * ticks->fetch_add(1);
    };
}

}  // namespace pulse
