#pragma once

#include "pulse/cache/session_cache.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace pulse::cache {

/// Holds every live session cache under one global token budget. When the
/// cached total exceeds the budget, the least recently extended sessions other
/// than the one just written are evicted until it fits or none is left.
class CacheManager {
public:
    explicit CacheManager(std::int64_t token_budget);

    PrefillStats prime(const std::string& session_id, std::int64_t prompt_len,
                       SegmentKind kind = SegmentKind::SystemPrompt);
    /// Throws NotFound for an unknown or evicted session.
    PrefillStats extend(const std::string& session_id, std::int64_t new_tokens,
                        SegmentKind kind = SegmentKind::History);
    PrefillStats blend(const std::string& session_id, const std::vector<InjectedSegment>& injected,
                       std::int64_t new_tokens, double recompute_fraction);

    /// Copy of a session's ledger. Throws NotFound.
    SessionCache snapshot(const std::string& session_id) const;
    bool contains(const std::string& session_id) const;

    std::int64_t cached_tokens() const;
    std::int64_t budget() const { return budget_; }
    /// Evicted session ids, oldest first.
    std::vector<std::string> evicted() const;

private:
    SessionCache& live(const std::string& session_id);
    void touch_and_evict(const std::string& session_id);

    mutable std::mutex mu_;
    std::int64_t budget_;
    std::uint64_t tick_ = 0;
    std::map<std::string, SessionCache> sessions_;
    std::map<std::string, std::uint64_t> last_extended_;
    std::vector<std::string> evicted_;
};

}  // namespace pulse::cache
