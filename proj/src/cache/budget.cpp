#include "pulse/cache/budget.hpp"

#include "pulse/error.hpp"

namespace pulse::cache {

CacheManager::CacheManager(std::int64_t token_budget) : budget_(token_budget) {
    if (token_budget <= 0) throw ValidationError("cache token budget must be positive");
}

SessionCache& CacheManager::live(const std::string& session_id) {
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFound("no cached session " + session_id);
    return it->second;
}

void CacheManager::touch_and_evict(const std::string& session_id) {
    last_extended_[session_id] = ++tick_;
    std::int64_t total = 0;
    for (const auto& [id, s] : sessions_) total += s.cached_prefix_len();
    while (total > budget_) {
        const std::string* victim = nullptr;
        std::uint64_t oldest = 0;
        for (const auto& [id, t] : last_extended_) {
            if (id == session_id) continue;
            if (victim == nullptr || t < oldest) {
                victim = &id;
                oldest = t;
            }
        }
        if (victim == nullptr) break;
        const std::string id = *victim;
        total -= sessions_.at(id).cached_prefix_len();
        sessions_.erase(id);
        last_extended_.erase(id);
        evicted_.push_back(id);
    }
}

PrefillStats CacheManager::prime(const std::string& session_id, std::int64_t prompt_len, SegmentKind kind) {
    std::lock_guard lock(mu_);
    if (sessions_.count(session_id)) throw StateError("session " + session_id + " is already primed");
    SessionCache cache(session_id);
    cache.prime(prompt_len, kind);
    const auto stats = cache.calls().back().stats;
    sessions_.emplace(session_id, std::move(cache));
    touch_and_evict(session_id);
    return stats;
}

PrefillStats CacheManager::extend(const std::string& session_id, std::int64_t new_tokens, SegmentKind kind) {
    std::lock_guard lock(mu_);
    const auto s = live(session_id).extend(new_tokens, kind);
    touch_and_evict(session_id);
    return s;
}

PrefillStats CacheManager::blend(const std::string& session_id, const std::vector<InjectedSegment>& injected,
                                 std::int64_t new_tokens, double recompute_fraction) {
    std::lock_guard lock(mu_);
    const auto s = live(session_id).blend(injected, new_tokens, recompute_fraction);
    touch_and_evict(session_id);
    return s;
}

SessionCache CacheManager::snapshot(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFound("no cached session " + session_id);
    return it->second;
}

bool CacheManager::contains(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    return sessions_.count(session_id) > 0;
}

std::int64_t CacheManager::cached_tokens() const {
    std::lock_guard lock(mu_);
    std::int64_t total = 0;
    for (const auto& [id, s] : sessions_) total += s.cached_prefix_len();
    return total;
}

std::vector<std::string> CacheManager::evicted() const {
    std::lock_guard lock(mu_);
    return evicted_;
}

}  // namespace pulse::cache
