#include "pulse/cache/session_cache.hpp"

#include "pulse/error.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>

namespace pulse::cache {

namespace {

// ceil() that does not round 0.15 * 100 up to 16.
std::int64_t ceil_tokens(double x) {
    const double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

std::string_view to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::SystemPrompt: return "SystemPrompt";
        case SegmentKind::History: return "History";
        case SegmentKind::Retrieved: return "Retrieved";
    }
    return "?";
}

SegmentKind segment_kind_from_string(std::string_view name) {
    for (auto k : {SegmentKind::SystemPrompt, SegmentKind::History, SegmentKind::Retrieved}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown segment kind '" + std::string(name) + "'");
}

PrefillStats& PrefillStats::operator+=(const PrefillStats& o) {
    reused_tokens += o.reused_tokens;
    new_tokens_processed += o.new_tokens_processed;
    recomputed_tokens += o.recomputed_tokens;
    baseline_tokens += o.baseline_tokens;
    return *this;
}

std::optional<double> CallRecord::speedup() const {
    if (stats.processed() == 0) return std::nullopt;
    return static_cast<double>(stats.baseline_tokens) / static_cast<double>(stats.processed());
}

SessionCache::SessionCache(std::string session_id) : session_id_(std::move(session_id)) {}

void SessionCache::append(std::int64_t length, SegmentKind kind) {
    segments_.push_back({next_id_++, length, kind});
    cached_ += length;
}

PrefillStats SessionCache::record(const PrefillStats& s) {
    total_ += s;
    calls_.push_back({static_cast<int>(calls_.size()), s});
    return s;
}

const PrefillStats& SessionCache::prime(std::int64_t prompt_len, SegmentKind kind) {
    if (primed()) throw StateError("session " + session_id_ + " is already primed");
    if (prompt_len <= 0) throw ValidationError("prompt length must be positive");
    append(prompt_len, kind);
    PrefillStats s;
    s.new_tokens_processed = prompt_len;
    s.baseline_tokens = prompt_len;
    record(s);
    return total_;
}

PrefillStats SessionCache::extend(std::int64_t new_tokens, SegmentKind kind) {
    if (!primed()) throw StateError("session " + session_id_ + " is not primed");
    if (new_tokens < 0) throw ValidationError("token count must be non-negative");
    if (new_tokens == 0) return {};
    PrefillStats s;
    s.reused_tokens = cached_;
    s.new_tokens_processed = new_tokens;
    s.baseline_tokens = cached_ + new_tokens;
    append(new_tokens, kind);
    return record(s);
}

PrefillStats SessionCache::blend(const std::vector<InjectedSegment>& injected, std::int64_t new_tokens,
                                 double recompute_fraction) {
    if (!primed()) throw StateError("session " + session_id_ + " is not primed");
    if (!(recompute_fraction >= 0.0 && recompute_fraction <= 1.0)) {
        throw ValidationError("recompute fraction must lie in [0,1]");
    }
    if (new_tokens < 0) throw ValidationError("token count must be non-negative");
    std::int64_t reused = 0;
    for (const auto& seg : injected) {
        if (seg.length <= 0) throw ValidationError("injected segment length must be positive");
        reused += seg.length;
    }
    if (reused == 0 && new_tokens == 0) return {};
    PrefillStats s;
    s.reused_tokens = reused;
    s.recomputed_tokens = ceil_tokens(recompute_fraction * static_cast<double>(reused));
    s.new_tokens_processed = new_tokens;
    s.baseline_tokens = reused + new_tokens;
    for (const auto& seg : injected) append(seg.length, SegmentKind::Retrieved);
    if (new_tokens > 0) append(new_tokens, SegmentKind::History);
    return record(s);
}

CacheMetrics SessionCache::metrics(const TtftModel& model) const {
    if (!primed()) throw StateError("session " + session_id_ + " is not primed");
    CacheMetrics m;
    m.redundancy_avoided = total_.baseline_tokens - total_.processed();
    m.speedup_factor = static_cast<double>(total_.baseline_tokens) / static_cast<double>(total_.processed());
    m.ttft_model = model.alpha + model.beta * static_cast<double>(calls_.back().stats.processed());
    return m;
}

std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::Lossless: return "Lossless";
        case Tier::High: return "High";
        case Tier::Medium: return "Medium";
        case Tier::Low: return "Low";
    }
    return "?";
}

const std::vector<EncodingTier>& default_tiers() {
    static const std::vector<EncodingTier> tiers{{Tier::Lossless, 64.0, 0.0},
                                                 {Tier::High, 32.0, 0.02},
                                                 {Tier::Medium, 16.0, 0.08},
                                                 {Tier::Low, 8.0, 0.2}};
    return tiers;
}

void validate_tiers(const std::vector<EncodingTier>& tiers) {
    for (size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        if (!(t.bytes_per_token > 0.0)) throw ValidationError("bytes per token must be positive");
        if (!(t.quality_penalty >= 0.0 && t.quality_penalty <= 1.0)) {
            throw ValidationError("quality penalty must lie in [0,1]");
        }
        if (i == 0) continue;
        const auto& prev = tiers[i - 1];
        if (static_cast<int>(t.tier) <= static_cast<int>(prev.tier)) throw ValidationError("tiers out of order");
        if (!(t.bytes_per_token < prev.bytes_per_token)) {
            throw ValidationError("bytes per token must fall from tier to tier");
        }
        if (t.quality_penalty < prev.quality_penalty) throw ValidationError("quality penalty must not fall");
    }
}

std::int64_t encode_size(std::int64_t segment_len, const EncodingTier& tier) {
    if (segment_len < 0) throw ValidationError("segment length must be non-negative");
    if (!(tier.bytes_per_token > 0.0)) throw ValidationError("bytes per token must be positive");
    return ceil_tokens(static_cast<double>(segment_len) * tier.bytes_per_token);
}

std::string metrics_jsonl(const SessionCache& cache) {
    std::ostringstream out;
    for (const auto& c : cache.calls()) {
        nlohmann::json j{{"session_id", cache.session_id()},
                         {"call_index", c.call_index},
                         {"reused", c.stats.reused_tokens},
                         {"processed", c.stats.processed()},
                         {"baseline", c.stats.baseline_tokens}};
        const auto s = c.speedup();
        j["speedup"] = s ? nlohmann::json(*s) : nlohmann::json(nullptr);
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace pulse::cache
