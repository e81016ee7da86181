#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::cache {

enum class SegmentKind { SystemPrompt, History, Retrieved };

std::string_view to_string(SegmentKind k);
SegmentKind segment_kind_from_string(std::string_view name);

struct Segment {
    std::uint64_t id = 0;
    std::int64_t length = 0;
    SegmentKind kind = SegmentKind::History;
};

/// Token counts for one call, or summed over a session.
struct PrefillStats {
    std::int64_t reused_tokens = 0;
    std::int64_t new_tokens_processed = 0;
    std::int64_t recomputed_tokens = 0;
    /// What the same call would process with no cache at all.
    std::int64_t baseline_tokens = 0;

    std::int64_t processed() const { return new_tokens_processed + recomputed_tokens; }
    PrefillStats& operator+=(const PrefillStats& o);
    bool operator==(const PrefillStats&) const = default;
};

struct CallRecord {
    int call_index = 0;
    PrefillStats stats;
    /// baseline / processed; empty when the call processed nothing.
    std::optional<double> speedup() const;
};

struct InjectedSegment {
    std::int64_t length = 0;
    std::string origin;  ///< cache the segment was copied from
};

/// Linear time-to-first-token model in abstract milliseconds.
struct TtftModel {
    double alpha = 50.0;
    double beta = 0.5;
};

struct CacheMetrics {
    std::int64_t redundancy_avoided = 0;  ///< baseline minus processed, summed
    double speedup_factor = 1.0;          ///< summed baseline / summed processed
    double ttft_model = 0.0;              ///< alpha + beta * processed tokens of the last call
};

/// Token ledger of one conversation's prefix cache. Not thread-safe: one
/// writer per session.
class SessionCache {
public:
    explicit SessionCache(std::string session_id);

    const std::string& session_id() const { return session_id_; }
    bool primed() const { return !segments_.empty(); }
    std::int64_t cached_prefix_len() const { return cached_; }
    const std::vector<Segment>& segments() const { return segments_; }
    const PrefillStats& stats() const { return total_; }
    const std::vector<CallRecord>& calls() const { return calls_; }

    /// Cold start: everything is processed. Throws ValidationError for
    /// prompt_len <= 0 and StateError when already primed.
    const PrefillStats& prime(std::int64_t prompt_len, SegmentKind kind = SegmentKind::SystemPrompt);

    /// Appends new tokens after the cached prefix, which is reused in full.
    /// Zero tokens is a no-op that records no call. Throws StateError when unprimed.
    PrefillStats extend(std::int64_t new_tokens, SegmentKind kind = SegmentKind::History);

    /// Injects segments cached elsewhere and recomputes ceil(fraction * injected)
    /// of them so their attention lines up with the new context; `new_tokens`
    /// are appended after them. The call's baseline is injected + new: the
    /// session's own prefix is outside this call's accounting.
    PrefillStats blend(const std::vector<InjectedSegment>& injected, std::int64_t new_tokens,
                       double recompute_fraction);

    CacheMetrics metrics(const TtftModel& model = {}) const;

private:
    void append(std::int64_t length, SegmentKind kind);
    PrefillStats record(const PrefillStats& s);

    std::string session_id_;
    std::vector<Segment> segments_;
    std::int64_t cached_ = 0;
    std::uint64_t next_id_ = 0;
    PrefillStats total_;
    std::vector<CallRecord> calls_;
};

enum class Tier { Lossless, High, Medium, Low };

std::string_view to_string(Tier t);

struct EncodingTier {
    Tier tier = Tier::Lossless;
    double bytes_per_token = 64.0;
    double quality_penalty = 0.0;
};

/// Lossless 64, High 32, Medium 16, Low 8 bytes per token.
const std::vector<EncodingTier>& default_tiers();

/// Tiers must be listed Lossless to Low with strictly decreasing bytes per
/// token and nondecreasing penalty in [0,1]. Throws ValidationError.
void validate_tiers(const std::vector<EncodingTier>& tiers);

/// ceil(segment_len * bytes_per_token). Throws ValidationError for a negative
/// length or non-positive bytes per token.
std::int64_t encode_size(std::int64_t segment_len, const EncodingTier& tier);

/// One JSON object per call: session_id, call_index, reused, processed,
/// baseline, speedup (null when nothing was processed).
std::string metrics_jsonl(const SessionCache& cache);

}  // namespace pulse::cache
