#pragma once

#include "pulse/time.hpp"

#include "json.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

namespace pulse::service {

enum class EventKind {
    PatientUpserted,
    CallPlanned,
    CallStarted,
    TurnRecorded,
    SessionClosed,
    AssessmentStored,
    AlertRaised,
    AlertAcknowledged,
};

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view name);

struct EventRecord {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::PatientUpserted;
    nlohmann::json payload;
    Timestamp at{};

    bool operator==(const EventRecord&) const = default;
};

nlohmann::json to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);

/// Append-only event log, one JSON record per line. With an empty path the
/// log lives in memory only.
class EventLog {
public:
    explicit EventLog(std::optional<std::filesystem::path> path = std::nullopt);

    /// Reads every record in a log file. Throws ParseError naming the line of a
    /// malformed record and StorageError when seq does not strictly increase.
    static std::vector<EventRecord> read(const std::filesystem::path& path);

    /// Assigns consecutive seq numbers, writes the batch as one flush and
    /// returns the stored records. Throws StorageError on a write failure, in
    /// which case nothing is recorded.
    std::vector<EventRecord> append(const std::vector<std::pair<EventKind, nlohmann::json>>& batch, Timestamp at);

    std::uint64_t last_seq() const;
    const std::optional<std::filesystem::path>& path() const { return path_; }

    /// Test hook: called before each batch is written; throwing StorageError
    /// from it simulates a failed write.
    void set_fault_hook(std::function<void(const std::vector<EventRecord>&)> hook);

private:
    std::optional<std::filesystem::path> path_;
    mutable std::mutex mu_;
    std::uint64_t last_seq_ = 0;
    std::function<void(const std::vector<EventRecord>&)> fault_hook_;
};

}  // namespace pulse::service
