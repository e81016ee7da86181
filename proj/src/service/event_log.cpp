#include "pulse/service/event_log.hpp"

#include "pulse/error.hpp"

#include <array>
#include <fstream>

namespace pulse::service {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kNames{{
    {EventKind::PatientUpserted, "PatientUpserted"},
    {EventKind::CallPlanned, "CallPlanned"},
    {EventKind::CallStarted, "CallStarted"},
    {EventKind::TurnRecorded, "TurnRecorded"},
    {EventKind::SessionClosed, "SessionClosed"},
    {EventKind::AssessmentStored, "AssessmentStored"},
    {EventKind::AlertRaised, "AlertRaised"},
    {EventKind::AlertAcknowledged, "AlertAcknowledged"},
}};

}  // namespace

std::string_view to_string(EventKind k) {
    for (const auto& [kind, name] : kNames) {
        if (kind == k) return name;
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view name) {
    for (const auto& [kind, n] : kNames) {
        if (n == name) return kind;
    }
    throw ValidationError("unknown event kind '" + std::string(name) + "'");
}

json to_json(const EventRecord& e) {
    return json{{"seq", e.seq}, {"kind", to_string(e.kind)}, {"at", format_utc(e.at)}, {"payload", e.payload}};
}

EventRecord event_from_json(const json& j) {
    try {
        EventRecord e;
        e.seq = j.at("seq").get<std::uint64_t>();
        e.kind = event_kind_from_string(j.at("kind").get<std::string>());
        e.at = parse_utc(j.at("at").get<std::string>());
        e.payload = j.at("payload");
        return e;
    } catch (const json::exception& ex) {
        throw ValidationError(std::string("malformed event: ") + ex.what());
    }
}

EventLog::EventLog(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
    if (path_ && std::filesystem::exists(*path_)) {
        const auto records = read(*path_);
        if (!records.empty()) last_seq_ = records.back().seq;
    }
}

std::vector<EventRecord> EventLog::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open event log " + path.string());
    std::vector<EventRecord> out;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        EventRecord e;
        try {
            e = event_from_json(json::parse(line));
        } catch (const json::exception& ex) {
            throw ParseError(ex.what(), line_no, "");
        } catch (const ValidationError& ex) {
            throw ParseError(ex.what(), line_no, "");
        }
        if (!out.empty() && e.seq <= out.back().seq) {
            throw StorageError("event log seq does not increase at line " + std::to_string(line_no));
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<EventRecord> EventLog::append(const std::vector<std::pair<EventKind, json>>& batch, Timestamp at) {
    std::lock_guard lock(mu_);
    std::vector<EventRecord> records;
    std::uint64_t seq = last_seq_;
    for (const auto& [kind, payload] : batch) records.push_back({++seq, kind, payload, at});
    if (fault_hook_) fault_hook_(records);
    if (path_) {
        std::string text;
        for (const auto& r : records) text += to_json(r).dump() + '\n';
        std::ofstream out(*path_, std::ios::app | std::ios::binary);
        if (!out) throw StorageError("cannot open event log " + path_->string());
        out << text;
        out.flush();
        if (!out) throw StorageError("write to event log " + path_->string() + " failed");
    }
    last_seq_ = seq;
    return records;
}

std::uint64_t EventLog::last_seq() const {
    std::lock_guard lock(mu_);
    return last_seq_;
}

void EventLog::set_fault_hook(std::function<void(const std::vector<EventRecord>&)> hook) {
    std::lock_guard lock(mu_);
    fault_hook_ = std::move(hook);
}

}  // namespace pulse::service
