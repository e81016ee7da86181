#pragma once

#include "pulse/dialogue/engine.hpp"
#include "pulse/survey/consolidate.hpp"
#include "pulse/survey/instrument_io.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace pulse::test {

inline std::filesystem::path data_dir() { return PULSE_TEST_DATA_DIR; }

inline survey::Instrument instrument(const std::string& id) {
    return survey::load_instrument_file(data_dir() / "instruments" / (id + ".instrument"));
}

inline survey::ConsolidatedFlow golden_flow() {
    return survey::consolidate({instrument("mhbi"), instrument("eq5d3l")});
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

inline std::vector<std::string> golden_script() {
    return read_lines(data_dir() / "scripts" / "golden_call.txt");
}

inline survey::PatientProfile patient(const std::string& id = "p-craig") {
    survey::PatientProfile p;
    p.id = id;
    p.display_name = "Craig";
    p.timezone = "America/New_York";
    p.language = "en-US";
    p.allowed_call_window = {9 * 60, 17 * 60};
    return p;
}

inline std::shared_ptr<const dialogue::ResponseGenerator> default_generator() {
    static auto gen = std::make_shared<dialogue::ScriptedGenerator>(
        dialogue::ScriptedGenerator::load(data_dir() / "generator" / "default.generator"));
    return gen;
}

inline Timestamp t0() { return Timestamp{std::chrono::seconds{1'760'000'000}}; }

/// Runs a scripted conversation to the end and closes it.
inline survey::ConversationTranscript converse(const survey::ConsolidatedFlow& flow,
                                               const std::vector<std::string>& script,
                                               const std::string& session_id = "golden",
                                               Timestamp start = t0()) {
    dialogue::DialogueEngine engine(default_generator(), {}, stepping_clock(start, std::chrono::seconds{4}));
    auto [state, first] = engine.start_session(patient(), flow, session_id);
    for (const auto& u : script) {
        if (state.finished) break;
        engine.advance(state, u);
    }
    const auto status = state.escalation_requested ? survey::CompletionStatus::Escalated
                        : state.status == dialogue::SessionStatus::WrapUp
                            ? survey::CompletionStatus::Completed
                            : survey::CompletionStatus::Abandoned;
    return engine.close_session(state, status);
}

/// Small deterministic generator for property tests (splitmix64).
class Gen {
public:
    explicit Gen(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1)); }
    double real(double lo, double hi) { return lo + (hi - lo) * (next() >> 11) * (1.0 / 9007199254740992.0); }
    bool coin() { return next() & 1; }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[next() % v.size()]; }

private:
    uint64_t state_;
};

}  // namespace pulse::test
