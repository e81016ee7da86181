#include "pulse/service/config.hpp"

#include "pulse/error.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#ifndef PULSE_DEFAULT_DATA_DIR
#define PULSE_DEFAULT_DATA_DIR "data"
#endif

namespace pulse::service {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ValidationError("unknown config key '" + where + k + "'");
    }
}

void read_list(const json& j, const char* key, std::vector<std::string>& out) {
    if (j.contains(key)) out = j.at(key).get<std::vector<std::string>>();
}

}  // namespace

std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir) {
    if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
    if (const char* env = std::getenv("PULSE_DATA_DIR"); env && *env) return env;
    return PULSE_DEFAULT_DATA_DIR;
}

ServiceConfig config_from_json(const json& j, ServiceConfig c) {
    try {
        reject_unknown(j,
                       {"event_log", "seed_patients", "cohort", "dialogue", "rubric", "answered_confidence",
                        "stable_slope_per_day", "default_flow", "flows", "scheduler", "cache", "econ", "server"},
                       "");
        if (j.contains("event_log")) {
            const auto v = j.at("event_log");
            c.event_log = v.is_null() ? std::nullopt : std::optional<std::filesystem::path>(v.get<std::string>());
        }
        c.seed_patients = j.value("seed_patients", c.seed_patients);
        c.cohort = j.value("cohort", c.cohort);
        c.answered_confidence = j.value("answered_confidence", c.answered_confidence);
        c.stable_slope_per_day = j.value("stable_slope_per_day", c.stable_slope_per_day);
        c.default_flow = j.value("default_flow", c.default_flow);
        read_list(j, "flows", c.flows);
        if (j.contains("dialogue")) {
            const auto& d = j.at("dialogue");
            reject_unknown(d, {"confidence_threshold", "max_clarifications", "silence_budget"}, "dialogue.");
            c.dialogue.confidence_threshold = d.value("confidence_threshold", c.dialogue.confidence_threshold);
            c.dialogue.max_clarifications = d.value("max_clarifications", c.dialogue.max_clarifications);
            c.dialogue.silence_budget = d.value("silence_budget", c.dialogue.silence_budget);
        }
        if (j.contains("rubric")) {
            const auto& r = j.at("rubric");
            reject_unknown(r,
                           {"rating_band", "pain_severe", "pain_mild", "pain_moderate", "stool_formed",
                            "stool_liquid", "eq5d_extreme", "eq5d_some", "eq5d_none", "wellbeing_0",
                            "wellbeing_1", "wellbeing_2", "wellbeing_3", "wellbeing_4"},
                           "rubric.");
            auto& k = c.rubric;
            k.rating_band = r.value("rating_band", k.rating_band);
            read_list(r, "pain_severe", k.pain_severe);
            read_list(r, "pain_mild", k.pain_mild);
            read_list(r, "pain_moderate", k.pain_moderate);
            read_list(r, "stool_formed", k.stool_formed);
            read_list(r, "stool_liquid", k.stool_liquid);
            read_list(r, "eq5d_extreme", k.eq5d_extreme);
            read_list(r, "eq5d_some", k.eq5d_some);
            read_list(r, "eq5d_none", k.eq5d_none);
            read_list(r, "wellbeing_0", k.wellbeing_0);
            read_list(r, "wellbeing_1", k.wellbeing_1);
            read_list(r, "wellbeing_2", k.wellbeing_2);
            read_list(r, "wellbeing_3", k.wellbeing_3);
            read_list(r, "wellbeing_4", k.wellbeing_4);
            if (!(k.rating_band > 0.0)) throw ValidationError("rubric.rating_band must be positive");
        }
        if (j.contains("scheduler")) {
            const auto& s = j.at("scheduler");
            reject_unknown(s, {"capacity", "queue_band", "period_minutes", "horizon"}, "scheduler.");
            c.capacity = s.value("capacity", c.capacity);
            c.queue_band = s.value("queue_band", c.queue_band);
            c.period_minutes = s.value("period_minutes", c.period_minutes);
            c.horizon = s.value("horizon", c.horizon);
        }
        if (j.contains("cache")) {
            const auto& s = j.at("cache");
            reject_unknown(s, {"token_budget", "system_prompt_tokens", "alpha", "beta"}, "cache.");
            c.cache_budget = s.value("token_budget", c.cache_budget);
            c.system_prompt_tokens = s.value("system_prompt_tokens", c.system_prompt_tokens);
            c.ttft.alpha = s.value("alpha", c.ttft.alpha);
            c.ttft.beta = s.value("beta", c.ttft.beta);
        }
        if (j.contains("econ")) c.econ = j.at("econ");
        if (j.contains("server")) {
            const auto& s = j.at("server");
            reject_unknown(s, {"host", "port", "api_token"}, "server.");
            c.host = s.value("host", c.host);
            c.port = s.value("port", c.port);
            c.api_token = s.value("api_token", c.api_token);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad config: ") + e.what());
    }
    if (c.capacity <= 0 || c.queue_band < 0 || c.period_minutes <= 0 || c.horizon < 1) {
        throw ValidationError("scheduler settings out of range");
    }
    if (c.cache_budget <= 0 || c.system_prompt_tokens <= 0) throw ValidationError("cache settings must be positive");
    if (c.port < 0 || c.port > 65535) throw ValidationError("server.port out of range");
    return c;
}

ServiceConfig load_config(const std::filesystem::path& path, ServiceConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, std::move(base));
}

}  // namespace pulse::service
