#include "pulse/service/http_api.hpp"

#include "pulse/econ/report_io.hpp"
#include "pulse/error.hpp"
#include "pulse/extraction/serialization.hpp"
#include "pulse/service/json_io.hpp"

#include "httplib.h"

#include <algorithm>

namespace pulse::service {

using nlohmann::json;

namespace {

struct Page {
    size_t offset = 0;
    size_t limit = 50;
};

size_t parse_count(const httplib::Request& req, const char* key, size_t fallback) {
    if (!req.has_param(key)) return fallback;
    const auto text = req.get_param_value(key);
    if (text.empty() || text.size() > 9 || !std::all_of(text.begin(), text.end(), ::isdigit)) {
        throw ValidationError(std::string("query parameter '") + key + "' must be a non-negative integer");
    }
    return static_cast<size_t>(std::stoul(text));
}

Page page_of(const httplib::Request& req) {
    Page p;
    p.offset = parse_count(req, "offset", 0);
    p.limit = parse_count(req, "limit", 50);
    if (p.limit == 0 || p.limit > 500) throw ValidationError("limit must lie in 1..500");
    return p;
}

json paged(const std::vector<json>& items, const Page& p) {
    json out = json::array();
    for (size_t i = p.offset; i < items.size() && i < p.offset + p.limit; ++i) out.push_back(items[i]);
    return json{{"items", out}, {"total", items.size()}, {"offset", p.offset}, {"limit", p.limit}};
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("request body is not JSON: ") + e.what());
    }
}

void reply(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guard(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const NotFound& e) {
            reply(res, {{"error", e.what()}}, 404);
        } catch (const StateError& e) {
            reply(res, {{"error", e.what()}}, 409);
        } catch (const StorageError& e) {
            reply(res, {{"error", e.what()}}, 503);
        } catch (const Error& e) {
            reply(res, {{"error", e.what()}}, 400);
        } catch (const json::exception& e) {
            reply(res, {{"error", e.what()}}, 400);
        } catch (const std::exception& e) {
            reply(res, {{"error", e.what()}}, 500);
        }
    };
}

json alert_view(const AlertRecord& a) {
    auto j = extraction::to_json(a.alert);
    j["alert_id"] = a.alert_id;
    j["seq"] = a.seq;
    j["patient_id"] = a.patient_id;
    j["acknowledged"] = a.acknowledged;
    j["acknowledged_by"] = a.acknowledged_by;
    j["acknowledged_at"] = a.acknowledged_at ? json(format_utc(*a.acknowledged_at)) : json(nullptr);
    return j;
}

json plan_view(const PlanRecord& p) {
    return json{{"plan_id", p.plan_id}, {"seq", p.seq}, {"request", p.request}, {"plan", to_json(p.plan)}};
}

json assessment_view(const AssessmentRecord& r) {
    auto j = extraction::to_json(r.result);
    j["seq"] = r.seq;
    j["tables"] = extraction::format_tables(r.result);
    return j;
}

template <class M>
std::vector<const typename M::mapped_type*> by_seq(const M& m) {
    std::vector<const typename M::mapped_type*> out;
    for (const auto& [k, v] : m) out.push_back(&v);
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->seq < b->seq; });
    return out;
}

}  // namespace

ApiServer::ApiServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
    routes();
}

ApiServer::~ApiServer() = default;

bool ApiServer::mount_ui(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) return false;
    return server_->set_mount_point("/", dir.string());
}

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }
void ApiServer::stop() { server_->stop(); }
void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

void ApiServer::routes() {
    auto& s = *server_;
    Service& svc = service_;

    s.set_pre_routing_handler([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto& token = svc.config().api_token;
        if (token.empty() || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") == "Bearer " + token) {
            return httplib::Server::HandlerResponse::Unhandled;
        }
        reply(res, {{"error", "missing or wrong bearer token"}}, 401);
        return httplib::Server::HandlerResponse::Handled;
    });

    s.Get("/health", guard([&svc](const auto&, auto& res) {
        const auto snap = svc.snapshot();
        reply(res, {{"status", "ok"}, {"last_seq", snap->last_seq}, {"state_hash", state_hash(*snap)}});
    }));

    s.Get("/patients", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        std::vector<json> items;
        for (auto* r : by_seq(snap->patients)) items.push_back(to_json(r->profile));
        reply(res, paged(items, page_of(req)));
    }));
    s.Get("/patients/:id", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        const auto it = snap->patients.find(req.path_params.at("id"));
        if (it == snap->patients.end()) throw NotFound("unknown patient " + req.path_params.at("id"));
        reply(res, to_json(it->second.profile));
    }));
    s.Post("/patients", guard([&svc](const auto& req, auto& res) {
        reply(res, to_json(svc.upsert_patient(patient_from_json(body_of(req)))), 201);
    }));
    s.Put("/patients/:id", guard([&svc](const auto& req, auto& res) {
        auto body = body_of(req);
        if (!body.contains("id")) body["id"] = req.path_params.at("id");
        if (body["id"] != req.path_params.at("id")) throw ValidationError("body id does not match the path");
        reply(res, to_json(svc.upsert_patient(patient_from_json(body))));
    }));

    s.Get("/flows", guard([&svc](const auto&, auto& res) {
        json items = json::array();
        for (const auto& id : svc.config().flows) {
            const auto f = svc.catalog().flow(id);
            items.push_back({{"id", f.id}, {"source_instruments", f.source_instruments}, {"steps", f.steps.size()}});
        }
        reply(res, {{"items", items}, {"default", svc.config().default_flow}});
    }));
    s.Get("/flows/:id", guard([&svc](const auto& req, auto& res) {
        reply(res, to_json(svc.catalog().flow(req.path_params.at("id"))));
    }));

    s.Post("/calls", guard([&svc](const auto& req, auto& res) {
        const auto body = body_of(req);
        std::optional<std::string> flow;
        if (body.contains("flow_id") && !body["flow_id"].is_null()) flow = body["flow_id"].template get<std::string>();
        const auto outcome = svc.run_call(body.at("patient_id").template get<std::string>(), flow,
                                          body.value("script", std::vector<std::string>{}));
        reply(res, to_json(outcome, svc.config().ttft), 201);
    }));

    s.Get("/sessions", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        const auto patient = param(req, "patient");
        std::vector<json> items;
        for (auto* r : by_seq(snap->sessions)) {
            if (patient && r->patient_id != *patient) continue;
            items.push_back({{"session_id", r->session_id},
                             {"patient_id", r->patient_id},
                             {"flow_id", r->flow_id},
                             {"started_at", format_utc(r->started_at)},
                             {"turns", r->turns.size()},
                             {"completion_status", r->transcript ? json(survey::to_string(r->transcript->completion_status))
                                                                 : json(nullptr)}});
        }
        reply(res, paged(items, page_of(req)));
    }));
    s.Get("/transcripts/:session", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        const auto it = snap->sessions.find(req.path_params.at("session"));
        if (it == snap->sessions.end() || !it->second.transcript) {
            throw NotFound("no closed session " + req.path_params.at("session"));
        }
        reply(res, to_json(*it->second.transcript));
    }));

    s.Get("/assessments", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        const auto patient = param(req, "patient");
        std::vector<json> items;
        for (auto* r : by_seq(snap->assessments)) {
            if (!patient || r->result.patient_id == *patient) items.push_back(assessment_view(*r));
        }
        reply(res, paged(items, page_of(req)));
    }));
    s.Get("/assessments/:session", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        const auto it = snap->assessments.find(req.path_params.at("session"));
        if (it == snap->assessments.end()) throw NotFound("no assessment for " + req.path_params.at("session"));
        reply(res, assessment_view(it->second));
    }));

    s.Get("/alerts", guard([&svc](const auto& req, auto& res) {
        const auto status = param(req, "status").value_or("open");
        if (status != "open" && status != "acknowledged" && status != "all") {
            throw ValidationError("status must be open, acknowledged or all");
        }
        const auto snap = svc.snapshot();
        std::vector<json> items;
        for (const auto& a : snap->alerts) {
            if (status == "all" || (status == "open") != a.acknowledged) items.push_back(alert_view(a));
        }
        reply(res, paged(items, page_of(req)));
    }));
    s.Post("/alerts/:id/ack", guard([&svc](const auto& req, auto& res) {
        const auto body = body_of(req);
        reply(res, alert_view(svc.acknowledge_alert(req.path_params.at("id"), body.value("by", ""))));
    }));

    s.Get("/trends/:patient", guard([&svc](const auto& req, auto& res) {
        json items = json::array();
        for (const auto& t : svc.trends(req.path_params.at("patient"), param(req, "dimension"))) {
            items.push_back(extraction::to_json(t));
        }
        reply(res, {{"items", items}});
    }));

    s.Get("/plans", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        std::vector<json> items;
        for (const auto& p : snap->plans) items.push_back(plan_view(p));
        reply(res, paged(items, page_of(req)));
    }));
    s.Get("/plans/:id", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        for (const auto& p : snap->plans) {
            if (p.plan_id == req.path_params.at("id")) return reply(res, plan_view(p));
        }
        throw NotFound("unknown plan " + req.path_params.at("id"));
    }));
    s.Post("/plans", guard([&svc](const auto& req, auto& res) {
        reply(res, plan_view(svc.plan_calls(plan_request_from_json(body_of(req), svc.config()))), 201);
    }));

    s.Get("/cache/metrics", guard([&svc](const auto& req, auto& res) {
        const auto snap = svc.snapshot();
        if (const auto session = param(req, "session")) {
            const auto it = snap->caches.find(*session);
            if (it == snap->caches.end()) throw NotFound("no cache ledger for " + *session);
            return reply(res, to_json(it->second, svc.config().ttft));
        }
        std::vector<json> items;
        for (auto* r : by_seq(snap->sessions)) items.push_back(to_json(snap->caches.at(r->session_id), svc.config().ttft));
        reply(res, paged(items, page_of(req)));
    }));

    s.Post("/econ/simulate", guard([&svc](const auto& req, auto& res) {
        const auto base = econ::simulation_config_from_json(svc.config().econ);
        const auto cfg = econ::simulation_config_from_json(body_of(req), base);
        if (static_cast<std::int64_t>(cfg.patients) * cfg.periods > 5'000'000) {
            throw ValidationError("simulation too large for an API call");
        }
        const auto result = econ::simulate_cohort(cfg);
        auto out = econ::to_json(result, param(req, "samples").value_or("0") == "1");
        out["report_text"] = econ::format_cost_report(result.report);
        reply(res, out);
    }));

    s.Get("/analytics/preferences", guard([&svc](const auto&, auto& res) { reply(res, to_json(svc.preferences())); }));
    s.Get("/analytics/completeness", guard([&svc](const auto& req, auto& res) {
        reply(res, extraction::to_json(svc.completeness(param(req, "flow"))));
    }));

    s.Get("/events", guard([&svc](const auto& req, auto& res) {
        const auto after = parse_count(req, "after", 0);
        const auto& path = svc.store().log().path();
        if (!path) throw NotFound("the event log is in memory only");
        std::vector<json> items;
        for (const auto& e : EventLog::read(*path)) {
            if (e.seq > after) items.push_back(to_json(e));
        }
        reply(res, paged(items, page_of(req)));
    }));
}

}  // namespace pulse::service
