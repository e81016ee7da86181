#include "doctest.h"
#include "support.hpp"

#include "pulse/error.hpp"
#include "pulse/extraction/serialization.hpp"
#include "pulse/service/http_api.hpp"
#include "pulse/service/json_io.hpp"
#include "pulse/service/service.hpp"

#include "httplib.h"

#include <cmath>
#include <cstdlib>
#include <thread>

using namespace pulse;
using namespace pulse::service;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int n = 0;
        path = std::filesystem::temp_directory_path() /
               ("pulse-test-" + std::to_string(::getpid()) + "-" + std::to_string(++n));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

ServiceConfig config(std::optional<std::filesystem::path> log = std::nullopt) {
    ServiceConfig c;
    c.data_dir = test::data_dir();
    c.event_log = std::move(log);
    return c;
}

Clock test_clock() { return stepping_clock(test::t0(), std::chrono::seconds{4}); }

Cohort pilot() { return load_cohort(test::data_dir() / "fixtures" / "pilot_cohort.json"); }

}  // namespace

TEST_CASE("golden call through the service") {
    Service svc(config(), test_clock());
    const auto out = svc.run_call("p-craig", std::nullopt, test::golden_script());
    CHECK(out.transcript.flow_id == "mhbi+eq5d3l");
    CHECK(out.transcript.turns.size() == 19);
    const auto& a = out.assessment;
    CHECK(a.mhbi == std::map<std::string, int>{{"LiquidStools", 3}, {"AbdominalPain", 2},
                                                {"GeneralWellbeing", 3}, {"AdditionalManifestations", 2}});
    CHECK(a.eq5d == std::map<std::string, int>{{"Mobility", 2}, {"SelfCare", 2}, {"UsualActivities", 2},
                                                {"PainDiscomfort", 2}, {"AnxietyDepression", 2}});
    CHECK(a.health_scale == 25);
    CHECK(a.recommended_action == extraction::RecommendedAction::Callback);
    REQUIRE(out.alerts.size() == 1);
    CHECK(out.alerts[0].alert.severity == extraction::AlertSeverity::Callback);

    const auto snap = svc.snapshot();
    CHECK(snap->assessments.at(out.transcript.session_id).result == a);
    CHECK(snap->alerts.size() == 1);
    // The stored transcript and the same conversation run directly agree turn for turn.
    CHECK(snap->sessions.at(out.transcript.session_id).transcript->turns.size() == 19);
}

TEST_CASE("empty script leaves only the opening turn") {
    Service svc(config(), test_clock());
    const auto out = svc.run_call("p-craig", "mhbi", {});
    REQUIRE(out.transcript.turns.size() == 1);
    CHECK(out.transcript.turns[0].speaker == survey::Speaker::Agent);
    CHECK(out.transcript.completion_status == survey::CompletionStatus::Abandoned);
    CHECK(out.assessment.mhbi.empty());
    CHECK(out.alerts.empty());
}

TEST_CASE("unknown ids") {
    Service svc(config(), test_clock());
    CHECK_THROWS_AS(svc.run_call("nobody", std::nullopt, {}), NotFound);
    CHECK_THROWS_AS(svc.run_call("p-craig", "mhbi+nope", {}), NotFound);
    CHECK_THROWS_AS(svc.acknowledge_alert("x", "dr"), NotFound);
    CHECK_THROWS_AS(svc.trends("nobody", std::nullopt), NotFound);
    CHECK_THROWS_AS(svc.completeness(std::nullopt), NotFound);
}

TEST_CASE("per-turn cache ledger") {
    Service svc(config(), test_clock());
    const std::vector<std::string> script{"About 40 I guess", "Mild cramps", "Three times", "No", "No"};
    const auto out = svc.run_call("p-craig", "mhbi", script);
    // Hand ledger: prime the system prompt, then one extend per turn.
    std::int64_t cached = svc.config().system_prompt_tokens;
    std::int64_t baseline = cached, processed = cached;
    for (const auto& t : out.transcript.turns) {
        const auto n = static_cast<std::int64_t>((t.text.size() + 3) / 4);
        if (n == 0) continue;
        baseline += cached + n;
        processed += n;
        cached += n;
    }
    CHECK(out.cache.stats().baseline_tokens == baseline);
    CHECK(out.cache.stats().processed() == processed);
    CHECK(out.cache.cached_prefix_len() == cached);
    CHECK(out.cache.metrics().speedup_factor > 1.0);
    CHECK(out.cache.metrics().speedup_factor == static_cast<double>(baseline) / static_cast<double>(processed));
    CHECK(out.cache.calls().size() == out.transcript.turns.size() + 1);
}

TEST_CASE("storage failure mid-call closes the session as abandoned") {
    TempDir dir;
    Service svc(config(dir.path / "events.jsonl"), test_clock());
    int turn_batches = 0;
    svc.store().log().set_fault_hook([&](const std::vector<EventRecord>& batch) {
        if (batch.front().kind == EventKind::TurnRecorded && ++turn_batches == 4) {
            throw StorageError("disk full");
        }
    });
    const auto out = svc.run_call("p-craig", std::nullopt, test::golden_script());
    CHECK(out.storage_failed);
    CHECK(out.transcript.completion_status == survey::CompletionStatus::Abandoned);
    CHECK(out.transcript.turns.size() == 5);  // opening turn plus the two exchanges stored before the fault
    const auto snap = svc.snapshot();
    CHECK(snap->sessions.at(out.transcript.session_id).transcript->turns.size() == 5);
    CHECK(state_hash(replay(EventLog::read(dir.path / "events.jsonl"))) == state_hash(*snap));
}

TEST_CASE("replaying the log reproduces the live state") {
    TempDir dir;
    const auto log = dir.path / "events.jsonl";
    std::string live;
    {
        Service svc(config(log), test_clock());
        svc.run_call("p-craig", std::nullopt, test::golden_script());
        svc.run_call("p-demo", "eq5d3l", {"I can walk fine", "I'm independent", "Work is okay"});
        PlanRequest req;
        req.start = parse_utc("2025-01-15T00:00:00Z");
        svc.plan_calls(req);
        svc.acknowledge_alert(svc.snapshot()->alerts.front().alert_id, "dr-who");
        live = state_hash(*svc.snapshot());
    }
    CHECK(state_hash(replay(EventLog::read(log))) == live);
    // Reopening the store replays too, and the seed patients are not added twice.
    Service again(config(log), test_clock());
    CHECK(state_hash(*again.snapshot()) == live);
}

TEST_CASE("replay property over random operation sequences") {
    test::Gen g(51);
    const auto cohort = pilot();
    for (int round = 0; round < 8; ++round) {
        TempDir dir;
        const auto log = dir.path / "events.jsonl";
        Service svc(config(log), stepping_clock(test::t0() + std::chrono::hours{round}, std::chrono::seconds{3}));
        const int ops = g.uniform(1, 8);
        for (int i = 0; i < ops; ++i) {
            switch (g.uniform(0, 4)) {
                case 0: svc.upsert_patient(g.pick(cohort.patients)); break;
                case 1: {
                    const auto& call = g.pick(cohort.calls);
                    svc.upsert_patient(*std::find_if(cohort.patients.begin(), cohort.patients.end(),
                                                     [&](const auto& p) { return p.id == call.patient_id; }));
                    svc.run_call(call.patient_id, cohort.flow_id, call.script);
                    break;
                }
                case 2: svc.run_call("p-craig", std::nullopt, test::golden_script()); break;
                case 3: {
                    PlanRequest req;
                    req.start = test::t0();
                    req.capacity = g.uniform(1, 3);
                    svc.plan_calls(req);
                    break;
                }
                default:
                    const auto snap = svc.snapshot();
                    for (const auto& a : snap->alerts) {
                        if (!a.acknowledged) {
                            svc.acknowledge_alert(a.alert_id, "nurse");
                            break;
                        }
                    }
            }
        }
        CHECK(state_hash(replay(EventLog::read(log))) == state_hash(*svc.snapshot()));
    }
}

TEST_CASE("event log rejects corrupt files") {
    TempDir dir;
    const auto log = dir.path / "events.jsonl";
    {
        std::ofstream out(log);
        out << R"({"seq":1,"kind":"PatientUpserted","at":"2025-01-01T00:00:00Z","payload":{"id":"a"}})" << '\n';
        out << "{not json\n";
    }
    try {
        EventLog::read(log);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    {
        std::ofstream out(log);
        out << R"({"seq":2,"kind":"PatientUpserted","at":"2025-01-01T00:00:00Z","payload":{"id":"a"}})" << '\n';
        out << R"({"seq":2,"kind":"PatientUpserted","at":"2025-01-01T00:00:00Z","payload":{"id":"b"}})" << '\n';
    }
    CHECK_THROWS_AS(EventLog::read(log), StorageError);
    State s;
    CHECK_THROWS_AS(apply(s, {1, EventKind::TurnRecorded, {{"session_id", "nope"}}, test::t0()}), StateError);
}

TEST_CASE("alerts and acknowledgement") {
    Service svc(config(), test_clock());
    svc.run_call("p-craig", std::nullopt, test::golden_script());
    const auto id = svc.snapshot()->alerts.at(0).alert_id;
    const auto acked = svc.acknowledge_alert(id, "dr-lee");
    CHECK(acked.acknowledged);
    CHECK(acked.acknowledged_by == "dr-lee");
    CHECK_THROWS_AS(svc.acknowledge_alert(id, "dr-lee"), StateError);
}

TEST_CASE("trend over three stored assessments") {
    // One call per day: the clock jumps a day between calls.
    Timestamp now = test::t0();
    Service svc(config(), [&now] { return now += std::chrono::seconds{1}; });
    const std::vector<int> ratings{20, 50, 80};
    for (int r : ratings) {
        svc.run_call("p-craig", "mhbi", {"I'd say " + std::to_string(r)});
        now += std::chrono::hours{24};
    }
    const auto trends = svc.trends("p-craig", std::string("HealthScale"));
    REQUIRE(trends.size() == 1);
    const auto& t = trends[0];
    REQUIRE(t.series.size() == 3);
    // Hand least squares on (day, rating).
    double mx = 0, my = 0;
    std::vector<double> xs, ys;
    for (const auto& [ts, v] : t.series) {
        xs.push_back(std::chrono::duration<double>(ts - t.series[0].first).count() / 86400.0);
        ys.push_back(v);
    }
    for (size_t i = 0; i < 3; ++i) mx += xs[i] / 3, my += ys[i] / 3;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < 3; ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    CHECK(t.slope == doctest::Approx(sxy / sxx));
    CHECK(t.direction == extraction::TrendDirection::Improving);
    CHECK(svc.trends("p-craig", std::nullopt).size() >= 1);
    CHECK_THROWS_AS(svc.trends("p-craig", std::string("Height")), ValidationError);
}

TEST_CASE("preference analytics") {
    const auto d = preference_analytics(pilot().preferences);
    CHECK(d.respondents == 33);
    const std::map<Preference, double> want{{Preference::AI, .37},   {Preference::Zoom, .24},
                                            {Preference::Both, .18}, {Preference::NoPreference, .15},
                                            {Preference::Human, .03}, {Preference::Neither, .03}};
    for (const auto& [p, v] : want) CHECK(d.share.at(p) == doctest::Approx(v).epsilon(1e-12));
    CHECK(d.acceptance == doctest::Approx(.70).epsilon(1e-12));

    const auto one = preference_analytics({{"a", Preference::Zoom, 1}, {"b", Preference::Zoom, 2}});
    CHECK(one.share.at(Preference::Zoom) == 1.0);
    CHECK(one.acceptance == 0.0);

    std::vector<PreferenceResponse> uniform;
    for (auto p : kPreferences) uniform.push_back({"x", p, 1.0});
    const auto u = preference_analytics(uniform);
    for (auto p : kPreferences) CHECK(u.share.at(p) == doctest::Approx(1.0 / 6));
    CHECK(u.acceptance == doctest::Approx(0.5));

    CHECK_THROWS_AS(preference_analytics({}), ValidationError);
    CHECK_THROWS_AS(preference_analytics({{"a", Preference::AI, 0}}), ValidationError);
    CHECK_THROWS_AS(preference_analytics({{"a", Preference::AI, -1}}), ValidationError);
    CHECK_THROWS_AS(preference_from_string("Carrier pigeon"), ValidationError);
}

TEST_CASE("pilot cohort completeness") {
    Service svc(config(), test_clock());
    const auto summary = svc.import_cohort(pilot());
    CHECK(summary.patients == 33);
    CHECK(summary.calls == 18);
    const auto r = svc.completeness(std::string("pulse_pilot"));
    using survey::Category;
    for (auto c : {Category::DailyActivities, Category::DailyLifeImpact}) {
        REQUIRE(r.find(c));
        CHECK(r.find(c)->asked == 18);
        CHECK(r.find(c)->answered == 17);
    }
    for (auto c : {Category::ResearchSolutions, Category::EnvironmentalTriggers, Category::TreatmentFeedback}) {
        REQUIRE(r.find(c));
        CHECK(r.find(c)->answered == 1);
        CHECK(r.find(c)->rate < 0.10);
    }
    CHECK(r.categories.front().rate == doctest::Approx(17.0 / 18));
    const auto snap = svc.snapshot();
    for (const auto& [id, s] : snap->sessions) {
        CHECK(s.transcript->completion_status == survey::CompletionStatus::Completed);
    }
}

TEST_CASE("service plans calls from stored patients") {
    Service svc(config(), test_clock());
    auto narrow = test::patient("p-narrow");
    narrow.allowed_call_window = {3 * 60, 3 * 60 + 30};  // 03:00-03:30 local: no hourly period starts inside
    narrow.allowed_call_window.start_minute = 3 * 60 + 10;
    svc.upsert_patient(narrow);
    PlanRequest req;
    req.start = parse_utc("2025-01-15T00:00:00Z");
    const auto rec = svc.plan_calls(req);
    CHECK(rec.plan_id == "plan-1");
    CHECK(rec.plan.slots.size() == 2);
    CHECK(rec.plan.unplaced == std::vector<std::string>{"p-narrow"});
    req.patient_ids = {"ghost"};
    CHECK_THROWS_AS(svc.plan_calls(req), NotFound);
}

TEST_CASE("wire formats round-trip") {
    auto p = test::patient();
    p.cohort_tags = {"a", "b"};
    CHECK(patient_from_json(to_json(p)) == p);
    CHECK_THROWS_AS(patient_from_json(json{{"id", "x"}, {"timezone", "Nowhere/Land"}}), ValidationError);
    CHECK_THROWS_AS(patient_from_json(json{{"id", "x"}, {"allowed_call_window", {{"start", "9am"}, {"end", "17:00"}}}}),
                    ValidationError);
    const auto t = test::converse(test::golden_flow(), test::golden_script());
    CHECK(transcript_from_json(to_json(t)) == t);
    CHECK(transcript_from_json(json::parse(to_json(t).dump())) == t);
    sched::CallPlan plan{{{"p", test::t0(), 3}}, {2, 2}, {1, 0}, {"q"}};
    const auto back = plan_from_json(to_json(plan));
    CHECK(back.slots.size() == 1);
    CHECK(back.slots[0].start == test::t0());
    CHECK(back.unplaced == plan.unplaced);
    EventRecord e{7, EventKind::AlertAcknowledged, {{"alert_id", "x"}}, test::t0()};
    CHECK(event_from_json(json::parse(to_json(e).dump())) == e);
    CHECK(parse_minute("24:00") == 1440);
    CHECK_THROWS_AS(parse_minute("24:01"), ValidationError);
}

TEST_CASE("config loading") {
    auto c = load_config(test::data_dir() / "config" / "default.json");
    CHECK(c.capacity == 4);
    CHECK_FALSE(c.event_log.has_value());
    CHECK(c.default_flow == "mhbi+eq5d3l");
    CHECK_THROWS_AS(config_from_json(json{{"capcity", 3}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"dialogue", {{"threshold", 1}}}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"scheduler", {{"capacity", 0}}}}), ValidationError);
    c = config_from_json(json{{"rubric", {{"pain_severe", {"brutal"}}}}, {"event_log", nullptr}});
    CHECK(c.rubric.pain_severe == std::vector<std::string>{"brutal"});
    CHECK_FALSE(c.event_log.has_value());
    CHECK(resolve_data_dir(std::filesystem::path("/x")) == "/x");
    ::setenv("PULSE_DATA_DIR", "/from/env", 1);
    CHECK(resolve_data_dir() == "/from/env");
    ::unsetenv("PULSE_DATA_DIR");
    CHECK(std::filesystem::exists(resolve_data_dir() / "instruments"));
}

TEST_CASE("http api") {
    auto cfg = config();
    cfg.api_token = "s3cret";
    Service svc(cfg, test_clock());
    ApiServer api(svc);
    const int port = api.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread th([&] { api.listen(); });
    api.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    const httplib::Headers auth{{"Authorization", "Bearer s3cret"}};
    auto get = [&](const std::string& path) { return cli.Get(path, auth); };
    auto post = [&](const std::string& path, const json& body) {
        return cli.Post(path, auth, body.dump(), "application/json");
    };

    CHECK(cli.Get("/health")->status == 200);
    CHECK(cli.Get("/patients")->status == 401);

    auto r = get("/alerts");
    REQUIRE(r);
    CHECK(json::parse(r->body)["items"].empty());

    r = post("/calls", {{"patient_id", "p-craig"}, {"script", test::golden_script()}});
    REQUIRE(r->status == 201);
    const auto session = json::parse(r->body)["session_id"].get<std::string>();

    r = get("/assessments/" + session);
    REQUIRE(r->status == 200);
    const auto a = json::parse(r->body);
    CHECK(a["mhbi"]["LiquidStools"] == 3);
    CHECK(a["health_scale"] == 25);
    CHECK(a["tables"].get<std::string>().find("Liquid") != std::string::npos);

    r = get("/alerts?status=open");
    auto alerts = json::parse(r->body)["items"];
    REQUIRE(alerts.size() == 1);
    const auto alert_id = alerts[0]["alert_id"].get<std::string>();
    CHECK(post("/alerts/" + alert_id + "/ack", {{"by", "dr-lee"}})->status == 200);
    CHECK(post("/alerts/" + alert_id + "/ack", {{"by", "dr-lee"}})->status == 409);
    CHECK(json::parse(get("/alerts")->body)["items"].empty());
    CHECK(json::parse(get("/alerts?status=acknowledged")->body)["items"].size() == 1);

    CHECK(get("/transcripts/" + session)->status == 200);
    CHECK(get("/transcripts/nope")->status == 404);
    CHECK(get("/assessments/nope")->status == 404);
    CHECK(get("/patients?limit=0")->status == 400);
    CHECK(get("/patients?offset=abc")->status == 400);
    CHECK(json::parse(get("/patients?limit=1")->body)["items"].size() == 1);
    CHECK(json::parse(get("/patients?limit=1")->body)["total"] == 2);

    auto bad = cli.Put("/patients/p-craig", auth, R"({"timezone":"Mars/Base"})", "application/json");
    CHECK(bad->status == 400);
    auto ok = cli.Put("/patients/p-craig", auth, R"({"display_name":"Craig","language":"es-US","timezone":"America/Chicago"})",
                      "application/json");
    CHECK(ok->status == 200);
    CHECK(json::parse(get("/patients/p-craig")->body)["language"] == "es-US");

    CHECK(json::parse(get("/flows")->body)["items"].size() == 4);
    CHECK(json::parse(get("/flows/mhbi")->body)["steps"].size() == 5);
    CHECK(json::parse(get("/trends/p-craig")->body)["items"].size() >= 1);
    CHECK(json::parse(get("/cache/metrics?session=" + session)->body)["metrics"]["speedup_factor"] > 1.0);

    r = post("/plans", {{"start", "2025-01-15T00:00:00Z"}, {"capacity", 1}});
    REQUIRE(r->status == 201);
    CHECK(json::parse(r->body)["plan"]["slots"].size() == 2);
    CHECK(post("/plans", {{"capacity", 1}})->status == 400);

    r = post("/econ/simulate", {{"patients", 5}, {"periods", 4}});
    REQUIRE(r->status == 200);
    CHECK(json::parse(r->body)["trajectories"].size() == 5);
    CHECK(post("/econ/simulate", {{"dynamics", {{"noise", -1}}}})->status == 400);

    r = get("/analytics/preferences");
    CHECK(json::parse(r->body)["acceptance"].get<double>() == doctest::Approx(0.70));
    CHECK(get("/analytics/completeness")->status == 200);
    CHECK(get("/events")->status == 404);
    CHECK(post("/calls", {{"patient_id", "ghost"}})->status == 404);
    CHECK(cli.Post("/calls", auth, "{oops", "application/json")->status == 400);

    api.stop();
    th.join();
}
