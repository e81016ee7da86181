#include "pulse/cache/session_cache.hpp"
#include "pulse/econ/report_io.hpp"
#include "pulse/econ/simulation.hpp"
#include "pulse/error.hpp"
#include "pulse/extraction/assessment.hpp"
#include "pulse/extraction/serialization.hpp"
#include "pulse/sched/planner.hpp"
#include "pulse/service/http_api.hpp"
#include "pulse/service/json_io.hpp"
#include "pulse/service/service.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pulse;

namespace {

struct Common {
    std::string data_dir;
    std::string config;
    std::string store;
};

service::ServiceConfig make_config(const Common& c) {
    service::ServiceConfig base;
    base.data_dir = service::resolve_data_dir(c.data_dir.empty() ? std::nullopt : std::optional<fs::path>(c.data_dir));
    fs::path cfg = c.config;
    if (cfg.empty() && fs::exists(base.data_dir / "config" / "default.json")) cfg = base.data_dir / "config" / "default.json";
    auto out = cfg.empty() ? base : service::load_config(cfg, base);
    if (!c.store.empty()) out.event_log = fs::path(c.store);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw NotFound("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) {
    try {
        return json::parse(slurp(p));
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0, p.string());
    }
}

// A JSON array of strings, or one utterance per line. A line holding only "-"
// stands for silence.
std::vector<std::string> read_script(const fs::path& p) {
    const auto text = slurp(p);
    if (p.extension() == ".json") return json::parse(text).get<std::vector<std::string>>();
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        out.push_back(line == "-" ? "" : line);
    }
    return out;
}

service::ApiServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const Common& c, const std::string& host, int port, bool with_ui, const std::string& ui_dir) {
    auto cfg = make_config(c);
    if (!host.empty()) cfg.host = host;
    if (port >= 0) cfg.port = port;
    service::Service svc(cfg);
    service::ApiServer api(svc);
    if (with_ui) {
        const fs::path dir = ui_dir.empty() ? cfg.data_dir.parent_path() / "dashboard" / "dist" : fs::path(ui_dir);
        if (!api.mount_ui(dir)) std::cerr << "warning: no dashboard bundle at " << dir << ", serving the API only\n";
    }
    const int bound = api.bind(cfg.host, cfg.port);
    if (bound < 0) {
        std::cerr << "cannot bind " << cfg.host << ":" << cfg.port << "\n";
        return 1;
    }
    std::cout << "listening on http://" << cfg.host << ":" << bound << std::endl;
    g_server = &api;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    api.listen();
    g_server = nullptr;
    return 0;
}

int cmd_call(const Common& c, const std::string& patient, const std::string& script, const std::string& flow,
             bool as_json) {
    auto cfg = make_config(c);
    service::Service svc(cfg);
    const auto out = svc.run_call(patient, flow.empty() ? std::nullopt : std::optional<std::string>(flow),
                                  read_script(script));
    if (as_json) {
        std::cout << service::to_json(out, cfg.ttft).dump(2) << "\n";
        return out.storage_failed ? 3 : 0;
    }
    std::cout << "session " << out.transcript.session_id << "  " << survey::to_string(out.transcript.completion_status)
              << "  " << out.transcript.turns.size() << " turns\n\n";
    std::cout << extraction::format_tables(out.assessment) << "\n";
    for (const auto& a : out.alerts) {
        std::cout << "alert " << a.alert_id << " " << extraction::to_string(a.alert.severity) << ": "
                  << a.alert.trigger_text << "\n";
    }
    const auto m = out.cache.metrics();
    std::cout << "prefill speedup " << m.speedup_factor << "x over " << out.cache.calls().size() << " calls\n";
    if (out.storage_failed) {
        std::cerr << "storage failed; session closed with the turns stored so far\n";
        return 3;
    }
    return 0;
}

int cmd_plan(const Common& c, const std::string& start, int horizon, int capacity, int period,
             const std::string& forecast, const std::string& patients_file) {
    auto cfg = make_config(c);
    service::Service svc(cfg);
    json req{{"start", start.empty() ? format_utc(std::chrono::floor<std::chrono::hours>(system_clock()())) : start}};
    if (horizon > 0) req["horizon"] = horizon;
    if (capacity > 0) req["capacity"] = capacity;
    if (period > 0) req["period_minutes"] = period;
    if (!forecast.empty()) req["forecast"] = read_json(forecast);
    if (!patients_file.empty()) {
        std::vector<std::string> ids;
        for (const auto& p : read_json(patients_file)) ids.push_back(svc.upsert_patient(service::patient_from_json(p)).id);
        req["patient_ids"] = ids;
    }
    const auto rec = svc.plan_calls(service::plan_request_from_json(req, cfg));
    std::vector<survey::PatientProfile> profiles;
    const auto snap = svc.snapshot();
    for (const auto& [id, r] : snap->patients) profiles.push_back(r.profile);
    std::cout << sched::plan_csv(rec.plan, profiles);
    for (const auto& id : rec.plan.unplaced) std::cerr << "unplaced: " << id << "\n";
    return 0;
}

int cmd_econ(const Common& c, std::optional<std::uint64_t> seed, std::optional<int> patients,
             std::optional<int> periods, const std::string& config, const std::string& trajectories,
             const std::string& csv, bool as_json) {
    const auto cfg = make_config(c);
    auto sim = econ::simulation_config_from_json(cfg.econ);
    if (!config.empty()) sim = econ::simulation_config_from_json(read_json(config), sim);
    if (seed) sim.seed = *seed;
    if (patients) sim.patients = *patients;
    if (periods) sim.periods = *periods;
    econ::validate(sim);
    const auto result = econ::simulate_cohort(sim);
    if (!trajectories.empty()) std::ofstream(trajectories) << econ::trajectories_csv(result.trajectories);
    if (!csv.empty()) std::ofstream(csv) << econ::cost_report_csv(result.report);
    if (as_json) {
        std::cout << econ::to_json(result, false).dump(2) << "\n";
    } else {
        std::cout << econ::format_cost_report(result.report);
        std::cout << "mean readmissions per patient: " << result.mean_readmissions() << "\n";
    }
    return 0;
}

int cmd_cache(const Common& c, const std::string& session) {
    const auto cfg = make_config(c);
    if (!cfg.event_log) throw ValidationError("cache report needs --store pointing at an event log");
    service::Service svc(cfg);
    const auto snap = svc.snapshot();
    const auto it = snap->caches.find(session);
    if (it == snap->caches.end()) throw NotFound("no cache ledger for session " + session);
    std::cout << cache::metrics_jsonl(it->second);
    return 0;
}

int cmd_import(const Common& c, const std::string& cohort) {
    auto cfg = make_config(c);
    service::Service svc(cfg);
    const auto path = cohort.empty() ? cfg.data_dir / cfg.cohort : fs::path(cohort);
    const auto s = svc.import_cohort(service::load_cohort(path));
    std::cout << "imported " << s.patients << " patients and " << s.calls << " calls\n";
    if (!cfg.event_log) std::cout << "note: no --store given, nothing was persisted\n";
    return 0;
}

int cmd_analytics(const Common& c, const std::string& flow) {
    auto cfg = make_config(c);
    service::Service svc(cfg);
    if (svc.snapshot()->sessions.empty()) svc.import_cohort(service::load_cohort(cfg.data_dir / cfg.cohort));
    json out{{"preferences", service::to_json(svc.preferences())},
             {"completeness", extraction::to_json(svc.completeness(flow.empty() ? std::nullopt
                                                                                : std::optional<std::string>(flow)))}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patient check-in pipeline: scripted calls, scheduling, cache accounting and cost simulation"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--data-dir", common.data_dir, "Instruments, fixtures and config (default: $PULSE_DATA_DIR)");
    app.add_option("--config", common.config, "JSON config file");
    app.add_option("--store", common.store, "Event log file; state is kept in memory when omitted");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string host, ui_dir;
    int port = -1;
    bool with_ui = false;
    serve->add_option("--host", host);
    serve->add_option("--port", port, "0 picks a free port");
    serve->add_flag("--with-ui", with_ui, "Also serve the dashboard bundle");
    serve->add_option("--ui-dir", ui_dir);

    auto* call = app.add_subcommand("call", "Run one scripted call and print the assessment");
    std::string patient, script, flow;
    bool call_json = false;
    call->add_option("--patient", patient)->required();
    call->add_option("--script", script, "One utterance per line, or a JSON array")->required()->check(CLI::ExistingFile);
    call->add_option("--flow", flow);
    call->add_flag("--json", call_json);

    auto* schedule = app.add_subcommand("schedule", "Outbound call planning");
    schedule->require_subcommand(1);
    auto* plan = schedule->add_subcommand("plan", "Plan calls for stored patients and print CSV");
    std::string start, forecast, patients_file;
    int horizon = 0, capacity = 0, period = 0;
    plan->add_option("--start", start, "UTC start, ISO 8601 (default: this hour)");
    plan->add_option("--horizon", horizon);
    plan->add_option("--capacity", capacity);
    plan->add_option("--period", period, "Period length in minutes");
    plan->add_option("--forecast", forecast, "JSON {expected: [...], spike_multiplier}")->check(CLI::ExistingFile);
    plan->add_option("--patients", patients_file, "JSON array of patients to upsert and plan")->check(CLI::ExistingFile);

    auto* econ_cmd = app.add_subcommand("econ", "Cost model");
    econ_cmd->require_subcommand(1);
    auto* simulate = econ_cmd->add_subcommand("simulate", "Simulate a cohort and print the cost report");
    std::optional<std::uint64_t> seed;
    std::optional<int> sim_patients, sim_periods;
    std::string econ_config, traj_out, csv_out;
    bool econ_json = false;
    simulate->add_option("--seed", seed);
    simulate->add_option("--patients", sim_patients);
    simulate->add_option("--periods", sim_periods);
    simulate->add_option("--config", econ_config)->check(CLI::ExistingFile);
    simulate->add_option("--trajectories", traj_out, "Write one row per patient and period");
    simulate->add_option("--csv", csv_out, "Write the cost report as CSV");
    simulate->add_flag("--json", econ_json);

    auto* cache_cmd = app.add_subcommand("cache", "Session cache ledger");
    cache_cmd->require_subcommand(1);
    auto* report = cache_cmd->add_subcommand("report", "Per-call prefill records for a session");
    std::string session;
    report->add_option("--session", session)->required();

    auto* import = app.add_subcommand("import", "Import a cohort file (default: the bundled pilot cohort)");
    std::string cohort;
    import->add_option("--cohort", cohort)->check(CLI::ExistingFile);

    auto* analytics = app.add_subcommand("analytics", "Preference and completeness summaries");
    std::string analytics_flow;
    analytics->add_option("--flow", analytics_flow);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve) return cmd_serve(common, host, port, with_ui, ui_dir);
        if (*call) return cmd_call(common, patient, script, flow, call_json);
        if (*plan) return cmd_plan(common, start, horizon, capacity, period, forecast, patients_file);
        if (*simulate) return cmd_econ(common, seed, sim_patients, sim_periods, econ_config, traj_out, csv_out, econ_json);
        if (*report) return cmd_cache(common, session);
        if (*import) return cmd_import(common, cohort);
        if (*analytics) return cmd_analytics(common, analytics_flow);
    } catch (const NotFound& e) {
        std::cerr << "not found: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
