#pragma once

#include "pulse/service/service.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace pulse::service {

/// JSON-over-HTTP front end. Routes:
///
///   GET  /health                       status, last seq, state hash
///   GET  /patients  /patients/:id      POST /patients  PUT /patients/:id
///   GET  /flows     /flows/:id
///   POST /calls                        {patient_id, flow_id?, script[]}
///   GET  /sessions  /transcripts/:session
///   GET  /assessments  /assessments/:session
///   GET  /alerts?status=open|acknowledged|all   POST /alerts/:id/ack {by}
///   GET  /trends/:patient?dimension=
///   GET  /plans  /plans/:id             POST /plans
///   GET  /cache/metrics?session=
///   POST /econ/simulate?samples=1      body: econ config overrides
///   GET  /analytics/preferences  /analytics/completeness?flow=
///   GET  /events?after=
///
/// Lists take offset/limit (default 50, at most 500) and are ordered by seq.
/// Errors come back as {"error": message} with 400, 401, 404, 409 or 503.
class ApiServer {
public:
    explicit ApiServer(Service& service);
    ~ApiServer();

    /// Serves a built dashboard from `dir` under "/". Returns false if missing.
    bool mount_ui(const std::filesystem::path& dir);

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    void routes();

    Service& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace pulse::service
