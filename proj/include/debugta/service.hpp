#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "debugta/agent.hpp"
#include "debugta/corpus.hpp"
#include "debugta/judge.hpp"

namespace httplib {
class Server;
}

namespace debugta::service {

struct ServiceConfig {
    std::filesystem::path data_dir = "serve-data";
    int round_cap = 10;
    std::string token;  // required as "Authorization: Bearer <token>" when set
    std::filesystem::path static_dir;
};

struct RoundView {
    int round = 0;
    std::string submitted_code;
    std::string compile_report_messages;
    double ac_rate = 0.0;
    bool ac_all = false;
    std::string suggestion_kind;  // empty when no suggestions were needed
    std::vector<std::string> suggestions;
};

struct LiveSession {
    std::string id;
    std::string problem_id;
    int round_count = 0;
    std::vector<RoundView> history;
    long long created_at = 0;  // epoch seconds
    bool solved = false;
};

json to_json(const RoundView& r);
json to_json(const LiveSession& s);
LiveSession live_session_from_json(const json& j);

struct ApiResponse {
    int status = 200;
    json body;
};

/// JSON session API over a loaded dataset. Routing is independent of the
/// HTTP server so it can be exercised directly.
class SessionService {
public:
    SessionService(const corpus::Dataset& dataset, agent::DebugTA teacher, judge::Judge& judge,
                   ServiceConfig config);

    /// GET /api/problems, POST /api/sessions, POST /api/sessions/{id}/submit,
    /// GET /api/sessions/{id}.
    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body,
                       const std::string& authorization = {});

    ApiResponse list_problems() const;
    ApiResponse create_session(const json& body);
    ApiResponse submit(const std::string& session_id, const json& body);
    ApiResponse get_session(const std::string& session_id) const;

    /// Registers the API routes (and the static mount) on `server`.
    void mount(httplib::Server& server);

    std::size_t session_count() const;

private:
    struct Slot {
        std::mutex mutex;
        LiveSession session;
    };

    ApiResponse run_round(Slot& slot, const std::string& code);
    void persist(const LiveSession& s) const;
    void reload();
    std::shared_ptr<Slot> find(const std::string& id) const;

    const corpus::Dataset& dataset_;
    agent::DebugTA teacher_;
    judge::Judge& judge_;
    ServiceConfig config_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace debugta::service
