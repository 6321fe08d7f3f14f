#include "debugta/service.hpp"

#include <httplib.h>

#include <chrono>
#include <random>
#include <regex>

namespace debugta::service {

json to_json(const RoundView& r) {
    return json{{"round", r.round},
                {"submitted_code", r.submitted_code},
                {"compile_report_messages", r.compile_report_messages},
                {"ac_rate", r.ac_rate},
                {"ac_all", r.ac_all},
                {"suggestion_kind", r.suggestion_kind},
                {"suggestions", r.suggestions}};
}

json to_json(const LiveSession& s) {
    json history = json::array();
    for (const auto& r : s.history) history.push_back(to_json(r));
    return json{{"session_id", s.id},
                {"problem_id", s.problem_id},
                {"round_count", s.round_count},
                {"solved", s.solved},
                {"created_at", s.created_at},
                {"history", history}};
}

LiveSession live_session_from_json(const json& j) {
    LiveSession s;
    s.id = j.at("session_id").get<std::string>();
    s.problem_id = j.at("problem_id").get<std::string>();
    s.round_count = j.at("round_count").get<int>();
    s.solved = j.value("solved", false);
    s.created_at = j.value("created_at", 0LL);
    for (const auto& h : j.at("history")) {
        RoundView r;
        r.round = h.at("round").get<int>();
        r.submitted_code = h.value("submitted_code", "");
        r.compile_report_messages = h.value("compile_report_messages", "");
        r.ac_rate = h.value("ac_rate", 0.0);
        r.ac_all = h.value("ac_all", false);
        r.suggestion_kind = h.value("suggestion_kind", "");
        r.suggestions = h.value("suggestions", std::vector<std::string>{});
        s.history.push_back(std::move(r));
    }
    return s;
}

namespace {

ApiResponse error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

std::string new_session_id() {
    static std::mutex mutex;
    static std::random_device rd;
    std::lock_guard lock(mutex);
    static const char* hex = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 4; ++i) {
        auto v = rd();
        for (int k = 0; k < 8; ++k, v >>= 4) id += hex[v & 0xF];
    }
    return id;
}

bool valid_session_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isxdigit(c); });
}

std::optional<std::string> code_field(const json& body) {
    if (!body.is_object() || !body.contains("code") || !body["code"].is_string()) return std::nullopt;
    return body["code"].get<std::string>();
}

}  // namespace

SessionService::SessionService(const corpus::Dataset& dataset, agent::DebugTA teacher, judge::Judge& judge,
                               ServiceConfig config)
    : dataset_(dataset), teacher_(std::move(teacher)), judge_(judge), config_(std::move(config)) {
    reload();
}

void SessionService::reload() {
    const auto dir = config_.data_dir / "sessions";
    if (!std::filesystem::exists(dir)) return;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        auto slot = std::make_shared<Slot>();
        try {
            slot->session = live_session_from_json(json::parse(read_file(entry.path())));
        } catch (const std::exception& e) {
            throw LoadError(entry.path(), std::string("unreadable session: ") + e.what());
        }
        sessions_[slot->session.id] = slot;
    }
}

void SessionService::persist(const LiveSession& s) const {
    const auto dir = config_.data_dir / "sessions";
    const auto tmp = dir / (s.id + ".json.tmp");
    write_file(tmp, to_json(s).dump(2) + "\n");
    std::filesystem::rename(tmp, dir / (s.id + ".json"));
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionService::session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

ApiResponse SessionService::list_problems() const {
    json out = json::array();
    for (const auto& p : dataset_.problems) {
        out.push_back(json{{"id", p.id}, {"title", p.title}, {"statement", p.statement}});
    }
    return {200, out};
}

ApiResponse SessionService::run_round(Slot& slot, const std::string& code) {
    auto& s = slot.session;
    if (s.round_count >= config_.round_cap) {
        return error(429, "round cap of " + std::to_string(config_.round_cap) + " reached for this session");
    }
    const auto& problem = dataset_.at(s.problem_id);

    RoundView r;
    r.round = s.round_count + 1;
    r.submitted_code = code;
    const auto compiled = judge_.compile(code);
    r.compile_report_messages = compiled.messages;
    const auto result = judge_.run_tests(code, problem);
    r.ac_rate = result.ac_rate;
    r.ac_all = result.ac_all;
    if (!result.ac_all) {
        try {
            const auto teaching = teacher_.debug_and_teach(code, problem);
            r.suggestion_kind = agent::to_string(teaching.suggestions.kind);
            r.suggestions = teaching.suggestions.items;
        } catch (const agent::AgentAborted& e) {
            return {502, json{{"error", e.what()}, {"retryable", e.retryable()}}};
        } catch (const GatewayError& e) {
            return {502, json{{"error", e.what()}, {"retryable", e.retryable()}}};
        } catch (const MalformedModelOutput& e) {
            return {502, json{{"error", e.what()}, {"retryable", true}}};
        } catch (const ConfigError& e) {
            return {502, json{{"error", e.what()}, {"retryable", false}}};
        } catch (const llm::UnmatchedMockRequest& e) {
            return {502, json{{"error", e.what()}, {"retryable", false}}};
        }
    }
    s.round_count = r.round;
    s.solved = s.solved || r.ac_all;
    s.history.push_back(r);
    persist(s);

    return {200, json{{"session_id", s.id},
                      {"round", r.round},
                      {"compile_report_messages", r.compile_report_messages},
                      {"ac_rate", r.ac_rate},
                      {"ac_all", r.ac_all},
                      {"solved", s.solved},
                      {"suggestion_kind", r.suggestion_kind},
                      {"suggestions", r.suggestions}}};
}

ApiResponse SessionService::create_session(const json& body) {
    if (!body.is_object() || !body.contains("problem_id") || !body["problem_id"].is_string()) {
        return error(400, "body must be {\"problem_id\": string, \"code\": string}");
    }
    const auto code = code_field(body);
    if (!code) return error(400, "body must be {\"problem_id\": string, \"code\": string}");
    const auto problem_id = body["problem_id"].get<std::string>();
    if (!dataset_.find(problem_id)) return error(404, "unknown problem: " + problem_id);

    auto slot = std::make_shared<Slot>();
    slot->session.id = new_session_id();
    slot->session.problem_id = problem_id;
    slot->session.created_at =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();

    std::lock_guard session_lock(slot->mutex);
    auto response = run_round(*slot, *code);
    if (response.status != 200) return response;
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_[slot->session.id] = slot;
    }
    response.status = 201;
    return response;
}

ApiResponse SessionService::submit(const std::string& session_id, const json& body) {
    auto slot = find(session_id);
    if (!slot) return error(404, "unknown session: " + session_id);
    const auto code = code_field(body);
    if (!code) return error(400, "body must be {\"code\": string}");
    std::lock_guard lock(slot->mutex);
    return run_round(*slot, *code);
}

ApiResponse SessionService::get_session(const std::string& session_id) const {
    auto slot = find(session_id);
    if (!slot) return error(404, "unknown session: " + session_id);
    std::lock_guard lock(slot->mutex);
    return {200, to_json(slot->session)};
}

ApiResponse SessionService::handle(const std::string& method, const std::string& path, const std::string& body,
                                   const std::string& authorization) {
    if (!config_.token.empty() && authorization != "Bearer " + config_.token) {
        return error(401, "missing or invalid bearer token");
    }
    static const std::regex session_path(R"(^/api/sessions/([^/]+)$)");
    static const std::regex submit_path(R"(^/api/sessions/([^/]+)/submit$)");

    const auto parse_body = [&]() -> std::optional<json> {
        auto j = json::parse(body, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return j;
    };
    std::smatch m;
    try {
        if (path == "/api/problems") {
            if (method != "GET") return error(405, "method not allowed");
            return list_problems();
        }
        if (path == "/api/sessions") {
            if (method != "POST") return error(405, "method not allowed");
            const auto j = parse_body();
            if (!j) return error(400, "malformed JSON body");
            return create_session(*j);
        }
        if (std::regex_match(path, m, submit_path)) {
            if (method != "POST") return error(405, "method not allowed");
            const auto id = m[1].str();
            if (!valid_session_id(id)) return error(404, "unknown session: " + id);
            const auto j = parse_body();
            if (!j) return error(400, "malformed JSON body");
            return submit(id, *j);
        }
        if (std::regex_match(path, m, session_path)) {
            if (method != "GET") return error(405, "method not allowed");
            const auto id = m[1].str();
            if (!valid_session_id(id)) return error(404, "unknown session: " + id);
            return get_session(id);
        }
    } catch (const EnvironmentError& e) {
        return error(500, std::string("judge unavailable: ") + e.what());
    }
    return error(404, "no such endpoint");
}

void SessionService::mount(httplib::Server& server) {
    const auto bridge = [this](const httplib::Request& req, httplib::Response& res) {
        const auto out = handle(req.method, req.path, req.body, req.get_header_value("Authorization"));
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    };
    server.Get("/api/problems", bridge);
    server.Post("/api/sessions", bridge);
    server.Post(R"(/api/sessions/[^/]+/submit)", bridge);
    server.Get(R"(/api/sessions/[^/]+)", bridge);
    // Everything else under /api still gets a JSON 404 or 405 from handle().
    server.Get(R"(/api/.*)", bridge);
    server.Post(R"(/api/.*)", bridge);
    server.Put(R"(/api/.*)", bridge);
    server.Patch(R"(/api/.*)", bridge);
    server.Delete(R"(/api/.*)", bridge);
    if (!config_.static_dir.empty()) {
        if (!server.set_mount_point("/", config_.static_dir.string())) {
            throw ConfigError("serve.static_dir is not a directory: " + config_.static_dir.string());
        }
    }
}

}  // namespace debugta::service
