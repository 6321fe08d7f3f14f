#include <httplib.h>

#include "debugta/llm.hpp"

namespace debugta::llm {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("llm.base_url needs a scheme: " + config_.base_url);
    const auto path_start = config_.base_url.find('/', scheme_end + 3);
    scheme_host_port_ = config_.base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json HttpBackend::request_body(const std::string& model, const ChatRequest& request,
                               const std::string& prompt) {
    return json{{"model", model},
                {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens}};
}

ChatResponse HttpBackend::parse_response(const std::string& body, const std::string& backend_id) {
    const auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
        throw GatewayError("chat completion response without choices", true);
    }
    ChatResponse r;
    const auto& content = j["choices"][0]["message"]["content"];
    r.text = content.is_string() ? content.get<std::string>() : std::string{};
    if (j.contains("usage")) {
        r.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        r.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    r.backend_id = backend_id;
    return r;
}

ChatResponse HttpBackend::send(const ChatRequest& request, const std::string& prompt) {
    httplib::Client client(scheme_host_port_);
    const auto seconds = config_.timeout_ms / 1000;
    const auto micros = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    const auto body = request_body(config_.model, request, prompt).dump();
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
        throw GatewayError("transport failure: " + httplib::to_string(res.error()), true);
    }
    if (res->status >= 400 && res->status < 500 && res->status != 429) {
        throw ConfigError("LLM endpoint rejected request (HTTP " + std::to_string(res->status) +
                          "): " + res->body.substr(0, 300));
    }
    if (res->status != 200) {
        throw GatewayError("LLM endpoint returned HTTP " + std::to_string(res->status), true);
    }
    return parse_response(res->body, id());
}

}  // namespace debugta::llm
