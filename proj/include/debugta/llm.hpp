#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "debugta/common.hpp"

namespace debugta::llm {

enum class TemplateId {
    syn_correction,
    to_pseudocode,
    var_mapping,
    logic_correction,
    logic_correction_no_reference,
    stubot_revise,
    baseline_direct_debug,
    baseline_debug_with_s,
    baseline_selfdebug_explain,
    baseline_selfdebug_trace,
    baseline_selfdebug_fix,
    baseline_direct_teach,
};

std::string to_string(TemplateId id);
TemplateId template_from_string(const std::string& s);

struct Template {
    TemplateId id;
    std::string text;
    // (literal placeholder in `text`, slot name); replaced verbatim.
    std::vector<std::pair<std::string, std::string>> placeholders;
};

const Template& get_template(TemplateId id);
std::vector<std::string> required_slots(TemplateId id);

struct ChatRequest {
    TemplateId template_id = TemplateId::syn_correction;
    std::map<std::string, std::string> slots;
    double temperature = 0.0;
    int max_tokens = 2048;
    // Appended after the rendered template (re-ask reminders, remediation notes).
    std::string addendum;
};

/// Byte-stable rendering. Throws PreconditionError when a required slot is
/// missing, an unknown slot is supplied, or temperature < 0.
std::string render(const ChatRequest& request);

struct ChatResponse {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::string backend_id;
};

struct LedgerEntry {
    TemplateId template_id;
    std::string prompt;
    std::string response;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    std::string backend_id;
    long long duration_ms = 0;
};

/// Append-only, synchronized record of gateway calls. Entries appended to a
/// child ledger are also appended to its parent.
class Ledger {
public:
    explicit Ledger(std::shared_ptr<Ledger> parent = nullptr) : parent_(std::move(parent)) {}

    void append(const LedgerEntry& entry);
    std::vector<LedgerEntry> entries() const;
    std::size_t size() const;

private:
    std::shared_ptr<Ledger> parent_;
    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
};

struct UsageCounts {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long calls = 0;
    long long total() const { return prompt_tokens + completion_tokens; }
};

struct TokenUsageSummary {
    UsageCounts totals;
    std::map<std::string, UsageCounts> per_template;
};

TokenUsageSummary usage_report(const std::vector<LedgerEntry>& entries);
json to_json(const TokenUsageSummary& summary);

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    /// Throws GatewayError{retryable=true} for transient transport failures,
    /// ConfigError for client-side (4xx) rejections.
    virtual ChatResponse send(const ChatRequest& request, const std::string& prompt) = 0;
};

/// Deterministic scripted backend. A request matches an entry when the
/// template agrees, every `slot_contains` substring occurs in the named
/// slot, and the addendum condition holds: entries without
/// `addendum_contains` only match requests with an empty addendum. Exactly
/// one entry must match; anything else is a hard error.
class MockBackend final : public Backend {
public:
    struct Entry {
        TemplateId template_id;
        std::map<std::string, std::string> slot_contains;
        std::optional<std::string> addendum_contains;
        std::string response;
    };

    explicit MockBackend(std::vector<Entry> entries) : entries_(std::move(entries)) {}
    static MockBackend from_json(const json& script);
    static MockBackend from_file(const std::filesystem::path& path);

    std::string id() const override { return "mock"; }
    ChatResponse send(const ChatRequest& request, const std::string& prompt) override;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

/// Token count reported by the mock backend: one per run of word characters
/// plus one per other non-space character.
int mock_token_count(std::string_view text);

class UnmatchedMockRequest : public Error {
public:
    using Error::Error;
};

struct HttpBackendConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4o-mini";
    std::string api_key;  // LLM_API_KEY
    int timeout_ms = 60000;
};

/// Chat-completions JSON over HTTP(S): POST {base_url}/chat/completions.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string id() const override { return "http:" + config_.model; }
    ChatResponse send(const ChatRequest& request, const std::string& prompt) override;

    static json request_body(const std::string& model, const ChatRequest& request,
                             const std::string& prompt);
    static ChatResponse parse_response(const std::string& body, const std::string& backend_id);

private:
    HttpBackendConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

struct GatewayOptions {
    int max_inflight = 4;
    int transport_retries = 3;
    int json_reasks = 2;
};

class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {},
            std::shared_ptr<Ledger> ledger = nullptr);

    ChatResponse complete(const ChatRequest& request) const;

    /// Same backend and in-flight limiter, recording into a child ledger that
    /// chains to this gateway's ledger.
    Gateway scoped(std::shared_ptr<Ledger> child) const;

    const std::shared_ptr<Ledger>& ledger() const { return ledger_; }
    const GatewayOptions& options() const { return options_; }
    std::string backend_id() const { return backend_->id(); }

private:
    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::shared_ptr<std::counting_semaphore<>> limiter_;
    std::shared_ptr<Ledger> ledger_;
};

/// First well-formed JSON object in a model reply: fenced blocks first, then
/// the raw text. Key order is preserved. Throws MalformedModelOutput.
ordered_json extract_json(std::string_view response_text);

/// The program in a model reply: the first ```cpp (or any fenced) block, or
/// the whole reply when it already looks like a program. Throws
/// MalformedModelOutput.
std::string extract_code(std::string_view response_text);

inline constexpr std::string_view kJsonReminder =
    "Reminder: output only the JSON object, without any additional text or explanation.";
inline constexpr std::string_view kCodeReminder =
    "Reminder: output only the complete program inside a single ```cpp code block.";

/// Sends `request`, parsing the reply with `parse`. On MalformedModelOutput
/// re-asks up to options().json_reasks times with `reminder` appended.
template <typename Parse>
auto complete_parsed(const Gateway& gateway, ChatRequest request, Parse parse,
                     std::string_view reminder = kJsonReminder) {
    const std::string base_addendum = request.addendum;
    for (int attempt = 0;; ++attempt) {
        const auto response = gateway.complete(request);
        try {
            return parse(response.text);
        } catch (const MalformedModelOutput&) {
            if (attempt >= gateway.options().json_reasks) throw;
        }
        request.addendum = base_addendum.empty() ? std::string(reminder)
                                                 : base_addendum + "\n\n" + std::string(reminder);
    }
}

}  // namespace debugta::llm
