#include <algorithm>
#include <cctype>
#include <chrono>

#include "debugta/llm.hpp"

namespace debugta::llm {

void Ledger::append(const LedgerEntry& entry) {
    {
        std::lock_guard lock(mutex_);
        entries_.push_back(entry);
    }
    if (parent_) parent_->append(entry);
}

std::vector<LedgerEntry> Ledger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t Ledger::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

TokenUsageSummary usage_report(const std::vector<LedgerEntry>& entries) {
    TokenUsageSummary s;
    for (const auto& e : entries) {
        for (auto* counts : {&s.totals, &s.per_template[to_string(e.template_id)]}) {
            counts->prompt_tokens += e.prompt_tokens;
            counts->completion_tokens += e.completion_tokens;
            counts->calls += 1;
        }
    }
    return s;
}

json to_json(const TokenUsageSummary& summary) {
    auto counts = [](const UsageCounts& c) {
        return json{{"prompt_tokens", c.prompt_tokens},
                    {"completion_tokens", c.completion_tokens},
                    {"total_tokens", c.total()},
                    {"calls", c.calls}};
    };
    json per = json::object();
    for (const auto& [name, c] : summary.per_template) per[name] = counts(c);
    return json{{"totals", counts(summary.totals)}, {"per_template", per}};
}

// ---------------------------------------------------------------- mock

int mock_token_count(std::string_view text) {
    int count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '_' || c >= 0x80) {
            if (!in_word) ++count;
            in_word = true;
        } else {
            in_word = false;
            if (!std::isspace(c)) ++count;
        }
    }
    return count;
}

MockBackend MockBackend::from_json(const json& script) {
    const json& list = script.is_object() && script.contains("entries") ? script["entries"] : script;
    if (!list.is_array()) throw ConfigError("mock script must be a JSON list of entries");
    std::vector<Entry> entries;
    for (const auto& e : list) {
        Entry entry;
        entry.template_id = template_from_string(e.at("template_id").get<std::string>());
        if (e.contains("slot_contains")) {
            for (const auto& [slot, needle] : e["slot_contains"].items()) {
                entry.slot_contains[slot] = needle.get<std::string>();
            }
        }
        if (e.contains("addendum_contains")) {
            entry.addendum_contains = e["addendum_contains"].get<std::string>();
        }
        entry.response = e.at("response").get<std::string>();
        entries.push_back(std::move(entry));
    }
    return MockBackend(std::move(entries));
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
    try {
        return from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ChatResponse MockBackend::send(const ChatRequest& request, const std::string& prompt) {
    const Entry* match = nullptr;
    std::size_t matches = 0;
    for (const auto& e : entries_) {
        if (e.template_id != request.template_id) continue;
        if (e.addendum_contains) {
            if (request.addendum.find(*e.addendum_contains) == std::string::npos) continue;
        } else if (!request.addendum.empty()) {
            continue;
        }
        const bool slots_ok = std::all_of(e.slot_contains.begin(), e.slot_contains.end(), [&](const auto& kv) {
            auto it = request.slots.find(kv.first);
            return it != request.slots.end() && it->second.find(kv.second) != std::string::npos;
        });
        if (!slots_ok) continue;
        ++matches;
        if (!match) match = &e;
    }
    if (matches != 1) {
        std::string what = matches == 0 ? "unmatched mock request" : "ambiguous mock request";
        what += " (template " + to_string(request.template_id) + ", " + std::to_string(matches) +
                " matching entries)";
        throw UnmatchedMockRequest(what);
    }
    ChatResponse r;
    r.text = match->response;
    r.prompt_tokens = mock_token_count(prompt);
    r.completion_tokens = mock_token_count(r.text);
    r.backend_id = id();
    return r;
}

// ---------------------------------------------------------------- gateway

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options,
                 std::shared_ptr<Ledger> ledger)
    : backend_(std::move(backend)),
      options_(options),
      limiter_(std::make_shared<std::counting_semaphore<>>(std::max(1, options.max_inflight))),
      ledger_(ledger ? std::move(ledger) : std::make_shared<Ledger>()) {
    if (!backend_) throw ConfigError("gateway: no backend configured");
}

Gateway Gateway::scoped(std::shared_ptr<Ledger> child) const {
    Gateway g = *this;
    g.ledger_ = std::move(child);
    return g;
}

ChatResponse Gateway::complete(const ChatRequest& request) const {
    const auto prompt = render(request);
    for (int attempt = 0;; ++attempt) {
        try {
            ChatResponse response;
            const auto started = std::chrono::steady_clock::now();
            {
                limiter_->acquire();
                struct Release {
                    std::counting_semaphore<>& s;
                    ~Release() { s.release(); }
                } release{*limiter_};
                response = backend_->send(request, prompt);
            }
            ledger_->append(LedgerEntry{request.template_id, prompt, response.text,
                                        response.prompt_tokens, response.completion_tokens,
                                        response.backend_id,
                                        std::chrono::duration_cast<std::chrono::milliseconds>(
                                            std::chrono::steady_clock::now() - started)
                                            .count()});
            return response;
        } catch (const GatewayError& e) {
            if (!e.retryable() || attempt >= options_.transport_retries) {
                throw GatewayError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                                       " attempts)",
                                   e.retryable());
            }
        }
    }
}

// ---------------------------------------------------------------- extraction

namespace {

struct Fence {
    std::string lang;
    std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
    std::vector<Fence> out;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("```", pos);
        if (open == std::string_view::npos) break;
        const auto eol = text.find('\n', open + 3);
        if (eol == std::string_view::npos) break;
        const auto close = text.find("```", eol + 1);
        if (close == std::string_view::npos) break;
        std::string lang(text.substr(open + 3, eol - open - 3));
        lang.erase(std::remove_if(lang.begin(), lang.end(), [](unsigned char c) { return std::isspace(c); }),
                   lang.end());
        std::transform(lang.begin(), lang.end(), lang.begin(), [](unsigned char c) { return std::tolower(c); });
        out.push_back(Fence{lang, std::string(text.substr(eol + 1, close - eol - 1))});
        pos = close + 3;
    }
    return out;
}

// Index one past the brace closing the object opened at `open`, or npos.
std::size_t balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

std::optional<ordered_json> first_object(std::string_view text) {
    for (auto open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        const auto end = balanced_end(text, open);
        if (end == std::string_view::npos) continue;
        auto parsed = ordered_json::parse(text.substr(open, end - open), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ordered_json extract_json(std::string_view response_text) {
    for (const auto& fence : fenced_blocks(response_text)) {
        if (auto obj = first_object(fence.body)) return *obj;
    }
    if (auto obj = first_object(response_text)) return *obj;
    throw MalformedModelOutput("no JSON object found in model output");
}

std::string extract_code(std::string_view response_text) {
    const auto fences = fenced_blocks(response_text);
    for (const auto& f : fences) {
        if (f.lang == "cpp" || f.lang == "c++" || f.lang == "cc" || f.lang == "c" || f.lang == "cxx") {
            return trim(f.body) + "\n";
        }
    }
    if (!fences.empty() && !trim(fences.front().body).empty()) return trim(fences.front().body) + "\n";
    const auto text = trim(response_text);
    if (text.find("main(") != std::string::npos || text.starts_with("#include")) return text + "\n";
    throw MalformedModelOutput("no program found in model output");
}

}  // namespace debugta::llm
