#include "debugta/agent.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

namespace debugta::agent {

// ---------------------------------------------------------------- memory

namespace {

constexpr std::pair<SlotKey, std::string_view> kSlotNames[] = {
    {SlotKey::question, "question"},
    {SlotKey::erroneous_code, "erroneous_code"},
    {SlotKey::error_messages, "error_messages"},
    {SlotKey::standard_code, "standard_code"},
    {SlotKey::aligned_code, "aligned_code"},
    {SlotKey::suggestions_syntax, "suggestions_syntax"},
    {SlotKey::suggestions_logic, "suggestions_logic"},
    {SlotKey::alignment_failed, "alignment_failed"},
};

constexpr std::pair<StrategyId, std::string_view> kStrategyNames[] = {
    {StrategyId::debugta, "debugta"},
    {StrategyId::direct_debug, "direct_debug"},
    {StrategyId::debug_with_s, "debug_with_s"},
    {StrategyId::selfdebug_explain, "selfdebug_explain"},
    {StrategyId::selfdebug_trace, "selfdebug_trace"},
    {StrategyId::direct_teach, "direct_teach"},
};

SlotKey require_slot(std::string_view name) {
    if (auto key = slot_from_string(name)) return *key;
    throw PreconditionError("unknown memory slot: " + std::string(name));
}

}  // namespace

std::string to_string(SlotKey key) {
    for (const auto& [k, name] : kSlotNames) {
        if (k == key) return std::string(name);
    }
    return "unknown";
}

std::optional<SlotKey> slot_from_string(std::string_view name) {
    for (const auto& [k, n] : kSlotNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

void Memory::write(SlotKey key, std::string value) { slots_[key] = std::move(value); }

void Memory::write(std::string_view key, std::string value) { write(require_slot(key), std::move(value)); }

std::optional<std::string> Memory::read(SlotKey key) const {
    auto it = slots_.find(key);
    if (it == slots_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> Memory::read(std::string_view key) const { return read(require_slot(key)); }

json Memory::to_json() const {
    json j = json::object();
    for (const auto& [k, v] : slots_) j[to_string(k)] = v;
    return j;
}

// ---------------------------------------------------------------- records

json to_json(const TraceRecord& r, bool include_timings) {
    json j{{"name", r.name},
           {"inputs_hash", r.inputs_hash},
           {"prompt_tokens", r.prompt_tokens},
           {"completion_tokens", r.completion_tokens}};
    if (include_timings) j["duration_ms"] = r.duration_ms;
    return j;
}

TraceRecord trace_from_json(const json& j) {
    return TraceRecord{j.at("name").get<std::string>(), j.at("inputs_hash").get<std::string>(),
                       j.value("duration_ms", 0LL), j.value("prompt_tokens", 0LL),
                       j.value("completion_tokens", 0LL)};
}

std::string to_jsonl(std::span<const TraceRecord> trace, bool include_timings) {
    std::string out;
    for (const auto& r : trace) out += to_json(r, include_timings).dump() + "\n";
    return out;
}

std::string to_string(SuggestionKind k) {
    switch (k) {
        case SuggestionKind::syntax: return "syntax";
        case SuggestionKind::logic: return "logic";
        case SuggestionKind::combined: return "combined";
    }
    return "unknown";
}

SuggestionKind suggestion_kind_from_string(const std::string& s) {
    if (s == "syntax") return SuggestionKind::syntax;
    if (s == "logic") return SuggestionKind::logic;
    if (s == "combined") return SuggestionKind::combined;
    throw ConfigError("unknown suggestion kind: " + s);
}

json to_json(const SuggestionSet& s, bool include_timings) {
    json trace = json::array();
    for (const auto& r : s.source_trace) trace.push_back(to_json(r, include_timings));
    return json{{"kind", to_string(s.kind)}, {"items", s.items}, {"source_trace", trace}, {"warnings", s.warnings}};
}

SuggestionSet suggestions_from_json(const json& j) {
    SuggestionSet s;
    s.kind = suggestion_kind_from_string(j.at("kind").get<std::string>());
    s.items = j.at("items").get<std::vector<std::string>>();
    for (const auto& r : j.value("source_trace", json::array())) s.source_trace.push_back(trace_from_json(r));
    s.warnings = j.value("warnings", std::vector<std::string>{});
    return s;
}

std::string render_items(const SuggestionSet& s) {
    std::string out;
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        out += std::to_string(i + 1) + ". " + s.items[i] + "\n";
    }
    return out;
}

std::string to_string(StrategyId id) {
    for (const auto& [k, name] : kStrategyNames) {
        if (k == id) return std::string(name);
    }
    return "unknown";
}

StrategyId strategy_from_string(const std::string& s) {
    for (const auto& [k, name] : kStrategyNames) {
        if (name == s) return k;
    }
    throw ConfigError("unknown strategy: " + s);
}

OutputMode output_mode(StrategyId id) {
    return id == StrategyId::debugta || id == StrategyId::direct_teach ? OutputMode::suggestions : OutputMode::code;
}

// ---------------------------------------------------------------- leakage guard

namespace {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        lines.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string collapse(std::string_view line) {
    std::string out;
    bool space = false;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
        } else {
            if (space) out += ' ';
            space = false;
            out += c;
        }
    }
    return out;
}

bool eligible(const std::string& line) {
    return std::any_of(line.begin(), line.end(), [](unsigned char c) { return std::isalnum(c); });
}

// run[i] = length of the longest copied run ending at text line i.
std::vector<std::size_t> copied_runs(const std::vector<std::string>& a, std::string_view reference) {
    std::vector<std::string> b;
    for (const auto& l : split_lines(reference)) b.push_back(collapse(l));
    std::vector<std::size_t> run(a.size(), 0);
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool ok = eligible(a[i]);
        for (std::size_t j = 0; j < b.size(); ++j) {
            cur[j + 1] = ok && a[i] == b[j] ? prev[j] + 1 : 0;
            run[i] = std::max(run[i], cur[j + 1]);
        }
        std::swap(prev, cur);
    }
    return run;
}

std::vector<std::string> normalized_lines(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& l : split_lines(text)) out.push_back(collapse(l));
    return out;
}

}  // namespace

std::size_t longest_copied_block(std::string_view text, std::string_view reference) {
    const auto runs = copied_runs(normalized_lines(text), reference);
    return runs.empty() ? 0 : *std::max_element(runs.begin(), runs.end());
}

std::string truncate_copied_blocks(std::string_view text, std::string_view reference, std::size_t max_lines) {
    const auto raw = split_lines(text);
    const auto runs = copied_runs(normalized_lines(text), reference);
    std::string out;
    bool eliding = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (runs[i] > max_lines) {
            if (!eliding) out += "[...]\n";
            eliding = true;
            continue;
        }
        eliding = false;
        out += raw[i];
        if (i + 1 < raw.size()) out += '\n';
    }
    if (!out.empty() && out.back() == '\n' && (text.empty() || text.back() != '\n')) out.pop_back();
    return out;
}

// ---------------------------------------------------------------- agent

namespace {

using Clock = std::chrono::steady_clock;

long long elapsed_ms(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

// Records tool calls and, via a private child ledger, every model call.
class Tracer {
public:
    explicit Tracer(const llm::Gateway& base)
        : ledger_(std::make_shared<llm::Ledger>(base.ledger())), gateway_(base.scoped(ledger_)) {}

    const llm::Gateway& gateway() const { return gateway_; }

    template <typename F>
    auto tool(std::string name, std::string_view inputs, F&& f) {
        sync();
        const auto index = records_.size();
        records_.push_back(TraceRecord{std::move(name), sha256_hex(inputs), 0, 0, 0});
        const auto started = Clock::now();
        auto result = f();
        records_[index].duration_ms = elapsed_ms(started);
        sync();
        return result;
    }

    void sync() {
        const auto entries = ledger_->entries();
        for (; seen_ < entries.size(); ++seen_) {
            const auto& e = entries[seen_];
            records_.push_back(TraceRecord{llm::to_string(e.template_id), sha256_hex(e.prompt), e.duration_ms,
                                           e.prompt_tokens, e.completion_tokens});
        }
    }

    std::vector<TraceRecord> take() {
        sync();
        return records_;
    }

private:
    std::shared_ptr<llm::Ledger> ledger_;
    llm::Gateway gateway_;
    std::vector<TraceRecord> records_;
    std::size_t seen_ = 0;
};

std::vector<std::string> parse_suggestions(const std::string& text) {
    const auto j = llm::extract_json(text);
    if (!j.contains("suggestions") || !j["suggestions"].is_array()) {
        throw MalformedModelOutput("reply has no \"suggestions\" list");
    }
    std::vector<std::string> items;
    for (const auto& item : j["suggestions"]) {
        if (!item.is_string()) throw MalformedModelOutput("suggestion entries must be strings");
        auto s = item.get<std::string>();
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        const auto e = s.find_last_not_of(" \t\r\n");
        items.push_back(s.substr(b, e - b + 1));
    }
    if (items.empty()) throw MalformedModelOutput("empty suggestion list");
    return items;
}

std::string parse_free_text(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw MalformedModelOutput("empty reply");
    return text;
}

std::string parse_program(const std::string& text) { return llm::extract_code(text); }

constexpr std::string_view kLeakNote =
    "Note: your previous suggestions copied several consecutive lines of the reference program. "
    "Describe each change in words and quote at most a single line of code.";

constexpr std::string_view kNoReferenceWarning = "empty standard code pool: suggestions produced without a reference";

std::string items_json(const std::vector<std::string>& items) { return json(items).dump(); }

SuggestionSet syntax_suggestions(Tracer& tracer, std::string_view erroneous, std::string_view error_messages) {
    if (error_messages.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw PreconditionError("syn_correction: no compiler error messages");
    }
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::syn_correction;
    req.slots = {{"code", std::string(erroneous)}, {"error_messages", std::string(error_messages)}};
    SuggestionSet s;
    s.kind = SuggestionKind::syntax;
    s.items = llm::complete_parsed(tracer.gateway(), req, parse_suggestions);
    return s;
}

SuggestionSet unreferenced_suggestions(Tracer& tracer, std::string_view erroneous, std::string_view question) {
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::logic_correction_no_reference;
    req.slots = {{"question", std::string(question)}, {"code", std::string(erroneous)}};
    SuggestionSet s;
    s.kind = SuggestionKind::logic;
    s.items = llm::complete_parsed(tracer.gateway(), req, parse_suggestions);
    s.warnings.emplace_back(kNoReferenceWarning);
    return s;
}

SuggestionSet logic_suggestions(Tracer& tracer, const align::AlignedCode& aligned, std::string_view erroneous,
                                std::string_view question, std::string_view reference, std::size_t max_lines) {
    if (!aligned.verified) throw PreconditionError("logic_correction: aligned code is not verified");
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::logic_correction;
    req.slots = {{"question", std::string(question)},
                 {"code", std::string(erroneous)},
                 {"reference", aligned.code}};

    const auto leaks = [&](const std::vector<std::string>& items) {
        return std::any_of(items.begin(), items.end(), [&](const std::string& item) {
            return longest_copied_block(item, aligned.code) > max_lines ||
                   (!reference.empty() && longest_copied_block(item, reference) > max_lines);
        });
    };

    SuggestionSet s;
    s.kind = SuggestionKind::logic;
    s.items = llm::complete_parsed(tracer.gateway(), req, parse_suggestions);
    if (leaks(s.items)) {
        s.warnings.emplace_back("suggestions copied reference code; regenerated");
        req.addendum = kLeakNote;
        s.items = llm::complete_parsed(tracer.gateway(), req, parse_suggestions);
        if (leaks(s.items)) {
            s.warnings.emplace_back("regenerated suggestions still copied reference code; truncated");
            for (auto& item : s.items) {
                item = truncate_copied_blocks(item, aligned.code, max_lines);
                if (!reference.empty()) item = truncate_copied_blocks(item, reference, max_lines);
            }
        }
    }
    return s;
}

}  // namespace

DebugTA::DebugTA(llm::Gateway gateway, judge::Judge& judge, AgentConfig config)
    : gateway_(std::move(gateway)), judge_(judge), config_(std::move(config)) {}

const retrieval::Tokenizer& DebugTA::tokenizer() const {
    return config_.tokenizer ? *config_.tokenizer : retrieval::lexical_tokenizer();
}

Teaching DebugTA::debug_and_teach(std::string_view erroneous, const corpus::Problem& problem) const {
    return debug_and_teach(erroneous, problem, problem.pool);
}

Teaching DebugTA::debug_and_teach(std::string_view erroneous, const corpus::Problem& problem,
                                  std::span<const corpus::PoolEntry> pool) const {
    Tracer tracer(gateway_);
    Teaching out;
    out.memory.write(SlotKey::question, problem.statement);
    out.memory.write(SlotKey::erroneous_code, std::string(erroneous));
    try {
        out.compile_report = tracer.tool("compile", erroneous, [&] { return judge_.compile(erroneous); });
        if (!out.compile_report.success) {
            out.memory.write(SlotKey::error_messages, out.compile_report.messages);
            out.suggestions = syntax_suggestions(tracer, erroneous, out.compile_report.messages);
            out.memory.write(SlotKey::suggestions_syntax, items_json(out.suggestions.items));
        } else if (pool.empty()) {
            out.suggestions = unreferenced_suggestions(tracer, erroneous, problem.statement);
            out.memory.write(SlotKey::suggestions_logic, items_json(out.suggestions.items));
        } else {
            const auto found = tracer.tool("code_search", erroneous, [&] {
                return retrieval::code_search(erroneous, pool, tokenizer(), config_.bm25);
            });
            out.reference = found.entry;
            out.memory.write(SlotKey::standard_code, found.entry.code);

            align::AlignedCode aligned;
            if (align::identifier_jaccard(found.entry.code, erroneous) >= config_.align.skip_jaccard) {
                aligned.code = found.entry.code;
                aligned.verified = true;
                aligned.skipped = true;
            } else {
                const align::Aligner aligner(tracer.gateway(), judge_, config_.align);
                aligned = tracer.tool("align", found.entry.code + "\n" + std::string(erroneous),
                                      [&] { return aligner.align(found.entry, erroneous, problem); });
            }
            out.memory.write(SlotKey::aligned_code, aligned.code);
            if (aligned.alignment_failed) out.memory.write(SlotKey::alignment_failed, "true");

            out.suggestions = logic_suggestions(tracer, aligned, erroneous, problem.statement, found.entry.code,
                                                config_.max_snippet_lines);
            for (const auto& w : aligned.warnings) out.suggestions.warnings.push_back("align: " + w);
            out.memory.write(SlotKey::suggestions_logic, items_json(out.suggestions.items));
            out.aligned = std::move(aligned);
        }
    } catch (const GatewayError& e) {
        throw AgentAborted(e.what(), e.retryable(), tracer.take());
    }
    out.suggestions.source_trace = tracer.take();
    return out;
}

SuggestionSet DebugTA::syn_correction(std::string_view erroneous, std::string_view error_messages) const {
    Tracer tracer(gateway_);
    auto s = syntax_suggestions(tracer, erroneous, error_messages);
    s.source_trace = tracer.take();
    return s;
}

SuggestionSet DebugTA::logic_correction(const align::AlignedCode& aligned, std::string_view erroneous,
                                        std::string_view question, std::string_view reference) const {
    Tracer tracer(gateway_);
    auto s = logic_suggestions(tracer, aligned, erroneous, question, reference, config_.max_snippet_lines);
    s.source_trace = tracer.take();
    return s;
}

BaselineOutput DebugTA::run_baseline(StrategyId strategy, std::string_view erroneous,
                                     const corpus::Problem& problem,
                                     std::span<const corpus::PoolEntry> pool) const {
    BaselineOutput out;
    if (strategy == StrategyId::debugta) {
        auto teaching = debug_and_teach(erroneous, problem, pool);
        out.trace = teaching.suggestions.source_trace;
        out.reference = std::move(teaching.reference);
        out.suggestions = std::move(teaching.suggestions);
        return out;
    }

    Tracer tracer(gateway_);
    const auto& g = tracer.gateway();
    const std::string question = problem.statement;
    const std::string code(erroneous);
    const auto program_request = [&](llm::TemplateId id, std::map<std::string, std::string> slots) {
        llm::ChatRequest req;
        req.template_id = id;
        req.slots = std::move(slots);
        return llm::complete_parsed(g, req, parse_program, llm::kCodeReminder);
    };
    const auto retrieve = [&]() -> std::optional<corpus::PoolEntry> {
        if (pool.empty()) {
            out.warnings.emplace_back(kNoReferenceWarning);
            return std::nullopt;
        }
        return tracer.tool("code_search", erroneous, [&] {
            return retrieval::code_search(erroneous, pool, tokenizer(), config_.bm25).entry;
        });
    };

    try {
        switch (strategy) {
            case StrategyId::direct_debug:
                out.code = program_request(llm::TemplateId::baseline_direct_debug, {{"question", question}, {"code", code}});
                break;
            case StrategyId::debug_with_s:
                out.reference = retrieve();
                out.code = out.reference
                               ? program_request(llm::TemplateId::baseline_debug_with_s,
                                                 {{"question", question}, {"code", code}, {"reference", out.reference->code}})
                               : program_request(llm::TemplateId::baseline_direct_debug,
                                                 {{"question", question}, {"code", code}});
                break;
            case StrategyId::selfdebug_explain:
            case StrategyId::selfdebug_trace: {
                llm::ChatRequest req;
                req.template_id = strategy == StrategyId::selfdebug_explain ? llm::TemplateId::baseline_selfdebug_explain
                                                                            : llm::TemplateId::baseline_selfdebug_trace;
                req.slots = {{"question", question}, {"code", code}};
                const auto analysis = llm::complete_parsed(g, req, parse_free_text, "Reminder: answer in plain text.");
                out.code = program_request(llm::TemplateId::baseline_selfdebug_fix,
                                           {{"question", question}, {"code", code}, {"analysis", analysis}});
                break;
            }
            case StrategyId::direct_teach: {
                out.reference = retrieve();
                SuggestionSet s;
                if (out.reference) {
                    llm::ChatRequest req;
                    req.template_id = llm::TemplateId::baseline_direct_teach;
                    req.slots = {{"question", question}, {"code", code}, {"reference", out.reference->code}};
                    s.kind = SuggestionKind::logic;
                    s.items = llm::complete_parsed(g, req, parse_suggestions);
                } else {
                    s = unreferenced_suggestions(tracer, erroneous, question);
                }
                out.suggestions = std::move(s);
                break;
            }
            case StrategyId::debugta:
                break;
        }
    } catch (const GatewayError& e) {
        throw AgentAborted(e.what(), e.retryable(), tracer.take());
    }
    out.trace = tracer.take();
    if (out.suggestions) {
        out.suggestions->source_trace = out.trace;
        auto& ws = out.suggestions->warnings;
        for (const auto& w : out.warnings) {
            if (std::find(ws.begin(), ws.end(), w) == ws.end()) ws.push_back(w);
        }
    }
    return out;
}

}  // namespace debugta::agent
