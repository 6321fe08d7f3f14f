#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "debugta/align.hpp"
#include "debugta/corpus.hpp"
#include "debugta/judge.hpp"
#include "debugta/llm.hpp"
#include "debugta/retrieval.hpp"

namespace debugta::agent {

enum class SlotKey {
    question,
    erroneous_code,
    error_messages,
    standard_code,
    aligned_code,
    suggestions_syntax,
    suggestions_logic,
    alignment_failed,
};

std::string to_string(SlotKey key);
std::optional<SlotKey> slot_from_string(std::string_view name);

/// Working memory of one agent invocation. Absent slots read as nullopt.
class Memory {
public:
    void write(SlotKey key, std::string value);
    /// Throws PreconditionError for names outside the slot enumeration.
    void write(std::string_view key, std::string value);
    std::optional<std::string> read(SlotKey key) const;
    std::optional<std::string> read(std::string_view key) const;
    bool has(SlotKey key) const { return slots_.contains(key); }
    json to_json() const;

private:
    std::map<SlotKey, std::string> slots_;
};

/// One tool or model call made while producing suggestions.
struct TraceRecord {
    std::string name;
    std::string inputs_hash;
    long long duration_ms = 0;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
};

json to_json(const TraceRecord& r, bool include_timings = true);
TraceRecord trace_from_json(const json& j);
/// One JSON object per line.
std::string to_jsonl(std::span<const TraceRecord> trace, bool include_timings = true);

enum class SuggestionKind { syntax, logic, combined };

std::string to_string(SuggestionKind k);
SuggestionKind suggestion_kind_from_string(const std::string& s);

struct SuggestionSet {
    SuggestionKind kind = SuggestionKind::logic;
    std::vector<std::string> items;
    std::vector<TraceRecord> source_trace;
    std::vector<std::string> warnings;
};

json to_json(const SuggestionSet& s, bool include_timings = true);
SuggestionSet suggestions_from_json(const json& j);
/// "1. ...\n2. ..." as shown to the student.
std::string render_items(const SuggestionSet& s);

enum class StrategyId { debugta, direct_debug, debug_with_s, selfdebug_explain, selfdebug_trace, direct_teach };
enum class OutputMode { code, suggestions };

std::string to_string(StrategyId id);
StrategyId strategy_from_string(const std::string& s);
OutputMode output_mode(StrategyId id);

struct TeacherStrategy {
    StrategyId id = StrategyId::debugta;
    OutputMode output_mode() const { return agent::output_mode(id); }
};

/// Longest run of consecutive lines of `text` that also appear consecutively
/// in `reference`, after collapsing whitespace. Lines without any
/// alphanumeric character never count toward a run.
std::size_t longest_copied_block(std::string_view text, std::string_view reference);

/// Replaces every copied run longer than `max_lines` by its first `max_lines`
/// lines followed by "[...]".
std::string truncate_copied_blocks(std::string_view text, std::string_view reference, std::size_t max_lines);

struct AgentConfig {
    align::AlignConfig align;
    std::size_t max_snippet_lines = 3;
    retrieval::Bm25Params bm25;
    std::shared_ptr<const retrieval::Tokenizer> tokenizer;  // null: lexical
};

/// Everything one debug_and_teach call produced.
struct Teaching {
    SuggestionSet suggestions;
    Memory memory;
    judge::CompileReport compile_report;
    std::optional<corpus::PoolEntry> reference;  // S* on the logic path
    std::optional<align::AlignedCode> aligned;
};

struct BaselineOutput {
    std::optional<SuggestionSet> suggestions;  // suggestion-mode strategies
    std::optional<std::string> code;           // code-mode strategies
    std::optional<corpus::PoolEntry> reference;
    std::vector<TraceRecord> trace;
    std::vector<std::string> warnings;
};

/// Model backend failure while teaching; carries the trace up to the failure.
class AgentAborted : public Error {
public:
    AgentAborted(const std::string& what, bool retryable, std::vector<TraceRecord> trace)
        : Error(what), retryable_(retryable), trace_(std::move(trace)) {}
    bool retryable() const { return retryable_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }

private:
    bool retryable_;
    std::vector<TraceRecord> trace_;
};

class DebugTA {
public:
    DebugTA(llm::Gateway gateway, judge::Judge& judge, AgentConfig config = {});

    /// Compile probe, then exactly one of: syntax correction (compile
    /// failed) or retrieval, optional alignment and logic correction.
    Teaching debug_and_teach(std::string_view erroneous, const corpus::Problem& problem) const;
    Teaching debug_and_teach(std::string_view erroneous, const corpus::Problem& problem,
                             std::span<const corpus::PoolEntry> pool) const;

    /// Throws PreconditionError when `error_messages` is empty.
    SuggestionSet syn_correction(std::string_view erroneous, std::string_view error_messages) const;

    /// Throws PreconditionError when `aligned` is not verified. `reference` is
    /// the unaligned S*, also guarded against verbatim copying.
    SuggestionSet logic_correction(const align::AlignedCode& aligned, std::string_view erroneous,
                                   std::string_view question, std::string_view reference = {}) const;

    BaselineOutput run_baseline(StrategyId strategy, std::string_view erroneous,
                                const corpus::Problem& problem,
                                std::span<const corpus::PoolEntry> pool) const;

    const AgentConfig& config() const { return config_; }

private:
    const retrieval::Tokenizer& tokenizer() const;

    llm::Gateway gateway_;
    judge::Judge& judge_;
    AgentConfig config_;
};

}  // namespace debugta::agent
