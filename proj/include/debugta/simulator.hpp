#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "debugta/agent.hpp"
#include "debugta/judge.hpp"
#include "debugta/llm.hpp"
#include "debugta/plagiarism.hpp"

namespace debugta::sim {

struct SessionConfig {
    int max_rounds = 3;
    bool early_stop_on_ac_all = true;
    agent::TeacherStrategy strategy;
    plagiarism::PlagiarismConfig plagiarism;
    // Pool entries by the same submitter within this frame are not used.
    std::chrono::seconds exclusion_frame{std::chrono::hours(24)};
};

json to_json(const SessionConfig& c);

struct RoundRecord {
    int round_index = 0;  // 1-based
    std::string code_before;
    std::optional<agent::SuggestionSet> suggestions;  // absent for code-mode teachers
    std::string code_after;
    judge::JudgeResult judge_result;
    llm::UsageCounts tokens;
    bool failed = false;  // revision unusable; code_after == code_before
    std::string note;
};

struct SessionTranscript {
    std::string problem_id;
    std::string submission_id;
    std::string strategy;
    int max_rounds = 0;
    std::string initial_code;
    judge::JudgeResult initial_judge;
    std::vector<RoundRecord> rounds;
    std::string final_code;
    judge::JudgeResult final_judge;  // after plagiarism zeroing
    plagiarism::PlagiarismVerdict plagiarism;
    bool stopped_early = false;
    llm::UsageCounts tokens;
    std::string config_fingerprint;
    std::string aborted;  // non-empty when the session ended on an error
};

/// Wall timings are never serialized so that mock-backed transcripts are
/// byte-stable.
json to_json(const SessionTranscript& t);
SessionTranscript transcript_from_json(const json& j);

/// Thrown when a session cannot continue; holds the rounds completed so far.
class SessionAborted : public Error {
public:
    SessionAborted(const std::string& what, SessionTranscript partial)
        : Error(what), partial_(std::move(partial)) {}
    const SessionTranscript& partial() const { return partial_; }

private:
    SessionTranscript partial_;
};

/// LLM student: applies suggestions to its program. Sees only the problem
/// statement, its own code and the suggestion text.
class StuBot {
public:
    explicit StuBot(llm::Gateway gateway) : gateway_(std::move(gateway)) {}

    /// Throws PreconditionError for an empty suggestion set and
    /// MalformedModelOutput when no program can be extracted after re-asks.
    std::string revise(std::string_view code, const agent::SuggestionSet& suggestions,
                       std::string_view question) const;

    const llm::Gateway& gateway() const { return gateway_; }

private:
    llm::Gateway gateway_;
};

class SessionRunner {
public:
    /// `teacher` and `student` may share a backend; their calls are recorded
    /// into one per-session ledger either way.
    SessionRunner(llm::Gateway teacher, llm::Gateway student, judge::Judge& judge,
                  agent::AgentConfig agent_config = {});

    /// `pool` is the reference pool visible to the teacher (already filtered
    /// for the submitter); plagiarism falls back to retrieval over it.
    SessionTranscript run(const corpus::Problem& problem, std::string_view initial_code,
                          const SessionConfig& config, std::span<const corpus::PoolEntry> pool,
                          std::string submission_id = {}) const;
    SessionTranscript run(const corpus::Problem& problem, std::string_view initial_code,
                          const SessionConfig& config) const;

private:
    llm::Gateway teacher_;
    llm::Gateway student_;
    judge::Judge& judge_;
    agent::AgentConfig agent_config_;
};

/// runs/<run_id>/sessions/<problem>__<submission>.json
std::filesystem::path save_transcript(const SessionTranscript& t, const std::filesystem::path& run_dir);

}  // namespace debugta::sim
