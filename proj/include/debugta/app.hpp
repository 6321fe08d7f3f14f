#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "debugta/agent.hpp"
#include "debugta/config.hpp"
#include "debugta/corpus.hpp"
#include "debugta/judge.hpp"
#include "debugta/llm.hpp"
#include "debugta/metrics.hpp"
#include "debugta/simulator.hpp"

namespace debugta::app {

judge::JudgeConfig judge_config(const Config& c);
agent::AgentConfig agent_config(const Config& c);
sim::SessionConfig session_config(const Config& c, agent::StrategyId strategy);
llm::GatewayOptions gateway_options(const Config& c);

/// `role` is "llm" (teacher) or "student"; student settings fall back to
/// the teacher's when empty. The API key comes from LLM_API_KEY.
std::shared_ptr<llm::Backend> make_backend(const Config& c, const std::string& role);

/// Loads a dataset, verifying pool entries with `judge` when
/// corpus.verify_pools is on.
corpus::Dataset load_dataset(const Config& c, const std::filesystem::path& root, judge::Judge& judge);

/// Every parameter that influences scores, for the report fingerprint.
json fingerprint_params(const Config& c, agent::StrategyId strategy);

struct EvalOptions {
    std::string run_id;  // empty: <dataset>-<strategy>-r<rounds>
    std::filesystem::path runs_dir = "runs";
    int workers = 2;
};

struct EvalResult {
    metrics::RunReport report;
    std::vector<sim::SessionTranscript> transcripts;  // problem order, then submission order
    std::filesystem::path run_dir;
    llm::TokenUsageSummary usage;  // from the run ledger
    std::vector<std::string> warnings;
};

/// Runs one session per submission of every problem. Each session sees the
/// problem's pool minus entries by the same submitter inside the exclusion
/// window. Writes sessions/*.json, report.json, report.md and usage.json
/// under runs_dir/run_id.
EvalResult run_eval(const corpus::Dataset& dataset, const llm::Gateway& teacher, const llm::Gateway& student,
                    judge::Judge& judge, const agent::AgentConfig& agent_config,
                    const sim::SessionConfig& session_config, const std::string& fingerprint,
                    const EvalOptions& options);

}  // namespace debugta::app
