#include "debugta/app.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "debugta/retrieval.hpp"

namespace debugta::app {

judge::JudgeConfig judge_config(const Config& c) {
    judge::JudgeConfig j;
    j.compiler_cmd = judge::split_command(c.get("compiler_cmd"));
    if (j.compiler_cmd.empty()) throw ConfigError("compiler_cmd is empty");
    j.compile_timeout_ms = c.get_int("compile_timeout_ms");
    j.run_workers = c.get_int("run_workers");
    if (j.run_workers < 1) throw ConfigError("run_workers must be >= 1");
    return j;
}

agent::AgentConfig agent_config(const Config& c) {
    agent::AgentConfig a;
    a.align.max_retries = c.get_int("align.max_retries");
    a.align.skip_jaccard = c.get_double("align.skip_jaccard");
    a.max_snippet_lines = static_cast<std::size_t>(c.get_int("agent.max_snippet_lines"));
    a.bm25.k1 = c.get_double("bm25_k1");
    a.bm25.b = c.get_double("bm25_b");
    a.tokenizer = retrieval::make_tokenizer(c.get("tokenizer"), c.get("bpe_vocab"), c.get("bpe_merges"));
    return a;
}

sim::SessionConfig session_config(const Config& c, agent::StrategyId strategy) {
    sim::SessionConfig s;
    s.max_rounds = c.get_int("session.max_rounds");
    if (s.max_rounds < 1) throw ConfigError("session.max_rounds must be >= 1");
    s.early_stop_on_ac_all = c.get_bool("session.early_stop");
    s.strategy.id = strategy;
    s.plagiarism.tau_sim = c.get_double("plag.tau_sim");
    s.plagiarism.tau_diff = c.get_double("plag.tau_diff");
    s.exclusion_frame = std::chrono::seconds(static_cast<long long>(c.get_double("corpus.window_hours") * 3600));
    return s;
}

llm::GatewayOptions gateway_options(const Config& c) {
    llm::GatewayOptions o;
    o.max_inflight = c.get_int("llm.max_inflight");
    o.transport_retries = c.get_int("llm.transport_retries");
    o.json_reasks = c.get_int("llm.json_reasks");
    return o;
}

std::shared_ptr<llm::Backend> make_backend(const Config& c, const std::string& role) {
    const auto pick = [&](const std::string& key) {
        if (role == "student") {
            auto v = c.get("student." + key);
            if (!v.empty()) return v;
        }
        return c.get("llm." + key);
    };
    const auto kind = pick("backend");
    if (kind == "mock") {
        const auto script = pick("mock_script");
        if (script.empty()) throw ConfigError(role + ": mock backend needs a mock_script");
        return std::make_shared<llm::MockBackend>(llm::MockBackend::from_file(script));
    }
    if (kind == "http") {
        llm::HttpBackendConfig h;
        h.base_url = pick("base_url");
        h.model = role == "student" ? c.get("student.model") : c.get("llm.model");
        h.timeout_ms = c.get_int("llm.timeout_ms");
        if (const char* key = std::getenv("LLM_API_KEY")) h.api_key = key;
        return std::make_shared<llm::HttpBackend>(h);
    }
    throw ConfigError("unknown backend '" + kind + "' (expected http or mock)");
}

corpus::Dataset load_dataset(const Config& c, const std::filesystem::path& root, judge::Judge& judge) {
    corpus::LoadOptions options;
    if (c.get_bool("corpus.verify_pools")) {
        options.verify = [&judge](const corpus::Problem& p, const corpus::PoolEntry& e) {
            return judge.verify_pool_entry(p, e);
        };
    }
    return corpus::load_dataset(root, options);
}

json fingerprint_params(const Config& c, agent::StrategyId strategy) {
    json p = json::object();
    for (const auto& key : {"compiler_cmd", "tokenizer", "bm25_k1", "bm25_b", "corpus.window_hours",
                            "llm.model", "student.model", "align.max_retries", "align.skip_jaccard",
                            "agent.max_snippet_lines", "plag.tau_sim", "plag.tau_diff", "session.max_rounds",
                            "session.early_stop"}) {
        p[key] = c.get(key);
    }
    p["strategy"] = agent::to_string(strategy);
    return p;
}

EvalResult run_eval(const corpus::Dataset& dataset, const llm::Gateway& teacher, const llm::Gateway& student,
                    judge::Judge& judge, const agent::AgentConfig& agent_config,
                    const sim::SessionConfig& session_config, const std::string& fingerprint,
                    const EvalOptions& options) {
    struct Job {
        const corpus::Problem* problem;
        const corpus::Submission* submission;
    };
    std::vector<Job> jobs;
    for (const auto& p : dataset.problems) {
        for (const auto& s : p.submissions) jobs.push_back({&p, &s});
    }
    if (jobs.empty()) throw PreconditionError("dataset " + dataset.id + " has no submissions to evaluate");

    auto run_ledger = std::make_shared<llm::Ledger>();
    const sim::SessionRunner runner(teacher.scoped(run_ledger), student.scoped(run_ledger), judge, agent_config);

    EvalResult result;
    result.run_dir = options.runs_dir /
                     (options.run_id.empty() ? dataset.id + "-" + agent::to_string(session_config.strategy.id) +
                                                   "-r" + std::to_string(session_config.max_rounds)
                                             : options.run_id);
    result.transcripts.resize(jobs.size());
    std::vector<std::string> job_warnings(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (auto i = next++; i < jobs.size(); i = next++) {
            const auto& [problem, submission] = jobs[i];
            const auto pool = corpus::filter_pool(*problem, corpus::window_for(*submission, session_config.exclusion_frame));
            try {
                result.transcripts[i] = runner.run(*problem, submission->code, session_config, pool, submission->id);
            } catch (const sim::SessionAborted& e) {
                result.transcripts[i] = e.partial();
                job_warnings[i] = problem->id + "/" + submission->id + ": session aborted: " + e.what();
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(options.workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> threads;
    for (int w = 1; w < n_workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    for (auto& w : job_warnings) {
        if (!w.empty()) result.warnings.push_back(std::move(w));
    }

    for (auto& t : result.transcripts) {
        t.config_fingerprint = fingerprint;
        sim::save_transcript(t, result.run_dir);
    }
    result.report = metrics::aggregate(result.transcripts, dataset.id);
    result.usage = llm::usage_report(run_ledger->entries());

    const std::vector<metrics::RunReport> reports{result.report};
    const auto table = metrics::render_table(reports);
    write_file(result.run_dir / "report.json", metrics::to_json(result.report).dump(2) + "\n");
    std::string md = "# " + dataset.id + " / " + result.report.strategy_id + "\n\n" + table.markdown +
                     "\nSessions: " + std::to_string(result.report.n_problems) +
                     ", tokens: " + std::to_string(result.report.tokens_total) + "\n\n" +
                     "Per-round AC Rate (" + result.report.curve_convention + "):\n\n| Round | AC Rate |\n|---:|---:|\n";
    for (const auto& [round, value] : result.report.per_round_curve) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "| %d | %.2f |\n", round, value);
        md += buf;
    }
    md += "\nConfig fingerprint: `" + result.report.config_fingerprint + "`\n";
    write_file(result.run_dir / "report.md", md);
    write_file(result.run_dir / "usage.json", llm::to_json(result.usage).dump(2) + "\n");
    return result;
}

}  // namespace debugta::app
