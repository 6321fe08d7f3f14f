#include "debugta/simulator.hpp"

#include "debugta/retrieval.hpp"

namespace debugta::sim {

namespace {

json usage_json(const llm::UsageCounts& c) {
    return json{{"prompt_tokens", c.prompt_tokens}, {"completion_tokens", c.completion_tokens}, {"calls", c.calls}};
}

llm::UsageCounts usage_from_json(const json& j) {
    llm::UsageCounts c;
    c.prompt_tokens = j.value("prompt_tokens", 0LL);
    c.completion_tokens = j.value("completion_tokens", 0LL);
    c.calls = j.value("calls", 0LL);
    return c;
}

}  // namespace

json to_json(const SessionConfig& c) {
    return json{{"max_rounds", c.max_rounds},
                {"early_stop_on_ac_all", c.early_stop_on_ac_all},
                {"strategy", agent::to_string(c.strategy.id)},
                {"tau_sim", c.plagiarism.tau_sim},
                {"tau_diff", c.plagiarism.tau_diff},
                {"exclusion_frame_s", c.exclusion_frame.count()}};
}

json to_json(const SessionTranscript& t) {
    json rounds = json::array();
    for (const auto& r : t.rounds) {
        json jr{{"round_index", r.round_index},
                {"code_before", r.code_before},
                {"suggestions", r.suggestions ? agent::to_json(*r.suggestions, false) : json(nullptr)},
                {"code_after", r.code_after},
                {"judge_result", judge::to_json(r.judge_result, false)},
                {"tokens", usage_json(r.tokens)},
                {"failed", r.failed}};
        if (!r.note.empty()) jr["note"] = r.note;
        rounds.push_back(std::move(jr));
    }
    json j{{"problem_id", t.problem_id},
           {"submission_id", t.submission_id},
           {"strategy", t.strategy},
           {"max_rounds", t.max_rounds},
           {"initial_code", t.initial_code},
           {"initial_judge", judge::to_json(t.initial_judge, false)},
           {"rounds", rounds},
           {"final_code", t.final_code},
           {"final_judge", judge::to_json(t.final_judge, false)},
           {"plagiarism", plagiarism::to_json(t.plagiarism)},
           {"stopped_early", t.stopped_early},
           {"tokens", usage_json(t.tokens)},
           {"config_fingerprint", t.config_fingerprint}};
    if (!t.aborted.empty()) j["aborted"] = t.aborted;
    return j;
}

SessionTranscript transcript_from_json(const json& j) {
    SessionTranscript t;
    t.problem_id = j.at("problem_id").get<std::string>();
    t.submission_id = j.value("submission_id", "");
    t.strategy = j.at("strategy").get<std::string>();
    t.max_rounds = j.at("max_rounds").get<int>();
    t.initial_code = j.value("initial_code", "");
    t.initial_judge = judge::judge_result_from_json(j.at("initial_judge"));
    for (const auto& jr : j.at("rounds")) {
        RoundRecord r;
        r.round_index = jr.at("round_index").get<int>();
        r.code_before = jr.value("code_before", "");
        if (!jr.at("suggestions").is_null()) r.suggestions = agent::suggestions_from_json(jr["suggestions"]);
        r.code_after = jr.value("code_after", "");
        r.judge_result = judge::judge_result_from_json(jr.at("judge_result"));
        r.tokens = usage_from_json(jr.value("tokens", json::object()));
        r.failed = jr.value("failed", false);
        r.note = jr.value("note", "");
        t.rounds.push_back(std::move(r));
    }
    t.final_code = j.value("final_code", "");
    t.final_judge = judge::judge_result_from_json(j.at("final_judge"));
    t.plagiarism = plagiarism::verdict_from_json(j.at("plagiarism"));
    t.stopped_early = j.at("stopped_early").get<bool>();
    t.tokens = usage_from_json(j.value("tokens", json::object()));
    t.config_fingerprint = j.value("config_fingerprint", "");
    t.aborted = j.value("aborted", "");
    return t;
}

std::string StuBot::revise(std::string_view code, const agent::SuggestionSet& suggestions,
                           std::string_view question) const {
    if (suggestions.items.empty()) throw PreconditionError("stubot: empty suggestion set");
    llm::ChatRequest req;
    req.template_id = llm::TemplateId::stubot_revise;
    req.slots = {{"question", std::string(question)},
                 {"code", std::string(code)},
                 {"suggestions", agent::render_items(suggestions)}};
    return llm::complete_parsed(
        gateway_, req, [](const std::string& text) { return llm::extract_code(text); }, llm::kCodeReminder);
}

SessionRunner::SessionRunner(llm::Gateway teacher, llm::Gateway student, judge::Judge& judge,
                             agent::AgentConfig agent_config)
    : teacher_(std::move(teacher)), student_(std::move(student)), judge_(judge),
      agent_config_(std::move(agent_config)) {}

SessionTranscript SessionRunner::run(const corpus::Problem& problem, std::string_view initial_code,
                                     const SessionConfig& config) const {
    return run(problem, initial_code, config, problem.pool);
}

SessionTranscript SessionRunner::run(const corpus::Problem& problem, std::string_view initial_code,
                                     const SessionConfig& config, std::span<const corpus::PoolEntry> pool,
                                     std::string submission_id) const {
    if (config.max_rounds < 1) throw PreconditionError("max_rounds must be >= 1");
    const auto strategy = config.strategy.id;
    const bool code_mode = agent::output_mode(strategy) == agent::OutputMode::code;

    SessionTranscript t;
    t.problem_id = problem.id;
    t.submission_id = std::move(submission_id);
    t.strategy = agent::to_string(strategy);
    t.max_rounds = config.max_rounds;
    t.initial_code = std::string(initial_code);

    auto session_ledger = std::make_shared<llm::Ledger>(teacher_.ledger());
    std::string current(initial_code);
    std::optional<corpus::PoolEntry> reference;

    const auto finish_tokens = [&] { t.tokens = llm::usage_report(session_ledger->entries()).totals; };
    const auto abort = [&](const std::string& why) {
        t.final_code = current;
        t.final_judge = t.rounds.empty() ? t.initial_judge : t.rounds.back().judge_result;
        t.aborted = why;
        finish_tokens();
        return SessionAborted(why, t);
    };

    try {
        t.initial_judge = judge_.run_tests(current, problem);
    } catch (const EnvironmentError& e) {
        throw abort(std::string("judge: ") + e.what());
    }
    judge::JudgeResult last = t.initial_judge;

    if (last.ac_all && config.early_stop_on_ac_all) {
        t.stopped_early = true;
    } else {
        for (int round = 1; round <= config.max_rounds; ++round) {
            auto round_ledger = std::make_shared<llm::Ledger>(session_ledger);
            const agent::DebugTA teacher(teacher_.scoped(round_ledger), judge_, agent_config_);
            const StuBot student(student_.scoped(round_ledger));

            RoundRecord rec;
            rec.round_index = round;
            rec.code_before = current;
            rec.code_after = current;
            try {
                if (code_mode) {
                    auto out = teacher.run_baseline(strategy, current, problem, pool);
                    if (out.reference) reference = out.reference;
                    rec.code_after = *out.code;
                } else {
                    agent::SuggestionSet suggestions;
                    if (strategy == agent::StrategyId::debugta) {
                        auto teaching = teacher.debug_and_teach(current, problem, pool);
                        if (teaching.reference) reference = teaching.reference;
                        suggestions = std::move(teaching.suggestions);
                    } else {
                        auto out = teacher.run_baseline(strategy, current, problem, pool);
                        if (out.reference) reference = out.reference;
                        suggestions = std::move(*out.suggestions);
                    }
                    rec.suggestions = suggestions;
                    try {
                        rec.code_after = student.revise(current, suggestions, problem.statement);
                    } catch (const MalformedModelOutput& e) {
                        rec.failed = true;
                        rec.note = std::string("student revision unusable: ") + e.what();
                    }
                }
            } catch (const MalformedModelOutput& e) {
                rec.failed = true;
                rec.note = std::string("teacher output unusable: ") + e.what();
            } catch (const agent::AgentAborted& e) {
                throw abort(std::string("teacher: ") + e.what());
            } catch (const GatewayError& e) {
                throw abort(std::string("gateway: ") + e.what());
            }

            try {
                rec.judge_result = judge_.run_tests(rec.code_after, problem);
            } catch (const EnvironmentError& e) {
                throw abort(std::string("judge: ") + e.what());
            }
            rec.tokens = llm::usage_report(round_ledger->entries()).totals;
            current = rec.code_after;
            last = rec.judge_result;
            t.rounds.push_back(std::move(rec));

            if (code_mode) break;
            if (last.ac_all && config.early_stop_on_ac_all) {
                t.stopped_early = round < config.max_rounds;
                break;
            }
        }
    }

    t.final_code = current;
    if (!reference && !pool.empty()) {
        const auto& tok = agent_config_.tokenizer ? *agent_config_.tokenizer : retrieval::lexical_tokenizer();
        reference = retrieval::code_search(t.final_code, pool, tok, agent_config_.bm25).entry;
    }
    if (reference) {
        t.plagiarism = plagiarism::plag_check(reference->code, t.initial_code, t.final_code, config.plagiarism);
        t.plagiarism.reference_id = reference->id;
    } else {
        t.plagiarism.plagiarized = false;
        t.plagiarism.branch = plagiarism::Branch::no_reference;
        t.plagiarism.config = config.plagiarism;
    }
    t.final_judge = plagiarism::apply_plag_zeroing(last, t.plagiarism);
    finish_tokens();
    return t;
}

std::filesystem::path save_transcript(const SessionTranscript& t, const std::filesystem::path& run_dir) {
    const auto name = t.problem_id + "__" + (t.submission_id.empty() ? "adhoc" : t.submission_id) + ".json";
    const auto path = run_dir / "sessions" / name;
    write_file(path, to_json(t).dump(2) + "\n");
    return path;
}

}  // namespace debugta::sim
