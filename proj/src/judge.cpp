#include "debugta/judge.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <exception>
#include <sstream>
#include <thread>

namespace debugta::judge {

namespace fs = std::filesystem;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::AC: return "AC";
        case Verdict::WA: return "WA";
        case Verdict::TLE: return "TLE";
        case Verdict::MLE: return "MLE";
        case Verdict::RE: return "RE";
        case Verdict::CE: return "CE";
    }
    return "CE";
}

Verdict verdict_from_string(const std::string& s) {
    for (auto v : {Verdict::AC, Verdict::WA, Verdict::TLE, Verdict::MLE, Verdict::RE, Verdict::CE}) {
        if (to_string(v) == s) return v;
    }
    throw Error("unknown verdict: " + s);
}

json to_json(const CompileReport& report) {
    return json{{"success", report.success},
                {"messages", report.messages},
                {"warnings", report.warnings},
                {"compiler_exit_code", report.compiler_exit_code}};
}

JudgeResult score(std::vector<TestResult> per_test) {
    JudgeResult r;
    r.per_test = std::move(per_test);
    const auto n = r.per_test.size();
    const auto ac = static_cast<std::size_t>(std::count_if(
        r.per_test.begin(), r.per_test.end(), [](const TestResult& t) { return t.verdict == Verdict::AC; }));
    r.ac_rate = n == 0 ? 0.0 : 100.0 * static_cast<double>(ac) / static_cast<double>(n);
    r.ac_all = n > 0 && ac == n;
    return r;
}

json to_json(const JudgeResult& result, bool include_timings) {
    json tests = json::array();
    for (const auto& t : result.per_test) {
        json jt{{"index", t.index}, {"verdict", to_string(t.verdict)}};
        if (include_timings) jt["wall_time_ms"] = t.wall_time_ms;
        jt["output_excerpt"] = t.output_excerpt;
        tests.push_back(std::move(jt));
    }
    json j{{"per_test", std::move(tests)}, {"ac_rate", result.ac_rate}, {"ac_all", result.ac_all}};
    if (result.original_ac_rate) j["original_ac_rate"] = *result.original_ac_rate;
    if (result.original_ac_all) j["original_ac_all"] = *result.original_ac_all;
    return j;
}

JudgeResult judge_result_from_json(const json& j) {
    JudgeResult r;
    for (const auto& jt : j.at("per_test")) {
        r.per_test.push_back(TestResult{jt.at("index").get<int>(),
                                        verdict_from_string(jt.at("verdict").get<std::string>()),
                                        jt.value("wall_time_ms", 0),
                                        jt.value("output_excerpt", std::string{})});
    }
    r.ac_rate = j.at("ac_rate").get<double>();
    r.ac_all = j.at("ac_all").get<bool>();
    if (j.contains("original_ac_rate")) r.original_ac_rate = j["original_ac_rate"].get<double>();
    if (j.contains("original_ac_all")) r.original_ac_all = j["original_ac_all"].get<bool>();
    return r;
}

std::string normalize_output(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r' ||
                                 line.back() == '\v' || line.back() == '\f')) {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out.append(lines[i]);
    }
    return out;
}

std::vector<std::string> split_command(const std::string& cmd) {
    std::istringstream ss(cmd);
    std::vector<std::string> out;
    for (std::string word; ss >> word;) out.push_back(word);
    return out;
}

namespace {

fs::path make_temp_root() {
    std::string tmpl = (fs::temp_directory_path() / "debugta-judge-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) {
        throw EnvironmentError("cannot create judge work dir: " + std::string(std::strerror(errno)));
    }
    return tmpl;
}

struct Permit {
    std::counting_semaphore<>& sem;
    explicit Permit(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~Permit() { sem.release(); }
};

constexpr std::size_t kExcerptBytes = 64;

}  // namespace

Judge::Judge(JudgeConfig config, std::shared_ptr<Sandbox> sandbox)
    : config_(std::move(config)), workers_(std::max(1, config_.run_workers)) {
    if (config_.compiler_cmd.empty()) throw ConfigError("compiler_cmd is empty");
    if (config_.work_dir.empty()) {
        root_ = make_temp_root();
        owns_root_ = true;
    } else {
        root_ = config_.work_dir;
        fs::create_directories(root_);
    }
    sandbox_ = sandbox ? std::move(sandbox) : std::make_shared<RlimitSandbox>(root_ / "runs");
}

Judge::~Judge() {
    if (owns_root_) {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
}

CompileReport Judge::compile(std::string_view program) {
    return compile(program, CompileLimits{config_.compile_timeout_ms});
}

CompileReport Judge::compile(std::string_view program, const CompileLimits& limits) {
    return build(program, limits).report;
}

Judge::Artifact Judge::build(std::string_view program, const CompileLimits& limits) {
    if (program.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return Artifact{CompileReport{false, "empty source: nothing to compile", {}, -1}, {}};
    }
    if (!find_executable(config_.compiler_cmd.front())) {
        throw EnvironmentError("compiler not found: " + config_.compiler_cmd.front());
    }
    std::string cmdline;
    for (const auto& a : config_.compiler_cmd) cmdline += a + '\x1f';
    const auto key = sha256_hex(cmdline + '\0' + std::string(program));

    std::promise<Artifact> promise;
    std::shared_future<Artifact> future;
    bool owner = false;
    {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            future = it->second;
        } else {
            future = promise.get_future().share();
            cache_.emplace(key, future);
            owner = true;
        }
    }
    if (!owner) return future.get();

    try {
        const auto dir = root_ / "build" / key.substr(0, 32);
        fs::create_directories(dir);
        write_file(dir / "main.cpp", program);

        ProcessSpec spec;
        spec.argv = config_.compiler_cmd;
        spec.argv.insert(spec.argv.end(), {"main.cpp", "-o", "main"});
        spec.cwd = dir;
        spec.stderr_path = dir / "compile.log";
        spec.wall_limit_ms = limits.timeout_ms;
        spec.file_size_bytes = 512ull << 20;

        ProcessOutcome outcome;
        {
            Permit permit(workers_);
            outcome = run_process(spec);
        }
        std::string log = fs::exists(spec.stderr_path) ? read_file(spec.stderr_path) : "";
        Artifact artifact;
        if (outcome.wall_timeout) {
            artifact.report = CompileReport{false, "compile timeout", {}, -1};
        } else if (outcome.term_signal == 0 && outcome.exit_code == 0) {
            artifact.report = CompileReport{true, {}, std::move(log), 0};
            artifact.binary = dir / "main";
        } else {
            const int code = outcome.term_signal ? 128 + outcome.term_signal : outcome.exit_code;
            if (log.empty()) log = "compiler exited with code " + std::to_string(code);
            artifact.report = CompileReport{false, std::move(log), {}, code};
        }
        promise.set_value(artifact);
        return artifact;
    } catch (...) {
        {
            std::lock_guard lock(cache_mutex_);
            cache_.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

TestResult Judge::run_one(const fs::path& binary, const corpus::TestCase& test,
                          const RunLimits& limits) {
    RunOutcome run;
    {
        Permit permit(workers_);
        run = sandbox_->run(binary, test.input, limits);
    }
    const auto& p = run.process;
    TestResult r;
    r.index = test.index;
    r.wall_time_ms = p.wall_ms;
    r.output_excerpt = run.stdout_data.substr(0, kExcerptBytes);

    const bool abnormal = p.term_signal != 0 || p.exit_code != 0;
    const bool out_of_memory =
        p.max_rss_kb > limits.memory_limit_kb ||
        (abnormal && (run.stderr_head.find("std::bad_alloc") != std::string::npos ||
                      run.stderr_head.find("Cannot allocate memory") != std::string::npos));
    if (p.wall_timeout || p.term_signal == SIGXCPU || p.wall_ms > limits.time_limit_ms) {
        r.verdict = Verdict::TLE;
    } else if (out_of_memory) {
        r.verdict = Verdict::MLE;
    } else if (abnormal) {
        r.verdict = Verdict::RE;
    } else if (normalize_output(run.stdout_data) == normalize_output(test.expected_output)) {
        r.verdict = Verdict::AC;
    } else {
        r.verdict = Verdict::WA;
    }
    return r;
}

JudgeResult Judge::run_tests(std::string_view program, const corpus::Problem& problem) {
    const auto artifact = build(program, CompileLimits{config_.compile_timeout_ms});
    std::vector<TestResult> results(problem.tests.size());
    if (!artifact.report.success) {
        for (std::size_t i = 0; i < problem.tests.size(); ++i) {
            results[i] = TestResult{problem.tests[i].index, Verdict::CE, 0, {}};
        }
        return score(std::move(results));
    }

    const RunLimits limits{problem.time_limit_ms, problem.memory_limit_kb};
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i = next++; i < problem.tests.size(); i = next++) {
            try {
                results[i] = run_one(artifact.binary, problem.tests[i], limits);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const auto n_threads = std::min<std::size_t>(std::max(1, config_.run_workers), problem.tests.size());
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    threads.clear();
    if (error) std::rethrow_exception(error);
    return score(std::move(results));
}

std::optional<std::string> Judge::verify_pool_entry(const corpus::Problem& problem,
                                                    const corpus::PoolEntry& entry) {
    const auto result = run_tests(entry.code, problem);
    if (result.ac_all) return std::nullopt;
    std::string why = "fails ingest verification:";
    for (const auto& t : result.per_test) {
        if (t.verdict != Verdict::AC) why += " #" + std::to_string(t.index) + "=" + to_string(t.verdict);
    }
    return why;
}

}  // namespace debugta::judge
