#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "debugta/common.hpp"
#include "debugta/corpus.hpp"
#include "debugta/sandbox.hpp"

namespace debugta::judge {

enum class Verdict { AC, WA, TLE, MLE, RE, CE };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CompileLimits {
    int timeout_ms = 30000;
};

struct CompileReport {
    bool success = false;
    std::string messages;  // errors; empty iff success
    std::string warnings;  // diagnostics of a successful compile
    int compiler_exit_code = -1;
};

json to_json(const CompileReport& report);

struct TestResult {
    int index = 0;
    Verdict verdict = Verdict::CE;
    int wall_time_ms = 0;
    std::string output_excerpt;
};

struct JudgeResult {
    std::vector<TestResult> per_test;
    double ac_rate = 0.0;  // 100 * #AC / #tests
    bool ac_all = false;
    // Set by plagiarism zeroing: the scores before they were forced to 0.
    std::optional<double> original_ac_rate;
    std::optional<bool> original_ac_all;
};

/// Scores from per-test verdicts (OI-style rate plus the all-pass flag).
JudgeResult score(std::vector<TestResult> per_test);

/// `include_timings=false` drops wall times so that records of deterministic
/// programs are byte-stable.
json to_json(const JudgeResult& result, bool include_timings = true);
JudgeResult judge_result_from_json(const json& j);

/// Strips trailing whitespace on every line and trailing blank lines.
std::string normalize_output(std::string_view text);

struct JudgeConfig {
    std::vector<std::string> compiler_cmd{"g++", "-O2", "-std=c++17"};
    int compile_timeout_ms = 30000;
    int run_workers = 4;
    std::filesystem::path work_dir;  // empty: a fresh directory under the system temp dir
};

/// Splits a command line on whitespace (no quoting).
std::vector<std::string> split_command(const std::string& cmd);

class Judge {
public:
    explicit Judge(JudgeConfig config = {}, std::shared_ptr<Sandbox> sandbox = nullptr);
    ~Judge();
    Judge(const Judge&) = delete;
    Judge& operator=(const Judge&) = delete;

    /// Compiles `program`; artifacts are cached by source hash. Throws
    /// EnvironmentError when the compiler cannot be run at all.
    CompileReport compile(std::string_view program);
    CompileReport compile(std::string_view program, const CompileLimits& limits);

    /// Compiles and runs every test. A compile failure yields an all-CE result.
    JudgeResult run_tests(std::string_view program, const corpus::Problem& problem);

    /// Ingest verification hook for corpus::LoadOptions.
    std::optional<std::string> verify_pool_entry(const corpus::Problem& problem,
                                                 const corpus::PoolEntry& entry);

    const JudgeConfig& config() const { return config_; }

private:
    struct Artifact {
        CompileReport report;
        std::filesystem::path binary;
    };

    Artifact build(std::string_view program, const CompileLimits& limits);
    TestResult run_one(const std::filesystem::path& binary, const corpus::TestCase& test,
                       const RunLimits& limits);

    JudgeConfig config_;
    std::filesystem::path root_;
    bool owns_root_ = false;
    std::shared_ptr<Sandbox> sandbox_;
    std::counting_semaphore<> workers_;
    std::mutex cache_mutex_;
    std::map<std::string, std::shared_future<Artifact>> cache_;
};

}  // namespace debugta::judge
