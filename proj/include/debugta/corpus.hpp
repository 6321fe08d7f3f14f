#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "debugta/common.hpp"

namespace debugta::corpus {

/// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

/// Accepts a JSON integer (epoch seconds) or an ISO-8601 UTC string
/// (`YYYY-MM-DDTHH:MM:SS[Z]`).
std::optional<Timestamp> parse_timestamp(const json& value);

struct TestCase {
    int index = 0;  // 1-based, contiguous
    std::string input;
    std::string expected_output;
};

enum class Provenance { student, official, community };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct PoolEntry {
    std::string id;
    std::string code;
    std::optional<Timestamp> submitted_at;
    Provenance provenance = Provenance::official;
    std::optional<std::string> submitter;
};

struct Submission {
    std::string id;
    std::string problem_id;
    std::string code;
    std::optional<Timestamp> submitted_at;
    std::optional<std::string> submitter;
};

inline constexpr int kDefaultTimeLimitMs = 2000;
inline constexpr int kDefaultMemoryLimitKb = 262144;

struct Problem {
    std::string id;
    std::string title;
    std::string statement;
    std::vector<TestCase> tests;
    std::vector<PoolEntry> pool;
    std::vector<Submission> submissions;
    int time_limit_ms = kDefaultTimeLimitMs;
    int memory_limit_kb = kDefaultMemoryLimitKb;
};

struct Dataset {
    std::string id;
    std::filesystem::path root;
    std::vector<Problem> problems;
    bool pools_verified = false;
    std::vector<std::string> report;  // non-fatal validation findings

    const Problem* find(const std::string& problem_id) const;
    const Problem& at(const std::string& problem_id) const;
};

struct LoadOptions {
    /// Ingest verification hook: returns a failure reason when a pool entry
    /// does not compile or pass every test. Entries that fail are dropped
    /// and reported. Leave empty to skip verification.
    std::function<std::optional<std::string>(const Problem&, const PoolEntry&)> verify;
};

/// Loads `<root>/problems/<id>/...`. Throws LoadError naming the offending
/// path for a missing manifest, duplicate ids, or a problem without tests.
Dataset load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

struct SubmissionWindow {
    std::optional<std::string> submitter;
    std::optional<Timestamp> at;
    std::chrono::seconds frame{std::chrono::hours(24)};
};

SubmissionWindow window_for(const Submission& submission,
                            std::chrono::seconds frame = std::chrono::hours(24));

/// Pool minus entries by the same submitter within `frame` of the
/// submission time. Order preserved.
std::vector<PoolEntry> filter_pool(const Problem& problem, const SubmissionWindow& exclusion);

/// Picks the earliest submission of a series (ties: smallest id). Entries
/// without timestamps sort last.
const Submission& first_in_series(std::span<const Submission> series);

}  // namespace debugta::corpus
