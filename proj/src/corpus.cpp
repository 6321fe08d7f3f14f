#include "debugta/corpus.hpp"

#include <algorithm>
#include <ctime>
#include <map>
#include <set>

namespace debugta::corpus {

namespace fs = std::filesystem;

std::optional<Timestamp> parse_timestamp(const json& value) {
    if (value.is_number_integer()) return value.get<Timestamp>();
    if (!value.is_string()) return std::nullopt;
    const auto s = value.get<std::string>();
    std::tm tm{};
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
        return std::nullopt;
    }
    const std::string_view rest(s.c_str() + consumed);
    if (!(rest.empty() || rest == "Z")) return std::nullopt;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<Timestamp>(timegm(&tm));
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::student: return "student";
        case Provenance::official: return "official";
        case Provenance::community: return "community";
    }
    return "official";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "student") return Provenance::student;
    if (s == "official") return Provenance::official;
    if (s == "community") return Provenance::community;
    throw Error("unknown provenance: " + s);
}

const Problem* Dataset::find(const std::string& problem_id) const {
    auto it = std::find_if(problems.begin(), problems.end(),
                           [&](const Problem& p) { return p.id == problem_id; });
    return it == problems.end() ? nullptr : &*it;
}

const Problem& Dataset::at(const std::string& problem_id) const {
    if (const auto* p = find(problem_id)) return *p;
    throw Error("unknown problem: " + problem_id);
}

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return out;
}

json load_meta(const fs::path& file) {
    if (!fs::exists(file)) return json::object();
    try {
        auto meta = json::parse(read_file(file));
        if (!meta.is_object()) throw LoadError(file, "meta.json must be an object keyed by file stem");
        return meta;
    } catch (const json::exception& e) {
        throw LoadError(file, std::string("invalid JSON: ") + e.what());
    }
}

std::vector<TestCase> load_tests(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw LoadError(dir, "no test cases");
    std::vector<TestCase> tests;
    for (int index = 1;; ++index) {
        char stem[16];
        std::snprintf(stem, sizeof stem, "%02d", index);
        const auto in = dir / (std::string(stem) + ".in");
        const auto out = dir / (std::string(stem) + ".out");
        const bool has_in = fs::exists(in);
        const bool has_out = fs::exists(out);
        if (!has_in && !has_out) break;
        if (has_in != has_out) throw LoadError(has_in ? out : in, "missing half of test pair");
        tests.push_back(TestCase{index, read_file(in), read_file(out)});
    }
    const auto all = sorted_files(dir, ".in").size() + sorted_files(dir, ".out").size();
    if (all != tests.size() * 2) throw LoadError(dir, "test indices not contiguous from 01");
    if (tests.empty()) throw LoadError(dir, "no test cases");
    return tests;
}

Problem load_problem(const fs::path& dir, std::vector<std::string>& report) {
    const auto manifest_path = dir / "problem.json";
    if (!fs::exists(manifest_path)) throw LoadError(manifest_path, "missing manifest");
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw LoadError(manifest_path, std::string("invalid JSON: ") + e.what());
    }
    Problem p;
    try {
        p.id = manifest.at("id").get<std::string>();
        p.title = manifest.value("title", p.id);
        p.statement = manifest.at("statement").get<std::string>();
        p.time_limit_ms = manifest.value("time_limit_ms", kDefaultTimeLimitMs);
        p.memory_limit_kb = manifest.value("memory_limit_kb", kDefaultMemoryLimitKb);
    } catch (const json::exception& e) {
        throw LoadError(manifest_path, std::string("bad manifest field: ") + e.what());
    }
    if (p.id.empty()) throw LoadError(manifest_path, "empty id");
    if (p.time_limit_ms <= 0 || p.memory_limit_kb <= 0) {
        throw LoadError(manifest_path, "limits must be positive");
    }
    p.tests = load_tests(dir / "tests");

    const auto pool_meta = load_meta(dir / "pool" / "meta.json");
    for (const auto& file : sorted_files(dir / "pool", ".cpp")) {
        PoolEntry entry;
        entry.id = file.stem().string();
        entry.code = read_file(file);
        if (entry.code.find_first_not_of(" \t\r\n") == std::string::npos) {
            report.push_back(file.string() + ": empty pool entry skipped");
            continue;
        }
        if (pool_meta.contains(entry.id)) {
            const auto& m = pool_meta[entry.id];
            if (m.contains("submitted_at")) entry.submitted_at = parse_timestamp(m["submitted_at"]);
            if (m.contains("submitter")) entry.submitter = m["submitter"].get<std::string>();
            if (m.contains("provenance")) {
                entry.provenance = provenance_from_string(m["provenance"].get<std::string>());
            }
        }
        p.pool.push_back(std::move(entry));
    }

    const auto sub_meta = load_meta(dir / "submissions" / "meta.json");
    std::set<std::string> seen;
    for (const auto& file : sorted_files(dir / "submissions", ".cpp")) {
        Submission s;
        s.id = file.stem().string();
        s.problem_id = p.id;
        s.code = read_file(file);
        if (sub_meta.contains(s.id)) {
            const auto& m = sub_meta[s.id];
            if (m.contains("submitted_at")) s.submitted_at = parse_timestamp(m["submitted_at"]);
            if (m.contains("submitter")) s.submitter = m["submitter"].get<std::string>();
        }
        seen.insert(s.id);
        p.submissions.push_back(std::move(s));
    }
    for (const auto& [key, value] : sub_meta.items()) {
        if (!seen.contains(key)) {
            report.push_back((dir / "submissions" / "meta.json").string() +
                             ": entry for unknown submission " + key);
        }
    }
    return p;
}

}  // namespace

Dataset load_dataset(const fs::path& root, const LoadOptions& options) {
    const auto problems_dir = root / "problems";
    if (!fs::is_directory(problems_dir)) throw LoadError(problems_dir, "missing problems directory");

    Dataset ds;
    ds.root = root;
    ds.id = fs::weakly_canonical(root).filename().string();

    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(problems_dir)) {
        if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());

    std::map<std::string, fs::path> ids;
    for (const auto& dir : dirs) {
        auto problem = load_problem(dir, ds.report);
        if (auto [it, inserted] = ids.emplace(problem.id, dir); !inserted) {
            throw LoadError(dir / "problem.json", "duplicate problem id '" + problem.id +
                                                      "' (also in " + it->second.string() + ")");
        }
        ds.problems.push_back(std::move(problem));
    }

    if (options.verify) {
        for (auto& problem : ds.problems) {
            std::vector<PoolEntry> kept;
            for (auto& entry : problem.pool) {
                if (auto why = options.verify(problem, entry)) {
                    ds.report.push_back(problem.id + "/pool/" + entry.id + ".cpp: " + *why);
                } else {
                    kept.push_back(std::move(entry));
                }
            }
            problem.pool = std::move(kept);
        }
        ds.pools_verified = true;
    }
    return ds;
}

SubmissionWindow window_for(const Submission& submission, std::chrono::seconds frame) {
    return SubmissionWindow{submission.submitter, submission.submitted_at, frame};
}

std::vector<PoolEntry> filter_pool(const Problem& problem, const SubmissionWindow& exclusion) {
    std::vector<PoolEntry> out;
    for (const auto& entry : problem.pool) {
        const bool same_submitter =
            exclusion.submitter && entry.submitter && *exclusion.submitter == *entry.submitter;
        bool in_frame = false;
        if (same_submitter && exclusion.at && entry.submitted_at) {
            const auto delta = std::abs(*entry.submitted_at - *exclusion.at);
            in_frame = delta <= exclusion.frame.count();
        }
        if (!(same_submitter && in_frame)) out.push_back(entry);
    }
    return out;
}

const Submission& first_in_series(std::span<const Submission> series) {
    if (series.empty()) throw PreconditionError("first_in_series: empty series");
    return *std::min_element(series.begin(), series.end(), [](const auto& a, const auto& b) {
        if (a.submitted_at.has_value() != b.submitted_at.has_value()) {
            return a.submitted_at.has_value();
        }
        if (a.submitted_at && *a.submitted_at != *b.submitted_at) {
            return *a.submitted_at < *b.submitted_at;
        }
        return a.id < b.id;
    });
}

}  // namespace debugta::corpus
