// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <thread>

#include "debugta/align.hpp"
#include "debugta/metrics.hpp"
#include "debugta/plagiarism.hpp"
#include "debugta/retrieval.hpp"
#include "debugta/service.hpp"
#include "debugta/simulator.hpp"
#include "support.hpp"

using namespace debugta;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances, pinned.
constexpr double kBm25Tol = 1e-9;
constexpr double kRateTol = 1e-9;
constexpr double kRoSeconds = 10.0;
constexpr double kJudgeSeconds = 60.0;
constexpr std::size_t kMinLeakProbe = 6;  // shorter test strings collide with ordinary JSON

struct Check {
    bool ok = true;
    std::string detail;
    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void expect(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- 1: Ratcliff-Obershelp ------------------------------------------------

// Longest block by brute force: walk every diagonal of the a x b grid, split
// it into maximal equal runs, keep the longest (earliest in a, then in b), and
// recurse on both sides.
int ro_oracle(const char* a, int alo, int ahi, const char* b, int blo, int bhi) {
    int best = 0, bi = alo, bj = blo;
    for (int d = blo - ahi + 1; d < bhi - alo; ++d) {
        int i = std::max(alo, blo - d);
        int run = 0;
        for (; i < ahi && i + d < bhi; ++i) {
            run = a[i] == b[i + d] ? run + 1 : 0;
            if (run == 0 || run < best) continue;
            const int si = i + 1 - run;
            if (run > best || (run == best && (si < bi || (si == bi && si + d < bj)))) {
                best = run, bi = si, bj = si + d;
            }
        }
    }
    if (best == 0) return 0;
    return best + ro_oracle(a, alo, bi, b, blo, bj) + ro_oracle(a, bi + best, ahi, b, bj + best, bhi);
}

double oracle_ratio(const std::string& a, const std::string& b) {
    const int total = static_cast<int>(a.size() + b.size());
    if (total == 0) return 1.0;
    const int m = ro_oracle(a.data(), 0, static_cast<int>(a.size()), b.data(), 0, static_cast<int>(b.size()));
    return 2.0 * m / total;
}

std::vector<std::string> as_tokens(const std::string& s) {
    std::vector<std::string> out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

Check criterion_ro() {
    Check c;
    const auto t0 = Clock::now();
    std::vector<std::string> words{""};
    for (std::size_t begin = 0, len = 1; len <= 8; ++len) {
        const std::size_t end = words.size();
        for (std::size_t w = begin; w < end; ++w) {
            if (words[w].size() != len - 1) continue;
            for (char ch : {'a', 'b', 'c'}) words.push_back(words[w] + ch);
        }
        begin = end;
    }
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(words.size());
    for (const auto& w : words) tokens.push_back(as_tokens(w));

    // Both sides compare tokens only for equality, so a pair and its image
    // under any permutation of {a,b,c} have the same ratio. Every pair is
    // covered by the representative whose concatenation introduces letters in
    // the order a, b, c.
    auto canonical_prefix = [](const std::string& w, char& next) {
        for (char ch : w) {
            if (ch > next) return false;
            if (ch == next) ++next;
        }
        return true;
    };
    // Split the outer words across threads; each records its first mismatch.
    const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::size_t> counts(n_threads, 0);
    std::vector<std::string> mismatches(n_threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < words.size(); i += n_threads) {
                char after_a = 'a';
                if (!canonical_prefix(words[i], after_a)) continue;
                for (std::size_t j = 0; j < words.size(); ++j) {
                    char next = after_a;
                    if (!canonical_prefix(words[j], next)) continue;
                    ++counts[t];
                    if (plagiarism::seq_ratio(tokens[i], tokens[j]) != oracle_ratio(words[i], words[j])) {
                        mismatches[t] = "mismatch on '" + words[i] + "' vs '" + words[j] + "'";
                        return;
                    }
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    std::size_t checked = 0;
    for (unsigned t = 0; t < n_threads; ++t) {
        checked += counts[t];
        if (!mismatches[t].empty()) c.fail(mismatches[t]);
    }
    const std::size_t pairs = words.size() * words.size();
    std::mt19937 rng(703);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        std::string a(rng() % 41, 'a'), b(rng() % 41, 'a');
        const int alphabet = 2 + static_cast<int>(rng() % 5);
        for (auto& ch : a) ch = static_cast<char>('a' + rng() % alphabet);
        for (auto& ch : b) ch = static_cast<char>('a' + rng() % alphabet);
        if (plagiarism::seq_ratio(as_tokens(a), as_tokens(b)) != oracle_ratio(a, b)) c.fail("random mismatch on '" + a + "' vs '" + b + "'");
    }
    const double secs = seconds_since(t0);
    c.expect(secs < kRoSeconds, "took " + std::to_string(secs) + " s");
    if (c.ok) c.detail = std::to_string(pairs) + " pairs via " + std::to_string(checked) +
                         " relabeling classes + 1000 random, " + std::to_string(secs) + " s";
    return c;
}

// ---- 2: plagiarism decision table -----------------------------------------

Check criterion_decision() {
    Check c;
    std::mt19937 rng(704);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double grid[] = {0.0, 0.1, 0.5, 0.7, 0.8, 0.9, 1.0};
    for (int trial = 0; trial < 10000 && c.ok; ++trial) {
        plagiarism::PlagiarismConfig cfg{trial % 3 == 0 ? 0.8 : u(rng), trial % 5 == 0 ? 0.1 : u(rng) * 0.3};
        plagiarism::SimilarityTriple t;
        if (trial % 2 == 0) {
            t = {u(rng), u(rng), u(rng)};
        } else {  // land on the thresholds
            t = {grid[rng() % 7], grid[rng() % 7], grid[rng() % 7]};
        }
        int expect = 4;
        if (t.s_se > cfg.tau_sim) {
            expect = 1;
        } else if (t.s_ef > cfg.tau_sim || t.s_ef > t.s_sf) {
            expect = 2;
        } else if (t.s_sf > cfg.tau_sim || t.s_sf > t.s_ef + cfg.tau_diff) {
            expect = 3;
        }
        const auto v = plagiarism::decide(t, cfg);
        if (static_cast<int>(v.branch) != expect || v.plagiarized != (expect == 3)) {
            c.fail("triple (" + std::to_string(t.s_sf) + ", " + std::to_string(t.s_ef) + ", " +
                   std::to_string(t.s_se) + ") fired " + std::to_string(static_cast<int>(v.branch)));
        }
    }
    const auto& s = testsupport::pool_entry("sum", "sum_c").code;
    const auto& e = testsupport::submission("sum", "sum_overflow").code;
    c.expect(plagiarism::plag_check(s, e, s).plagiarized, "F = S* not plagiarized");
    c.expect(!plagiarism::plag_check(s, e, e).plagiarized, "F = E plagiarized");
    const auto near_s = s + "\nint helper() { return 0; }\n";
    const auto close = plagiarism::plag_check(s, near_s, s);
    c.expect(!close.plagiarized && close.branch == plagiarism::Branch::reference_close_to_erroneous,
             "E close to S* plagiarized");
    if (c.ok) c.detail = "10000 random triples + 3 canonical cases";
    return c;
}

// ---- 3: BM25 ----------------------------------------------------------------

Check criterion_bm25() {
    Check c;
    std::mt19937 rng(705);
    const double k1 = 1.2, b = 0.75;
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const int vocab = 2 + static_cast<int>(rng() % 12);
        auto random_doc = [&](std::size_t max_len) {
            retrieval::TokenSequence d;
            d.tokens.resize(rng() % (max_len + 1));
            for (auto& t : d.tokens) t = "t" + std::to_string(rng() % vocab);
            return d;
        };
        std::vector<retrieval::TokenSequence> docs(1 + rng() % 10);
        for (auto& d : docs) d = random_doc(50);
        const auto query = random_doc(50);

        const double n = static_cast<double>(docs.size());
        double avgdl = 0;
        for (const auto& d : docs) avgdl += static_cast<double>(d.tokens.size());
        avgdl /= n;
        std::vector<double> want(docs.size(), 0.0);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (const auto& q : query.tokens) {
                const double f = static_cast<double>(std::count(docs[d].tokens.begin(), docs[d].tokens.end(), q));
                if (f == 0) continue;
                double nq = 0;
                for (const auto& other : docs) nq += std::find(other.tokens.begin(), other.tokens.end(), q) != other.tokens.end();
                const double idf = std::log((n - nq + 0.5) / (nq + 0.5) + 1.0);
                const double ratio = avgdl > 0 ? static_cast<double>(docs[d].tokens.size()) / avgdl : 1.0;
                want[d] += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * ratio));
            }
        }
        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return want[x] > want[y]; });

        const auto got = retrieval::bm25_rank(query, docs, {k1, b});
        if (got.size() != docs.size()) {
            c.fail("ranking size");
            break;
        }
        for (std::size_t r = 0; r < got.size(); ++r) {
            if (std::abs(got[r].score - want[got[r].index]) > kBm25Tol) c.fail("score off at trial " + std::to_string(trial));
            // Rank positions may differ only among scores equal within tolerance.
            if (std::abs(want[order[r]] - got[r].score) > kBm25Tol) c.fail("order differs at trial " + std::to_string(trial));
        }
    }
    if (c.ok) c.detail = "1000 corpora, tolerance 1e-9";
    return c;
}

// ---- 4: judge on the toy corpus --------------------------------------------

Check criterion_judge() {
    Check c;
    const auto t0 = Clock::now();
    auto& judge = testsupport::shared_judge();
    const auto& ds = testsupport::toy();
    std::size_t entries = 0;
    for (const auto& p : ds.problems) {
        c.expect(p.tests.size() >= 6 && p.tests.size() <= 10, p.id + " has " + std::to_string(p.tests.size()) + " tests");
        for (const auto& e : p.pool) {
            ++entries;
            c.expect(judge.run_tests(e.code, p).ac_all, "pool entry " + e.id + " not accepted");
        }
    }
    const std::vector<std::tuple<std::string, std::string, double>> designed{
        {"sum", "sum_overflow", 70.0},          {"max", "max_zero_init", 75.0},
        {"sort", "sort_last_skipped", 62.5},    {"reverse", "reverse_word_only", 200.0 / 3.0},
        {"gcd", "gcd_subtract", 75.0},          {"reverse", "reverse_ok", 100.0},
        {"sum", "sum_syntax", 0.0},
    };
    for (const auto& [problem, sub, rate] : designed) {
        const auto r = judge.run_tests(testsupport::submission(problem, sub).code, ds.at(problem));
        c.expect(std::abs(r.ac_rate - rate) < kRateTol,
                 sub + " scored " + std::to_string(r.ac_rate) + ", designed " + std::to_string(rate));
        if (sub == "gcd_subtract") {
            for (const auto& t : r.per_test) {
                c.expect(t.verdict == judge::Verdict::AC || t.verdict == judge::Verdict::TLE,
                         "gcd_subtract failing test is not TLE");
            }
        }
    }
    const auto spin = judge.run_tests("int main() { while (1); }\n", ds.at("sum"));
    for (const auto& t : spin.per_test) c.expect(t.verdict == judge::Verdict::TLE, "while(1) not TLE");
    const double secs = seconds_since(t0);
    c.expect(secs < kJudgeSeconds, "took " + std::to_string(secs) + " s");
    if (c.ok) c.detail = std::to_string(entries) + " pool entries, 7 designed rates, " + std::to_string(secs) + " s";
    return c;
}

// ---- 5: alignment round trip -------------------------------------------------

Check criterion_alignment() {
    Check c;
    auto& judge = testsupport::shared_judge();
    const auto& sum = testsupport::toy().at("sum");
    align::VariableMapping m;
    m.pairs = {{"n", "M"}, {"t", "i"}, {"sum", "s"}};
    const auto renamed = align::apply_mapping(testsupport::pool_entry("sum", "sum_a").code, m);
    c.expect(renamed.find("sum") == std::string::npos, "sum not renamed");
    c.expect(judge.compile(renamed).success, "renamed program does not compile");
    c.expect(judge.run_tests(renamed, sum).ac_all, "renamed program fails tests");

    const std::string two_vars =
        "#include <iostream>\nint main() {\n    long long a, b;\n    std::cin >> a >> b;\n"
        "    std::cout << a - b << ' ' << a * 3 + b << ' ' << (a > b ? \"a\" : \"b\") << '\\n';\n}\n";
    align::VariableMapping swap;
    swap.pairs = {{"a", "b"}, {"b", "a"}};
    const auto swapped = align::apply_mapping(two_vars, swap);
    c.expect(swapped != two_vars, "swap changed nothing");
    corpus::Problem probe;
    probe.id = "probe";
    for (int i = 0; i < 6; ++i) {
        probe.tests.push_back({i + 1, std::to_string(i * 7 - 3) + " " + std::to_string(5 - i * 2) + "\n", "x\n"});
    }
    const auto before = judge.run_tests(two_vars, probe);
    const auto after = judge.run_tests(swapped, probe);
    for (std::size_t i = 0; i < probe.tests.size(); ++i) {
        c.expect(before.per_test[i].output_excerpt == after.per_test[i].output_excerpt &&
                     !before.per_test[i].output_excerpt.empty(),
                 "swap changed output on test " + std::to_string(i + 1));
    }
    if (c.ok) c.detail = "{n->M, t->i, sum->s} accepted; swap outputs identical on 6 inputs";
    return c;
}

// ---- 6-8: mock sessions ------------------------------------------------------

struct Run {
    sim::SessionTranscript transcript;
    std::vector<llm::LedgerEntry> ledger;
};

Run run_session(const std::string& problem, const std::string& sub) {
    auto ledger = std::make_shared<llm::Ledger>();
    const auto gateway = testsupport::mock_gateway(testsupport::toy_mock(), ledger);
    const sim::SessionRunner runner(gateway, gateway, testsupport::shared_judge());
    const auto& p = testsupport::toy().at(problem);
    const auto& s = testsupport::submission(problem, sub);
    const auto pool = corpus::filter_pool(p, corpus::window_for(s));
    sim::SessionConfig cfg;
    cfg.max_rounds = 3;
    return Run{runner.run(p, s.code, cfg, pool, s.id), ledger->entries()};
}

std::vector<std::string> trace_names(const sim::RoundRecord& r) {
    std::vector<std::string> out;
    if (r.suggestions) {
        for (const auto& t : r.suggestions->source_trace) out.push_back(t.name);
    }
    return out;
}

Check criterion_e2e() {
    Check c;
    const auto syntax = run_session("sum", "sum_syntax");
    c.expect(syntax.transcript.rounds.size() == 1 && syntax.transcript.rounds[0].judge_result.ac_all,
             "syntax session not solved in round 1");
    c.expect(!syntax.transcript.rounds.empty() &&
                 trace_names(syntax.transcript.rounds[0]) == std::vector<std::string>{"compile", "syn_correction"},
             "syntax session left the syntax branch");

    const auto logic = run_session("sum", "sum_overflow");
    c.expect(logic.transcript.final_judge.ac_all && logic.transcript.rounds.size() <= 3,
             "logic session not solved within 3 rounds");
    if (!logic.transcript.rounds.empty()) {
        const auto names = trace_names(logic.transcript.rounds[0]);
        std::vector<std::string> tools;
        for (const auto& n : names) {
            if (n == "compile" || n == "code_search" || n == "align" || n == "logic_correction") tools.push_back(n);
        }
        c.expect(tools == std::vector<std::string>{"compile", "code_search", "align", "logic_correction"},
                 "logic session did not route compile -> retrieve -> align -> correct");
    } else {
        c.fail("logic session ran no rounds");
    }

    const auto leak = run_session("sum", "sum_copy");
    c.expect(leak.transcript.plagiarism.plagiarized, "copied reference not flagged");
    c.expect(leak.transcript.final_judge.ac_rate == 0.0 && leak.transcript.final_judge.original_ac_rate == 100.0,
             "copied reference not zeroed");

    for (const auto& [problem, sub] : std::vector<std::pair<std::string, std::string>>{
             {"sum", "sum_syntax"}, {"sum", "sum_overflow"}, {"sum", "sum_copy"}}) {
        const auto a = sim::to_json(run_session(problem, sub).transcript).dump(2);
        const auto b = sim::to_json(run_session(problem, sub).transcript).dump(2);
        c.expect(a == b, sub + " transcript differs between runs");
    }
    if (c.ok) c.detail = "syntax, logic and leak sessions; transcripts byte-stable";
    return c;
}

std::vector<Run> all_toy_sessions() {
    std::vector<Run> runs;
    for (const auto& p : testsupport::toy().problems) {
        for (const auto& s : p.submissions) runs.push_back(run_session(p.id, s.id));
    }
    return runs;
}

// Test strings that already appear in the public statement are not secrets.
bool has_probe(const std::string& haystack, const std::string& needle, const std::string& statement) {
    const auto trimmed = needle.substr(0, needle.find_last_not_of(" \n\r\t") + 1);
    return trimmed.size() >= kMinLeakProbe && statement.find(trimmed) == std::string::npos &&
           haystack.find(trimmed) != std::string::npos;
}

Check criterion_leaks(const std::vector<Run>& runs) {
    Check c;
    const auto& ds = testsupport::toy();
    std::size_t prompts = 0;
    for (const auto& run : runs) {
        const auto& p = ds.at(run.transcript.problem_id);
        for (const auto& e : run.ledger) {
            if (e.template_id != llm::TemplateId::stubot_revise) continue;
            ++prompts;
            for (const auto& entry : p.pool) c.expect(e.prompt.find(entry.code) == std::string::npos, "student saw " + entry.id);
        }
    }

    testsupport::TempDir dir;
    service::ServiceConfig sc;
    sc.data_dir = dir.path();
    service::SessionService svc(
        ds, agent::DebugTA(testsupport::mock_gateway(testsupport::toy_mock()), testsupport::shared_judge()),
        testsupport::shared_judge(), sc);
    std::vector<json> bodies{svc.handle("GET", "/api/problems", "").body};
    for (const auto& p : ds.problems) {
        for (const auto& s : p.submissions) {
            const auto created = svc.handle("POST", "/api/sessions", json{{"problem_id", p.id}, {"code", s.code}}.dump());
            bodies.push_back(created.body);
            if (created.status != 201) continue;
            const auto id = created.body["session_id"].get<std::string>();
            bodies.push_back(svc.handle("POST", "/api/sessions/" + id + "/submit",
                                        json{{"code", p.pool.front().code}}.dump())
                                 .body);
            bodies.push_back(svc.handle("GET", "/api/sessions/" + id, "").body);
        }
    }
    std::size_t probes = 0;
    for (const auto& p : ds.problems) {
        for (const auto& t : p.tests) {
            probes += has_probe(t.input, t.input, p.statement) + has_probe(t.expected_output, t.expected_output, p.statement);
        }
    }
    for (const auto& body : bodies) {
        const auto text = body.dump();
        for (const char* key : {"\"per_test\"", "\"output_excerpt\"", "\"expected_output\"", "\"input\""}) {
            c.expect(text.find(key) == std::string::npos, std::string("response has ") + key);
        }
        for (const auto& p : ds.problems) {
            for (const auto& t : p.tests) {
                for (const auto* probe : {&t.input, &t.expected_output}) {
                    // JSON escapes newlines, so compare against the escaped form too.
                    const auto escaped = json(*probe).dump();
                    const auto inner = escaped.substr(1, escaped.size() - 2);
                    c.expect(!has_probe(text, *probe, p.statement) && !has_probe(text, inner, p.statement),
                             "response contains test data of " + p.id + " test " + std::to_string(t.index));
                }
            }
        }
    }
    if (c.ok) {
        c.detail = std::to_string(prompts) + " student prompts, " + std::to_string(bodies.size()) + " responses, " +
                   std::to_string(probes) + " test strings probed";
    }
    return c;
}

bool same_counts(const llm::UsageCounts& a, const llm::UsageCounts& b) {
    return a.prompt_tokens == b.prompt_tokens && a.completion_tokens == b.completion_tokens && a.calls == b.calls;
}

Check criterion_tokens(const std::vector<Run>& runs) {
    Check c;
    std::vector<llm::LedgerEntry> all;
    llm::UsageCounts running;
    for (const auto& run : runs) {
        llm::UsageCounts by_hand;
        for (const auto& e : run.ledger) {
            by_hand.prompt_tokens += e.prompt_tokens;
            by_hand.completion_tokens += e.completion_tokens;
            ++by_hand.calls;
        }
        const auto report = llm::usage_report(run.ledger);
        c.expect(same_counts(report.totals, by_hand), run.transcript.submission_id + ": ledger totals differ");
        c.expect(same_counts(run.transcript.tokens, by_hand), run.transcript.submission_id + ": transcript totals differ");
        llm::UsageCounts rounds;
        for (const auto& r : run.transcript.rounds) {
            rounds.prompt_tokens += r.tokens.prompt_tokens;
            rounds.completion_tokens += r.tokens.completion_tokens;
            rounds.calls += r.tokens.calls;
        }
        c.expect(same_counts(rounds, by_hand), run.transcript.submission_id + ": per-round totals differ");

        const auto before = llm::usage_report(all);
        all.insert(all.end(), run.ledger.begin(), run.ledger.end());
        const auto after = llm::usage_report(all);
        running.prompt_tokens += report.totals.prompt_tokens;
        running.completion_tokens += report.totals.completion_tokens;
        running.calls += report.totals.calls;
        c.expect(same_counts(after.totals, running), "concatenated totals not additive");
        for (const auto& [tmpl, counts] : after.per_template) {
            llm::UsageCounts expect;
            for (const auto* part : {&before, &report}) {
                auto it = part->per_template.find(tmpl);
                if (it == part->per_template.end()) continue;
                expect.prompt_tokens += it->second.prompt_tokens;
                expect.completion_tokens += it->second.completion_tokens;
                expect.calls += it->second.calls;
            }
            c.expect(same_counts(counts, expect), "per-template usage not additive for " + tmpl);
        }
    }
    c.expect(running.calls > 0, "no model calls recorded");
    if (c.ok) c.detail = std::to_string(runs.size()) + " sessions, " + std::to_string(running.calls) + " calls, " +
                         std::to_string(running.prompt_tokens + running.completion_tokens) + " tokens";
    return c;
}

// ---- 9: metrics ---------------------------------------------------------------

sim::SessionTranscript hand_transcript(double initial, std::vector<double> rounds, bool plagiarized) {
    auto res = [](double rate) {
        judge::JudgeResult r;
        r.ac_rate = rate;
        r.ac_all = rate == 100.0;
        return r;
    };
    sim::SessionTranscript t;
    t.strategy = "debugta";
    t.max_rounds = 3;
    t.config_fingerprint = "fp";
    t.initial_judge = res(initial);
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        sim::RoundRecord r;
        r.round_index = static_cast<int>(i + 1);
        r.judge_result = res(rounds[i]);
        t.rounds.push_back(r);
    }
    const auto last = rounds.empty() ? t.initial_judge : t.rounds.back().judge_result;
    t.plagiarism.plagiarized = plagiarized;
    t.plagiarism.branch = plagiarized ? plagiarism::Branch::final_copies_reference : plagiarism::Branch::no_evidence;
    t.final_judge = plagiarism::apply_plag_zeroing(last, t.plagiarism);
    return t;
}

Check criterion_metrics() {
    Check c;
    const std::vector<sim::SessionTranscript> ts{
        hand_transcript(0, {100}, false),         hand_transcript(40, {60, 80, 90}, false),
        hand_transcript(70, {100}, true),         hand_transcript(100, {}, false),
        hand_transcript(25, {25, 50, 100}, false), hand_transcript(10, {100}, true),
    };
    c.expect(ts[2].final_judge.ac_rate == 0.0 && !ts[2].final_judge.ac_all, "zeroing rule not applied");
    const auto r = metrics::aggregate(ts, "hand");
    // (100 + 90 + 0 + 100 + 100 + 0) / 6 = 65; all-pass 3 of 6; copied 2 of 6.
    c.expect(r.n_problems == 6, "n_problems");
    c.expect(std::abs(r.ac_rate_mean - 65.00) < 0.005, "ac_rate_mean " + std::to_string(r.ac_rate_mean));
    c.expect(std::abs(r.ac_all_rate - 50.00) < 0.005, "ac_all_rate " + std::to_string(r.ac_all_rate));
    c.expect(std::abs(r.plag_rate - 33.33) < 0.005, "plag_rate " + std::to_string(r.plag_rate));
    if (c.ok) c.detail = "ac_rate_mean 65.00, ac_all_rate 50.00, plag_rate 33.33";
    return c;
}

}  // namespace

int main() {
    std::vector<Run> runs;
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
        {"1 Ratcliff-Obershelp oracle equivalence", criterion_ro},
        {"2 plagiarism decision table", criterion_decision},
        {"3 BM25 oracle equivalence", criterion_bm25},
        {"4 judge correctness on the toy corpus", criterion_judge},
        {"5 alignment round trip", criterion_alignment},
        {"6 end-to-end mock sessions", criterion_e2e},
        {"7 leak-freedom scans", [&] {
             if (runs.empty()) runs = all_toy_sessions();
             return criterion_leaks(runs);
         }},
        {"8 token accounting", [&] {
             if (runs.empty()) runs = all_toy_sessions();
             return criterion_tokens(runs);
         }},
        {"9 metrics arithmetic", criterion_metrics},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.fail(std::string("exception: ") + e.what());
        }
        failed += !c.ok;
        std::printf("[%s] criterion %s: %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
