#include <gtest/gtest.h>

#include <random>

#include "debugta/plagiarism.hpp"
#include "support.hpp"

using namespace debugta;
using namespace debugta::plagiarism;

namespace {

using Seq = std::vector<std::string>;

// Brute-force Ratcliff-Obershelp: scan every (i, j, k) for the longest block.
std::size_t ro_oracle(const Seq& a, std::size_t alo, std::size_t ahi, const Seq& b, std::size_t blo,
                      std::size_t bhi) {
    std::size_t best = 0, bi = alo, bj = blo;
    for (std::size_t i = alo; i < ahi; ++i) {
        for (std::size_t j = blo; j < bhi; ++j) {
            std::size_t k = 0;
            while (i + k < ahi && j + k < bhi && a[i + k] == b[j + k]) ++k;
            if (k > best) best = k, bi = i, bj = j;
        }
    }
    if (best == 0) return 0;
    return best + ro_oracle(a, alo, bi, b, blo, bj) + ro_oracle(a, bi + best, ahi, b, bj + best, bhi);
}

Seq chars(const std::string& s) {
    Seq out;
    for (char c : s) out.emplace_back(1, c);
    return out;
}

Seq random_seq(std::mt19937& rng, std::size_t max_len, int alphabet) {
    Seq s(rng() % (max_len + 1));
    for (auto& t : s) t = std::string(1, static_cast<char>('a' + rng() % alphabet));
    return s;
}

}  // namespace

TEST(RatcliffObershelp, KnownValues) {
    EXPECT_DOUBLE_EQ(seq_ratio(chars("abcd"), chars("bcde")), 0.75);
    EXPECT_DOUBLE_EQ(seq_ratio(chars(""), chars("")), 1.0);
    EXPECT_DOUBLE_EQ(seq_ratio(chars("abc"), chars("")), 0.0);
    EXPECT_DOUBLE_EQ(seq_ratio(chars("abc"), chars("xyz")), 0.0);
    // "ab" and "ba" cross; once "ab" is taken nothing is left on either side.
    EXPECT_EQ(matched_length(chars("abxba"), chars("baxab")), 2u);
}

TEST(RatcliffObershelp, MatchesBruteForceOracle) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = random_seq(rng, 14, 1 + trial % 4);
        const auto b = random_seq(rng, 14, 1 + trial % 4);
        ASSERT_EQ(matched_length(a, b), ro_oracle(a, 0, a.size(), b, 0, b.size()));
    }
}

TEST(RatcliffObershelp, MatchesOracleOnLongSequences) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_seq(rng, 90, 2 + trial % 20);
        const auto b = random_seq(rng, 90, 2 + trial % 20);
        ASSERT_EQ(matched_length(a, b), ro_oracle(a, 0, a.size(), b, 0, b.size()));
    }
}

TEST(RatcliffObershelp, MatchesDifflibFixture) {
    const auto cases = json::parse(read_file(std::filesystem::path(DEBUGTA_TEST_DATA_DIR) / "difflib_ratios.json"));
    ASSERT_GE(cases.size(), 400u);
    for (const auto& c : cases) {
        const auto a = c["a"].get<Seq>();
        const auto b = c["b"].get<Seq>();
        ASSERT_EQ(matched_length(a, b), c["matched"].get<std::size_t>());
        ASSERT_NEAR(seq_ratio(a, b), c["ratio"].get<double>(), 1e-12);
    }
}

TEST(RatcliffObershelp, Properties) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_seq(rng, 20, 3);
        const auto b = random_seq(rng, 20, 3);
        const double r = seq_ratio(a, b);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
        EXPECT_DOUBLE_EQ(seq_ratio(a, a), 1.0);
        // Not symmetric in general, but the matched length is bounded by both sides.
        EXPECT_LE(matched_length(a, b), std::min(a.size(), b.size()));
    }
}

TEST(Decision, CanonicalCases) {
    const PlagiarismConfig cfg;
    // Copied reference after a dissimilar start.
    auto v = decide({0.95, 0.3, 0.3}, cfg);
    EXPECT_TRUE(v.plagiarized);
    EXPECT_EQ(v.branch, Branch::final_copies_reference);
    // Reference already close to the student's code.
    v = decide({0.95, 0.9, 0.85}, cfg);
    EXPECT_FALSE(v.plagiarized);
    EXPECT_EQ(v.branch, Branch::reference_close_to_erroneous);
    // Final stays with the student's own program.
    v = decide({0.5, 0.9, 0.4}, cfg);
    EXPECT_FALSE(v.plagiarized);
    EXPECT_EQ(v.branch, Branch::final_tracks_erroneous);
    // Neither close nor far enough apart.
    v = decide({0.5, 0.45, 0.3}, cfg);
    EXPECT_FALSE(v.plagiarized);
    EXPECT_EQ(v.branch, Branch::no_evidence);
}

TEST(Decision, MatchesRuleTableOnRandomTriples) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const SimilarityTriple t{u(rng), u(rng), u(rng)};
        const PlagiarismConfig cfg{u(rng), u(rng) * 0.3};
        bool expect;
        if (t.s_se > cfg.tau_sim) {
            expect = false;
        } else if (t.s_ef > cfg.tau_sim || t.s_ef > t.s_sf) {
            expect = false;
        } else if (t.s_sf > cfg.tau_sim || t.s_sf > t.s_ef + cfg.tau_diff) {
            expect = true;
        } else {
            expect = false;
        }
        ASSERT_EQ(decide(t, cfg).plagiarized, expect);
    }
}

TEST(Decision, BoundariesAreStrict) {
    const PlagiarismConfig cfg;
    EXPECT_EQ(decide({0.5, 0.1, 0.8}, cfg).branch, Branch::final_copies_reference);  // s_SE == tau: not > tau
    EXPECT_EQ(decide({0.5, 0.5, 0.1}, cfg).branch, Branch::no_evidence);             // s_EF == s_SF
    EXPECT_EQ(decide({0.6, 0.5, 0.1}, cfg).branch, Branch::no_evidence);             // margin == tau_diff
}

TEST(PlagCheck, IdenticalFinalToReferenceIsPlagiarized) {
    const auto& s = testsupport::pool_entry("sum", "sum_c").code;
    const auto& e = testsupport::submission("sum", "sum_copy").code;
    const auto v = plag_check(s, e, s);
    EXPECT_DOUBLE_EQ(v.triple.s_sf, 1.0);
    EXPECT_TRUE(v.plagiarized);
    EXPECT_EQ(v.branch, Branch::final_copies_reference);
}

TEST(PlagCheck, UnchangedProgramIsNot) {
    const auto& s = testsupport::pool_entry("sum", "sum_c").code;
    const auto& e = testsupport::submission("sum", "sum_copy").code;
    const auto v = plag_check(s, e, e);
    EXPECT_FALSE(v.plagiarized);
    EXPECT_DOUBLE_EQ(v.triple.s_ef, 1.0);
}

TEST(PlagCheck, CommentsAndLiteralsDoNotMatter) {
    const auto v1 = plag_check("int main(){puts(\"a\");}", "int x;", "int main(){ /* hi */ puts(\"zzz\");}");
    EXPECT_DOUBLE_EQ(v1.triple.s_sf, 1.0);
}

TEST(Zeroing, KeepsOriginals) {
    judge::JudgeResult r;
    r.ac_rate = 100;
    r.ac_all = true;
    PlagiarismVerdict v;
    v.plagiarized = true;
    const auto z = apply_plag_zeroing(r, v);
    EXPECT_EQ(z.ac_rate, 0.0);
    EXPECT_FALSE(z.ac_all);
    EXPECT_EQ(z.original_ac_rate, 100.0);
    EXPECT_EQ(z.original_ac_all, true);
    v.plagiarized = false;
    const auto kept = apply_plag_zeroing(r, v);
    EXPECT_EQ(kept.ac_rate, 100.0);
    EXPECT_FALSE(kept.original_ac_rate.has_value());
}

TEST(VerdictJson, RoundTrips) {
    const auto v = plag_check("int a;", "int b;", "int a;");
    const auto back = verdict_from_json(to_json(v));
    EXPECT_EQ(to_json(back).dump(), to_json(v).dump());
    for (auto b : {Branch::no_reference, Branch::reference_close_to_erroneous, Branch::final_tracks_erroneous,
                   Branch::final_copies_reference, Branch::no_evidence}) {
        EXPECT_EQ(branch_from_string(to_string(b)), b);
    }
}
