#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "debugta/retrieval.hpp"
#include "support.hpp"

using namespace debugta;
using namespace debugta::retrieval;

namespace {

// Direct transcription of the scoring formula, recomputing every statistic
// from scratch for each (query, document) pair.
double bm25_oracle(const std::vector<std::string>& q, const std::vector<std::vector<std::string>>& docs,
                   std::size_t d, double k1, double b) {
    const double N = static_cast<double>(docs.size());
    double total_len = 0;
    for (const auto& doc : docs) total_len += static_cast<double>(doc.size());
    const double avgdl = total_len / N;
    double s = 0;
    for (const auto& t : q) {
        double n = 0;
        for (const auto& doc : docs) {
            if (std::find(doc.begin(), doc.end(), t) != doc.end()) n += 1;
        }
        const double idf = std::log((N - n + 0.5) / (n + 0.5) + 1.0);
        const double f = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), t));
        const double dl = static_cast<double>(docs[d].size());
        s += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * dl / avgdl));
    }
    return s;
}

TokenSequence seq(std::vector<std::string> t) { return TokenSequence{std::move(t), "", "test"}; }

corpus::PoolEntry entry(std::string id, std::string code) {
    corpus::PoolEntry e;
    e.id = std::move(id);
    e.code = std::move(code);
    return e;
}

}  // namespace

TEST(LexicalTokenizer, DropsCommentsAndCollapsesLiterals) {
    const auto t = lexical_tokenizer().split("int x = 1; // note\nputs(\"hello world\"); char c = 'q';");
    const std::vector<std::string> expect{"int", "x", "=", "1", ";", "puts", "(", "\"\"", ")", ";",
                                          "char", "c", "=", "''", ";"};
    EXPECT_EQ(t, expect);
}

TEST(LexicalTokenizer, TokenizeRecordsHashAndId) {
    const auto s = tokenize("int main(){}");
    EXPECT_EQ(s.tokenizer_id, "lexical");
    EXPECT_EQ(s.source_hash, sha256_hex("int main(){}"));
}

TEST(Bm25, MatchesOracleOnRandomCorpora) {
    std::mt19937 rng(7);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t ndocs = 1 + rng() % 6;
        std::vector<std::vector<std::string>> raw(ndocs);
        for (auto& d : raw) {
            const std::size_t len = 1 + rng() % 12;
            for (std::size_t i = 0; i < len; ++i) d.push_back(vocab[rng() % vocab.size()]);
        }
        std::vector<std::string> q;
        for (std::size_t i = 0, len = rng() % 8; i < len; ++i) q.push_back(vocab[rng() % vocab.size()]);
        std::vector<TokenSequence> docs;
        for (const auto& d : raw) docs.push_back(seq(d));
        const double k1 = 0.5 + (rng() % 100) / 50.0;
        const double b = (rng() % 101) / 100.0;
        const auto ranked = bm25_rank(seq(q), docs, {k1, b});
        ASSERT_EQ(ranked.size(), ndocs);
        for (const auto& r : ranked) EXPECT_NEAR(r.score, bm25_oracle(q, raw, r.index, k1, b), 1e-9);
        for (std::size_t i = 1; i < ranked.size(); ++i) {
            EXPECT_TRUE(ranked[i - 1].score > ranked[i].score ||
                        (ranked[i - 1].score == ranked[i].score && ranked[i - 1].index < ranked[i].index));
        }
    }
}

TEST(Bm25, EmptyQueryScoresZero) {
    const std::vector<TokenSequence> docs{seq({"a"}), seq({"b", "c"})};
    for (const auto& r : bm25_rank(seq({}), docs)) EXPECT_EQ(r.score, 0.0);
}

TEST(Bm25, EmptyDocsThrow) {
    EXPECT_THROW(bm25_rank(seq({"a"}), std::vector<TokenSequence>{}), Error);
}

TEST(CodeSearch, PicksIdenticalProgram) {
    const std::vector<corpus::PoolEntry> pool{entry("p1", "int main(){ long long s = 0; for(;;) s++; }"),
                                              entry("p2", "#include <cstdio>\nint main(){ puts(\"x\"); }")};
    const auto r = code_search("#include <cstdio>\nint main(){ puts(\"y\"); }", pool);
    EXPECT_EQ(r.entry.id, "p2");
    EXPECT_EQ(r.ranking.size(), 2u);
    EXPECT_EQ(r.ranking[0].first, "p2");
    EXPECT_EQ(r.tokenizer_id, "lexical");
}

TEST(CodeSearch, TiesGoToSmallerId) {
    const std::vector<corpus::PoolEntry> pool{entry("zeta", "int a;"), entry("alpha", "int a;")};
    EXPECT_EQ(code_search("int a;", pool).entry.id, "alpha");
}

TEST(CodeSearch, EmptyPoolRaises) {
    EXPECT_THROW(code_search("int main(){}", std::vector<corpus::PoolEntry>{}), EmptyPoolError);
}

TEST(CodeSearch, ToyRetrievalIsStable) {
    const auto& sum = testsupport::toy().at("sum");
    EXPECT_EQ(code_search(testsupport::submission("sum", "sum_overflow").code, sum.pool).entry.id, "sum_a");
    EXPECT_EQ(code_search(testsupport::submission("sum", "sum_copy").code, sum.pool).entry.id, "sum_c");
}

class BpeTest : public ::testing::Test {
protected:
    void SetUp() override {
        // "Ġ" is the byte-level symbol for a space.
        write_file(dir.path() / "vocab.json",
                   R"({"i":0,"n":1,"t":2,"Ġ":3,"in":4,"int":5,"Ġx":6,"x":7,";":8,"Ġint":9})");
        write_file(dir.path() / "merges.txt", "#version: 0.2\ni n\nin t\nĠ x\nĠ int\n");
    }
    testsupport::TempDir dir;
};

TEST_F(BpeTest, MergesByRank) {
    BpeTokenizer bpe(dir.path() / "vocab.json", dir.path() / "merges.txt");
    EXPECT_EQ(bpe.split("int x;"), (std::vector<std::string>{"int", "Ġx", ";"}));
    EXPECT_EQ(bpe.encode("int x;"), (std::vector<int>{5, 6, 8}));
    EXPECT_EQ(bpe.split("x int"), (std::vector<std::string>{"x", "Ġint"}));
    EXPECT_THROW(bpe.encode("q"), Error);
}

TEST_F(BpeTest, FactoryRequiresFiles) {
    EXPECT_THROW(make_tokenizer("bpe"), ConfigError);
    EXPECT_THROW(make_tokenizer("words"), ConfigError);
    EXPECT_EQ(make_tokenizer("bpe", dir.path() / "vocab.json", dir.path() / "merges.txt")->id(), "bpe");
}

TEST(BpePretokenize, FollowsGpt2Pattern) {
    EXPECT_EQ(BpeTokenizer::pretokenize("it's  a\n\nb12+=c"),
              (std::vector<std::string>{"it", "'s", " ", " a", "\n", "\n", "b", "12", "+=", "c"}));
    EXPECT_EQ(BpeTokenizer::pretokenize("x  "), (std::vector<std::string>{"x", "  "}));
}
