#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "debugta/corpus.hpp"

namespace debugta::retrieval {

struct TokenSequence {
    std::vector<std::string> tokens;
    std::string source_hash;
    std::string tokenizer_id;
};

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::string> split(std::string_view code) const = 0;
};

/// One token per C lexeme. Comments are dropped; string and character
/// literals collapse to `""` / `''` so their contents never influence
/// similarity. Header names (`<iostream>`) are kept whole.
class LexicalTokenizer final : public Tokenizer {
public:
    std::string id() const override { return "lexical"; }
    std::vector<std::string> split(std::string_view code) const override;
};

/// Byte-level BPE over a GPT-2 style vocabulary (`vocab.json` mapping token to
/// id, `merges.txt` with one ranked pair per line). Pre-tokenization follows
/// the GPT-2 pattern with ASCII character classes; any non-ASCII code point
/// counts as a letter.
class BpeTokenizer final : public Tokenizer {
public:
    BpeTokenizer(const std::filesystem::path& vocab_json, const std::filesystem::path& merges_txt);

    std::string id() const override { return "bpe"; }
    std::vector<std::string> split(std::string_view code) const override;
    std::vector<int> encode(std::string_view code) const;

    static std::vector<std::string> pretokenize(std::string_view text);

private:
    std::vector<std::string> bpe(const std::string& word) const;

    std::unordered_map<std::string, int> vocab_;
    std::map<std::pair<std::string, std::string>, int> ranks_;
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::string, std::vector<std::string>> cache_;
};

const Tokenizer& lexical_tokenizer();

/// `tokenizer=lexical|bpe`; bpe needs both vocabulary files.
std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& name,
                                                const std::filesystem::path& vocab_json = {},
                                                const std::filesystem::path& merges_txt = {});

TokenSequence tokenize(std::string_view code, const Tokenizer& tokenizer = lexical_tokenizer());

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct ScoredIndex {
    std::size_t index;
    double score;
};

/// Okapi BM25 of `query` against every document, with
/// IDF(t) = ln((N - n_t + 0.5) / (n_t + 0.5) + 1). Each query token occurrence
/// contributes one summand. Sorted by score descending, ties by index.
/// Throws Error("empty pool") when `docs` is empty.
std::vector<ScoredIndex> bm25_rank(const TokenSequence& query, std::span<const TokenSequence> docs,
                                   Bm25Params params = {});

struct RetrievalResult {
    corpus::PoolEntry entry;
    double score = 0.0;
    std::vector<std::pair<std::string, double>> ranking;
    std::string tokenizer_id;
};

class EmptyPoolError : public Error {
public:
    EmptyPoolError()
        : Error("empty pool: no standard code to retrieve; skip alignment and fall back") {}
};

/// CodeSearch(E) -> S*. Ties between equal scores go to the smaller entry id.
RetrievalResult code_search(std::string_view erroneous, std::span<const corpus::PoolEntry> pool,
                            const Tokenizer& tokenizer = lexical_tokenizer(),
                            Bm25Params params = {});

}  // namespace debugta::retrieval
