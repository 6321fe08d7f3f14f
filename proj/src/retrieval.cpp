#include "debugta/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "debugta/lexer.hpp"

namespace debugta::retrieval {

std::vector<std::string> LexicalTokenizer::split(std::string_view code) const {
    std::vector<std::string> out;
    for (auto& tok : lex::lex(code)) {
        switch (tok.kind) {
            case lex::TokenKind::comment:
                break;
            case lex::TokenKind::string_literal:
                out.emplace_back("\"\"");
                break;
            case lex::TokenKind::char_literal:
                out.emplace_back("''");
                break;
            default:
                out.push_back(std::move(tok.text));
        }
    }
    return out;
}

const Tokenizer& lexical_tokenizer() {
    static const LexicalTokenizer instance;
    return instance;
}

namespace {

// GPT-2's reversible byte -> printable code point table, UTF-8 encoded.
const std::array<std::string, 256>& byte_encoder() {
    static const auto table = [] {
        std::array<std::string, 256> out;
        auto utf8 = [](unsigned cp) {
            std::string s;
            if (cp < 0x80) {
                s.push_back(static_cast<char>(cp));
            } else {
                s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
            }
            return s;
        };
        unsigned extra = 0;
        for (unsigned b = 0; b < 256; ++b) {
            const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE);
            out[b] = printable ? utf8(b) : utf8(256 + extra++);
        }
        return out;
    }();
    return table;
}

enum class CharClass { space, letter, digit, other };

CharClass classify(unsigned char c) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        return CharClass::space;
    }
    if (std::isalpha(c) || c >= 0x80) return CharClass::letter;
    if (std::isdigit(c)) return CharClass::digit;
    return CharClass::other;
}

// Splits a UTF-8 string into code point substrings.
std::vector<std::string> utf8_chars(const std::string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if (c >= 0xF0) len = 4;
        else if (c >= 0xE0) len = 3;
        else if (c >= 0xC0) len = 2;
        len = std::min(len, s.size() - i);
        out.push_back(s.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace

std::vector<std::string> BpeTokenizer::pretokenize(std::string_view text) {
    static constexpr std::array<std::string_view, 7> kContractions = {"'s", "'t", "'re", "'ve",
                                                                      "'m", "'ll", "'d"};
    std::vector<std::string> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    auto cls = [&](std::size_t k) { return classify(static_cast<unsigned char>(text[k])); };
    while (i < n) {
        if (text[i] == '\'') {
            std::string_view hit;
            for (auto c : kContractions) {
                if (text.substr(i).starts_with(c) && c.size() > hit.size()) hit = c;
            }
            if (!hit.empty()) {
                out.emplace_back(hit);
                i += hit.size();
                continue;
            }
        }
        std::size_t j = i;
        if (text[j] == ' ' && j + 1 < n && cls(j + 1) != CharClass::space) ++j;
        if (j < n && cls(j) != CharClass::space) {
            const CharClass run = cls(j);
            std::size_t k = j + 1;
            while (k < n && cls(k) == run) ++k;
            out.emplace_back(text.substr(i, k - i));
            i = k;
            continue;
        }
        std::size_t k = i;
        while (k < n && cls(k) == CharClass::space) ++k;
        if (k < n && k - i > 1) --k;  // leave one space to prefix the next word
        out.emplace_back(text.substr(i, k - i));
        i = k;
    }
    return out;
}

BpeTokenizer::BpeTokenizer(const std::filesystem::path& vocab_json,
                           const std::filesystem::path& merges_txt) {
    const auto vocab = json::parse(read_file(vocab_json));
    for (const auto& [tok, id] : vocab.items()) vocab_.emplace(tok, id.get<int>());

    std::istringstream merges(read_file(merges_txt));
    std::string line;
    int rank = 0;
    while (std::getline(merges, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.starts_with("#version")) continue;
        const auto space = line.find(' ');
        if (space == std::string::npos) throw LoadError(merges_txt, "malformed merge line: " + line);
        ranks_.emplace(std::make_pair(line.substr(0, space), line.substr(space + 1)), rank++);
    }
}

std::vector<std::string> BpeTokenizer::bpe(const std::string& word) const {
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(word); it != cache_.end()) return it->second;
    }
    auto symbols = utf8_chars(word);
    while (symbols.size() > 1) {
        int best_rank = INT_MAX;
        std::size_t best = 0;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto it = ranks_.find({symbols[i], symbols[i + 1]});
            if (it != ranks_.end() && it->second < best_rank) {
                best_rank = it->second;
                best = i;
            }
        }
        if (best_rank == INT_MAX) break;
        const std::string first = symbols[best];
        const std::string second = symbols[best + 1];
        std::vector<std::string> merged;
        merged.reserve(symbols.size());
        for (std::size_t i = 0; i < symbols.size();) {
            if (i + 1 < symbols.size() && symbols[i] == first && symbols[i + 1] == second) {
                merged.push_back(first + second);
                i += 2;
            } else {
                merged.push_back(symbols[i]);
                ++i;
            }
        }
        symbols = std::move(merged);
    }
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(word, symbols);
    return symbols;
}

std::vector<std::string> BpeTokenizer::split(std::string_view code) const {
    const auto& enc = byte_encoder();
    std::vector<std::string> out;
    for (const auto& piece : pretokenize(code)) {
        std::string mapped;
        for (unsigned char c : piece) mapped += enc[c];
        for (auto& sym : bpe(mapped)) out.push_back(std::move(sym));
    }
    return out;
}

std::vector<int> BpeTokenizer::encode(std::string_view code) const {
    std::vector<int> ids;
    for (const auto& sym : split(code)) {
        auto it = vocab_.find(sym);
        if (it == vocab_.end()) throw Error("bpe symbol missing from vocabulary: " + sym);
        ids.push_back(it->second);
    }
    return ids;
}

std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& name,
                                                const std::filesystem::path& vocab_json,
                                                const std::filesystem::path& merges_txt) {
    if (name == "lexical") return std::make_shared<LexicalTokenizer>();
    if (name == "bpe") {
        if (vocab_json.empty() || merges_txt.empty()) {
            throw ConfigError("tokenizer=bpe requires vocab and merges files");
        }
        return std::make_shared<BpeTokenizer>(vocab_json, merges_txt);
    }
    throw ConfigError("unknown tokenizer: " + name);
}

TokenSequence tokenize(std::string_view code, const Tokenizer& tokenizer) {
    return TokenSequence{tokenizer.split(code), sha256_hex(code), tokenizer.id()};
}

std::vector<ScoredIndex> bm25_rank(const TokenSequence& query, std::span<const TokenSequence> docs,
                                   Bm25Params params) {
    if (docs.empty()) throw Error("empty pool");
    const auto n_docs = static_cast<double>(docs.size());

    std::vector<std::unordered_map<std::string_view, int>> freqs(docs.size());
    std::unordered_map<std::string_view, int> doc_freq;
    double total_len = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d].tokens) ++freqs[d][tok];
        for (const auto& [tok, count] : freqs[d]) ++doc_freq[tok];
        total_len += static_cast<double>(docs[d].tokens.size());
    }
    const double avgdl = total_len / n_docs;

    std::vector<ScoredIndex> out;
    out.reserve(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const double len_ratio =
            avgdl > 0.0 ? static_cast<double>(docs[d].tokens.size()) / avgdl : 1.0;
        const double norm = params.k1 * (1.0 - params.b + params.b * len_ratio);
        double score = 0.0;
        for (const auto& term : query.tokens) {
            auto f_it = freqs[d].find(term);
            if (f_it == freqs[d].end()) continue;
            const double f = f_it->second;
            const double n_t = doc_freq.at(term);
            const double idf = std::log((n_docs - n_t + 0.5) / (n_t + 0.5) + 1.0);
            score += idf * (f * (params.k1 + 1.0)) / (f + norm);
        }
        out.push_back({d, score});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredIndex& a, const ScoredIndex& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    });
    return out;
}

RetrievalResult code_search(std::string_view erroneous, std::span<const corpus::PoolEntry> pool,
                            const Tokenizer& tokenizer, Bm25Params params) {
    if (pool.empty()) throw EmptyPoolError();
    std::vector<TokenSequence> docs;
    docs.reserve(pool.size());
    for (const auto& entry : pool) docs.push_back(tokenize(entry.code, tokenizer));
    auto ranked = bm25_rank(tokenize(erroneous, tokenizer), docs, params);
    // Re-break ties on entry id rather than pool position.
    std::stable_sort(ranked.begin(), ranked.end(), [&](const ScoredIndex& a, const ScoredIndex& b) {
        if (a.score != b.score) return a.score > b.score;
        return pool[a.index].id < pool[b.index].id;
    });
    RetrievalResult result;
    result.entry = pool[ranked.front().index];
    result.score = ranked.front().score;
    result.tokenizer_id = tokenizer.id();
    for (const auto& r : ranked) result.ranking.emplace_back(pool[r.index].id, r.score);
    return result;
}

}  // namespace debugta::retrieval
