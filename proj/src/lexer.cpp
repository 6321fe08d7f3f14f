#include "debugta/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace debugta::lex {
namespace {

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

constexpr std::array<std::string_view, 5> kPunct3 = {"<<=", ">>=", "...", "->*", "<=>"};
constexpr std::array<std::string_view, 26> kPunct2 = {
    "::", "->", ".*", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "##", "<:", ":>", "<%", "%>"};

// Maximal munch over the C++ punctuator set.
std::size_t punct_length(std::string_view rest) {
    if (rest.starts_with("%:%:")) return 4;
    for (auto p : kPunct3) {
        if (rest.starts_with(p)) return 3;
    }
    for (auto p : kPunct2) {
        if (rest.starts_with(p)) return 2;
    }
    if (rest.starts_with("%:")) return 2;
    return 1;
}

bool is_string_prefix(std::string_view word) {
    return word == "L" || word == "u" || word == "U" || word == "u8" || word == "R" ||
           word == "LR" || word == "uR" || word == "UR" || word == "u8R";
}

bool is_char_prefix(std::string_view word) {
    return word == "L" || word == "u" || word == "U" || word == "u8";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) break;
            lex_one();
        }
        return std::move(out_);
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && is_space(static_cast<unsigned char>(src_[pos_]))) {
            if (src_[pos_] == '\n') {
                line_start_ = true;
                directive_ = Directive::none;
            }
            ++pos_;
        }
        // backslash-newline splices lines; treat as whitespace
        if (pos_ + 1 < src_.size() && src_[pos_] == '\\' &&
            (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
            pos_ += 1;
            while (pos_ < src_.size() && (src_[pos_] == '\r')) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '\n') ++pos_;
            skip_space();
        }
    }

    void emit(TokenKind kind, std::size_t begin) {
        out_.push_back(Token{kind, begin, std::string(src_.substr(begin, pos_ - begin))});
    }

    void lex_one() {
        const std::size_t begin = pos_;
        const auto c = static_cast<unsigned char>(src_[pos_]);
        const bool at_line_start = line_start_;
        line_start_ = false;

        if (c == '/' && peek(1) == '/') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            emit(TokenKind::comment, begin);
            return;
        }
        if (c == '/' && peek(1) == '*') {
            const auto end = src_.find("*/", pos_ + 2);
            pos_ = end == std::string_view::npos ? src_.size() : end + 2;
            emit(TokenKind::comment, begin);
            return;
        }
        if (c == '<' && directive_ == Directive::include_keyword) {
            const auto end = src_.find_first_of(">\n", pos_ + 1);
            if (end != std::string_view::npos && src_[end] == '>') {
                pos_ = end + 1;
                directive_ = Directive::other;
                emit(TokenKind::header_name, begin);
                return;
            }
        }
        if (is_ident_start(c)) {
            while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            const auto word = src_.substr(begin, pos_ - begin);
            if (peek(0) == '"' && is_string_prefix(word)) {
                if (word.back() == 'R') {
                    lex_raw_string(begin);
                } else {
                    lex_quoted('"', TokenKind::string_literal, begin);
                }
                return;
            }
            if (peek(0) == '\'' && is_char_prefix(word)) {
                lex_quoted('\'', TokenKind::char_literal, begin);
                return;
            }
            if (directive_ == Directive::hash) {
                directive_ = (word == "include" || word == "include_next" || word == "import")
                                 ? Directive::include_keyword
                                 : Directive::other;
            }
            emit(TokenKind::identifier, begin);
            return;
        }
        if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number(begin);
            return;
        }
        if (c == '"') {
            lex_quoted('"', TokenKind::string_literal, begin);
            return;
        }
        if (c == '\'') {
            lex_quoted('\'', TokenKind::char_literal, begin);
            return;
        }
        if (std::ispunct(c)) {
            pos_ += punct_length(src_.substr(pos_));
            if (at_line_start && (c == '#' || src_.substr(begin, pos_ - begin) == "%:")) {
                directive_ = Directive::hash;
            }
            emit(TokenKind::punct, begin);
            return;
        }
        ++pos_;
        emit(TokenKind::other, begin);
    }

    void lex_number(std::size_t begin) {
        ++pos_;
        while (pos_ < src_.size()) {
            const auto ch = static_cast<unsigned char>(src_[pos_]);
            const auto prev = static_cast<unsigned char>(src_[pos_ - 1]);
            if ((ch == '+' || ch == '-') &&
                (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P')) {
                ++pos_;
            } else if (ch == '\'' && pos_ + 1 < src_.size() &&
                       std::isalnum(static_cast<unsigned char>(src_[pos_ + 1]))) {
                pos_ += 2;
            } else if (std::isalnum(ch) || ch == '_' || ch == '.') {
                ++pos_;
            } else {
                break;
            }
        }
        emit(TokenKind::number, begin);
    }

    void lex_quoted(char quote, TokenKind kind, std::size_t begin) {
        // pos_ is at the opening quote
        ++pos_;
        while (pos_ < src_.size()) {
            const char ch = src_[pos_];
            if (ch == '\\' && pos_ + 1 < src_.size()) {
                pos_ += 2;
                continue;
            }
            if (ch == '\n') break;
            ++pos_;
            if (ch == quote) break;
        }
        emit(kind, begin);
    }

    void lex_raw_string(std::size_t begin) {
        // pos_ is at the opening quote of R"delim(
        const auto paren = src_.find('(', pos_ + 1);
        if (paren == std::string_view::npos || paren - pos_ - 1 > 16) {
            lex_quoted('"', TokenKind::string_literal, begin);
            return;
        }
        const std::string closing =
            ")" + std::string(src_.substr(pos_ + 1, paren - pos_ - 1)) + "\"";
        const auto end = src_.find(closing, paren + 1);
        pos_ = end == std::string_view::npos ? src_.size() : end + closing.size();
        emit(TokenKind::string_literal, begin);
    }

    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    enum class Directive { none, hash, include_keyword, other };

    std::string_view src_;
    std::size_t pos_ = 0;
    bool line_start_ = true;
    Directive directive_ = Directive::none;
    std::vector<Token> out_;
};

}  // namespace

std::vector<Token> lex(std::string_view source) { return Lexer(source).run(); }

bool is_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kKeywords = {
        "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool",
        "break", "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class",
        "compl", "concept", "const", "consteval", "constexpr", "constinit", "const_cast",
        "continue", "co_await", "co_return", "co_yield", "decltype", "default", "delete",
        "do", "double", "dynamic_cast", "else", "enum", "explicit", "export", "extern",
        "false", "float", "for", "friend", "goto", "if", "inline", "int", "long", "mutable",
        "namespace", "new", "noexcept", "not", "not_eq", "nullptr", "operator", "or",
        "or_eq", "private", "protected", "public", "register", "reinterpret_cast",
        "requires", "return", "short", "signed", "sizeof", "static", "static_assert",
        "static_cast", "struct", "switch", "template", "this", "thread_local", "throw",
        "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
        "virtual", "void", "volatile", "wchar_t", "while", "xor", "xor_eq",
        // preprocessor words that appear as identifier tokens
        "include", "define", "ifdef", "ifndef", "endif", "pragma", "undef", "elif"};
    return kKeywords.contains(word);
}

std::set<std::string> identifiers(std::string_view source) {
    std::set<std::string> out;
    for (const auto& tok : lex(source)) {
        if (tok.kind == TokenKind::identifier && !is_keyword(tok.text)) out.insert(tok.text);
    }
    return out;
}

bool is_valid_identifier(std::string_view word) {
    if (word.empty() || !is_ident_start(static_cast<unsigned char>(word.front()))) return false;
    return std::all_of(word.begin(), word.end(),
                       [](char ch) { return is_ident_char(static_cast<unsigned char>(ch)); });
}

}  // namespace debugta::lex
