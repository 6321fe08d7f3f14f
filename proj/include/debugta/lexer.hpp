#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace debugta::lex {

enum class TokenKind {
    identifier,
    number,
    string_literal,
    char_literal,
    comment,
    header_name,  // <...> after #include
    punct,
    other,
};

struct Token {
    TokenKind kind;
    std::size_t offset;  // byte offset into the source
    std::string text;
};

/// Splits C/C++ source into lexemes. Whitespace is not emitted; the gaps
/// between consecutive tokens are exactly the whitespace of the input, so
/// concatenating gaps and token texts reproduces the source byte for byte.
/// Unterminated literals and comments run to end of line / end of input.
std::vector<Token> lex(std::string_view source);

bool is_keyword(std::string_view word);

/// Identifier tokens that are not keywords, deduplicated.
std::set<std::string> identifiers(std::string_view source);

bool is_valid_identifier(std::string_view word);

}  // namespace debugta::lex
