#pragma once

// Lexer and recursive-descent parser for AIQL text.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aiql/errors.hpp"
#include "aiql/query.hpp"
#include "aiql/time_util.hpp"

namespace aiql {

enum class TokenKind : std::uint8_t {
    identifier,
    string,
    integer,
    decimal,
    lparen,
    rparen,
    lbracket,
    rbracket,
    comma,
    dot,
    colon,
    arrow_right,  // ->
    arrow_left,   // <-
    and_and,
    or_or,
    bang,
    eq,  // = or ==
    ne,
    lt,
    le,
    gt,
    ge,
    plus,
    minus,
    star,
    slash,
    end,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;  // identifier spelling or decoded string literal
    std::int64_t integer = 0;
    double decimal = 0.0;
    SourceSpan span;
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an `end` token
    std::vector<SyntaxError> errors;
};

/// Tokenizes the whole input. `//` starts a comment running to end of line.
/// An unrecognized character is reported and skipped up to the next
/// whitespace; lexing then continues.
LexResult lex(std::string_view text);

/// Case-insensitive; covers the language keywords and operation names.
bool is_reserved_word(std::string_view word);

/// Grammar-level parse without shortcut expansion. Throws SyntaxError.
QueryContext parse_raw(std::string_view text);

/// Fills default attributes and generated names, injects id-equality
/// relationships for reused entity names, resolves every name and checks
/// kinds. Idempotent. Throws SemanticError.
QueryContext expand_shortcuts(QueryContext ctx);

/// Binds return, group-by, having and sort names to the patterns of `ctx`
/// and fills default attributes. Throws SemanticError.
void resolve_returns(QueryContext& ctx);

/// parse_raw followed by expand_shortcuts.
QueryContext parse(std::string_view text);

/// `at "<date>"` or `from "<a>" to "<b>"`. Throws SyntaxError.
TimeWindow parse_time_literal(std::string_view text);

}  // namespace aiql
