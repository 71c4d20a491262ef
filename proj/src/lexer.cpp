#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "aiql/parser.hpp"

namespace aiql {

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::identifier: return "identifier";
        case TokenKind::string: return "string";
        case TokenKind::integer: return "integer";
        case TokenKind::decimal: return "number";
        case TokenKind::lparen: return "'('";
        case TokenKind::rparen: return "')'";
        case TokenKind::lbracket: return "'['";
        case TokenKind::rbracket: return "']'";
        case TokenKind::comma: return "','";
        case TokenKind::dot: return "'.'";
        case TokenKind::colon: return "':'";
        case TokenKind::arrow_right: return "'->'";
        case TokenKind::arrow_left: return "'<-'";
        case TokenKind::and_and: return "'&&'";
        case TokenKind::or_or: return "'||'";
        case TokenKind::bang: return "'!'";
        case TokenKind::eq: return "'='";
        case TokenKind::ne: return "'!='";
        case TokenKind::lt: return "'<'";
        case TokenKind::le: return "'<='";
        case TokenKind::gt: return "'>'";
        case TokenKind::ge: return "'>='";
        case TokenKind::plus: return "'+'";
        case TokenKind::minus: return "'-'";
        case TokenKind::star: return "'*'";
        case TokenKind::slash: return "'/'";
        case TokenKind::end: return "end of input";
    }
    return "?";
}

namespace {

constexpr std::array kReserved = {
    "proc",  "file",    "ip",      "with",   "return",  "before", "after",  "within", "forward", "backward",
    "window", "step",   "group",   "having", "sort",    "top",    "count",  "distinct", "as",    "at",
    "from",  "to",      "in",      "not",    "by",      "asc",    "desc",   "read",   "write",   "execute",
    "start", "end",     "rename",  "delete", "connect",
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_space_and_comments();
            if (at_end()) break;
            SourcePos begin = pos();
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.tokens.push_back(identifier(begin));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                if (auto tok = number(begin, out.errors)) out.tokens.push_back(std::move(*tok));
            } else if (c == '"' || c == '\'') {
                if (auto tok = string_literal(begin, out.errors)) out.tokens.push_back(std::move(*tok));
            } else if (auto kind = punctuation()) {
                out.tokens.push_back(make(*kind, begin));
            } else {
                // Unrecognized: report, then resynchronize at the next whitespace.
                std::string bad;
                while (!at_end() && !std::isspace(static_cast<unsigned char>(peek()))) bad += advance();
                out.errors.emplace_back("unexpected character '" + bad.substr(0, 1) + "'", SourceSpan{begin, pos()});
            }
        }
        Token end;
        end.kind = TokenKind::end;
        end.span = {pos(), pos()};
        out.tokens.push_back(std::move(end));
        return out;
    }

private:
    bool at_end() const { return i_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }
    SourcePos pos() const { return {line_, col_}; }

    char advance() {
        char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, SourcePos begin, std::string text = {}) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = {begin, pos()};
        return t;
    }

    Token identifier(SourcePos begin) {
        std::string word;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) word += advance();
        return make(TokenKind::identifier, begin, std::move(word));
    }

    std::optional<Token> number(SourcePos begin, std::vector<SyntaxError>& errors) {
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
        bool is_decimal = false;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            is_decimal = true;
            digits += advance();
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
        }
        Token t = make(is_decimal ? TokenKind::decimal : TokenKind::integer, begin, digits);
        if (is_decimal) {
            t.decimal = std::stod(digits);
            return t;
        }
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.integer);
        if (ec != std::errc()) {
            errors.emplace_back("integer literal out of range", t.span);
            return std::nullopt;
        }
        t.decimal = static_cast<double>(t.integer);
        return t;
    }

    std::optional<Token> string_literal(SourcePos begin, std::vector<SyntaxError>& errors) {
        char quote = advance();
        std::string value;
        while (!at_end() && peek() != quote && peek() != '\n') {
            char c = advance();
            if (c == '\\' && !at_end() && peek() != '\n') c = advance();
            value += c;
        }
        if (at_end() || peek() != quote) {
            errors.emplace_back("unterminated string literal", SourceSpan{begin, pos()}, std::vector<std::string>{"'\"'"});
            return std::nullopt;
        }
        advance();
        return make(TokenKind::string, begin, std::move(value));
    }

    std::optional<TokenKind> punctuation() {
        char c = peek();
        char n = peek(1);
        auto two = [&](TokenKind k) {
            advance();
            advance();
            return k;
        };
        auto one = [&](TokenKind k) {
            advance();
            return k;
        };
        switch (c) {
            case '(': return one(TokenKind::lparen);
            case ')': return one(TokenKind::rparen);
            case '[': return one(TokenKind::lbracket);
            case ']': return one(TokenKind::rbracket);
            case ',': return one(TokenKind::comma);
            case '.': return one(TokenKind::dot);
            case ':': return one(TokenKind::colon);
            case '+': return one(TokenKind::plus);
            case '*': return one(TokenKind::star);
            case '/': return one(TokenKind::slash);
            case '-': return n == '>' ? two(TokenKind::arrow_right) : one(TokenKind::minus);
            case '<':
                if (n == '-') return two(TokenKind::arrow_left);
                if (n == '=') return two(TokenKind::le);
                return one(TokenKind::lt);
            case '>': return n == '=' ? two(TokenKind::ge) : one(TokenKind::gt);
            case '=': return n == '=' ? two(TokenKind::eq) : one(TokenKind::eq);
            case '!': return n == '=' ? two(TokenKind::ne) : one(TokenKind::bang);
            case '&':
                if (n == '&') return two(TokenKind::and_and);
                return std::nullopt;
            case '|':
                if (n == '|') return two(TokenKind::or_or);
                return std::nullopt;
            default: return std::nullopt;
        }
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

bool is_reserved_word(std::string_view word) {
    std::string folded = fold_case(word);
    return std::find(kReserved.begin(), kReserved.end(), folded) != kReserved.end();
}

LexResult lex(std::string_view text) { return Lexer(text).run(); }

}  // namespace aiql
