#include <algorithm>

#include "aiql/parser.hpp"

namespace aiql {

namespace {

bool keyword_is(const Token& t, std::string_view word) {
    return t.kind == TokenKind::identifier && fold_case(t.text) == word;
}

std::optional<EntityKind> entity_keyword(const Token& t) {
    if (keyword_is(t, "proc")) return EntityKind::process;
    if (keyword_is(t, "file")) return EntityKind::file;
    if (keyword_is(t, "ip")) return EntityKind::network;
    return std::nullopt;
}

std::optional<Aggregate> aggregate_keyword(const Token& t) {
    if (keyword_is(t, "count")) return Aggregate::count;
    if (keyword_is(t, "avg")) return Aggregate::avg;
    if (keyword_is(t, "sum")) return Aggregate::sum;
    if (keyword_is(t, "max")) return Aggregate::max;
    if (keyword_is(t, "min")) return Aggregate::min;
    return std::nullopt;
}

std::optional<Comparator> comparator_of(TokenKind kind) {
    switch (kind) {
        case TokenKind::eq: return Comparator::eq;
        case TokenKind::ne: return Comparator::ne;
        case TokenKind::lt: return Comparator::lt;
        case TokenKind::le: return Comparator::le;
        case TokenKind::gt: return Comparator::gt;
        case TokenKind::ge: return Comparator::ge;
        default: return std::nullopt;
    }
}

// Words that may legitimately follow an entity type keyword when the id is
// omitted.
bool may_follow_entity_type(const Token& t) {
    static constexpr std::string_view kWords[] = {"as", "with", "return", "proc", "file", "ip"};
    std::string w = fold_case(t.text);
    if (op_from_string(w)) return true;
    return std::find(std::begin(kWords), std::end(kWords), w) != std::end(kWords);
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    QueryContext query() {
        QueryContext ctx;
        globals(ctx.globals);
        if (keyword_is(peek(), "forward") || keyword_is(peek(), "backward")) {
            dependency(ctx, std::nullopt);
        } else if (entity_keyword(peek())) {
            EntityRef first = entity();
            if (check(TokenKind::arrow_right) || check(TokenKind::arrow_left)) {
                dependency(ctx, std::move(first));
            } else {
                multievent(ctx, std::move(first));
            }
        } else {
            fail({"'proc'", "'file'", "'ip'", "'forward'", "'backward'", "global constraint"});
        }
        ctx.returns = returns();
        filters(ctx.returns);
        if (!check(TokenKind::end)) fail({"'group'", "'having'", "'sort'", "'top'", "end of input"});
        ctx.flavor = ctx.chain ? Flavor::dependency : (ctx.globals.sliding ? Flavor::anomaly : Flavor::multievent);
        return ctx;
    }

    TimeWindow time_literal() {
        bool paren = accept(TokenKind::lparen);
        TimeWindow w = twind();
        if (paren) expect(TokenKind::rparen);
        if (!check(TokenKind::end)) fail({"end of input"});
        return w;
    }

private:
    // ---- token helpers -------------------------------------------------
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    bool check(TokenKind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool accept(TokenKind kind) {
        if (!check(kind)) return false;
        next();
        return true;
    }
    bool accept_keyword(std::string_view word) {
        if (!keyword_is(peek(), word)) return false;
        next();
        return true;
    }
    const Token& expect(TokenKind kind) {
        if (!check(kind)) fail({std::string(to_string(kind))});
        return next();
    }
    void expect_keyword(std::string_view word) {
        if (!accept_keyword(word)) fail({"'" + std::string(word) + "'"});
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == TokenKind::end ? "end of input"
                            : t.kind == TokenKind::identifier || t.kind == TokenKind::integer ? "'" + t.text + "'"
                            : t.kind == TokenKind::string ? "string \"" + t.text + "\""
                                                          : std::string(to_string(t.kind));
        std::string msg = "unexpected " + found + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
        throw SyntaxError(msg, t.span, std::move(expected));
    }

    [[noreturn]] void reserved(const Token& t) const {
        throw SemanticError("reserved word '" + t.text + "' cannot be used as an id", t.text, t.span);
    }

    std::string identifier(const char* what) {
        if (!check(TokenKind::identifier)) fail({what});
        return next().text;
    }

    std::string declared_id(const char* what) {
        if (!check(TokenKind::identifier)) fail({what});
        if (is_reserved_word(peek().text)) reserved(peek());
        return next().text;
    }

    // ---- literals --------------------------------------------------------
    Scalar value() {
        if (check(TokenKind::string)) return Scalar{next().text};
        bool negative = accept(TokenKind::minus);
        if (check(TokenKind::integer)) {
            std::int64_t v = next().integer;
            return Scalar{negative ? -v : v};
        }
        fail({"string", "integer"});
    }

    std::int64_t datetime_ms(std::int64_t* granularity = nullptr) {
        const Token& t = expect(TokenKind::string);
        auto lit = parse_datetime(t.text);
        if (!lit) throw SyntaxError("invalid date/time literal \"" + t.text + "\"", t.span, {"date/time"});
        if (granularity) *granularity = lit->granularity_ms;
        return lit->ms;
    }

    TimeWindow twind() {
        SourceSpan at = peek().span;
        if (accept_keyword("at")) {
            std::int64_t granularity = 0;
            std::int64_t begin = datetime_ms(&granularity);
            return {begin, begin + granularity};
        }
        if (accept_keyword("from")) {
            std::int64_t begin = datetime_ms();
            expect_keyword("to");
            std::int64_t end = datetime_ms();
            if (end <= begin) throw SyntaxError("time window ends before it begins", at, {});
            return {begin, end};
        }
        fail({"'at'", "'from'"});
    }

    std::int64_t duration(const char* what) {
        const Token& n = expect(TokenKind::integer);
        const Token& u = check(TokenKind::identifier) ? next() : (fail({"time unit"}), peek());
        auto unit = duration_unit_ms(fold_case(u.text));
        if (!unit) throw SyntaxError("unknown time unit '" + u.text + "'", u.span, {"time unit"});
        if (n.integer <= 0) throw SyntaxError(std::string(what) + " must be positive", n.span, {});
        return n.integer * *unit;
    }

    // ---- globals ---------------------------------------------------------
    void globals(GlobalConstraints& g) {
        std::optional<std::int64_t> length, step;
        SourceSpan sliding_at{};
        while (true) {
            const Token& t = peek();
            if (t.kind == TokenKind::lparen) {
                next();
                SourceSpan at = t.span;
                TimeWindow w = twind();
                expect(TokenKind::rparen);
                if (g.window) throw SemanticError("duplicate global time window", "", at);
                g.window = w;
            } else if (keyword_is(t, "window") && check(TokenKind::eq, 1)) {
                sliding_at = t.span;
                next();
                next();
                length = duration("window length");
            } else if (keyword_is(t, "step") && check(TokenKind::eq, 1)) {
                next();
                next();
                step = duration("window step");
            } else if (t.kind == TokenKind::identifier && !entity_keyword(t) && !keyword_is(t, "forward") &&
                       !keyword_is(t, "backward")) {
                g.event_filter = conjoin(std::move(g.event_filter), Constraint::compare(attribute_comparison()));
            } else {
                break;
            }
            accept(TokenKind::comma);
        }
        if (step && !length) throw SemanticError("'step' requires 'window'", "step", sliding_at);
        if (length) g.sliding = SlidingWindow{*length, step.value_or(*length)};
    }

    // attr cmp val | attr [not] in (v, ...)
    Comparison attribute_comparison() {
        Comparison c;
        c.attribute = identifier("attribute");
        if (accept_keyword("not")) {
            expect_keyword("in");
            c.op = Comparator::not_in;
            c.values = value_list();
            return c;
        }
        if (accept_keyword("in")) {
            c.op = Comparator::in;
            c.values = value_list();
            return c;
        }
        auto cmp = comparator_of(peek().kind);
        if (!cmp) fail({"comparator", "'in'", "'not in'"});
        next();
        c.op = *cmp;
        c.values.push_back(value());
        return c;
    }

    std::vector<Scalar> value_list() {
        std::vector<Scalar> out;
        expect(TokenKind::lparen);
        do {
            out.push_back(value());
        } while (accept(TokenKind::comma));
        expect(TokenKind::rparen);
        return out;
    }

    // ---- attribute constraints --------------------------------------------
    Constraint attr_or() {
        std::vector<Constraint> parts{attr_and()};
        while (accept(TokenKind::or_or)) parts.push_back(attr_and());
        return parts.size() == 1 ? std::move(parts.front()) : Constraint::any_of(std::move(parts));
    }

    Constraint attr_and() {
        std::vector<Constraint> parts{attr_unary()};
        while (accept(TokenKind::and_and)) parts.push_back(attr_unary());
        return parts.size() == 1 ? std::move(parts.front()) : Constraint::all_of(std::move(parts));
    }

    Constraint attr_unary() {
        if (accept(TokenKind::bang)) return Constraint::negation(attr_unary());
        if (accept(TokenKind::lparen)) {
            Constraint inner = attr_or();
            expect(TokenKind::rparen);
            return inner;
        }
        if (check(TokenKind::string) || check(TokenKind::integer) || check(TokenKind::minus)) {
            Comparison c;
            c.values.push_back(value());
            return Constraint::compare(std::move(c));
        }
        if (check(TokenKind::identifier)) return Constraint::compare(attribute_comparison());
        fail({"attribute", "value", "'!'", "'('"});
    }

    // ---- operations --------------------------------------------------------
    OpExpr op_or() {
        std::vector<OpExpr> parts{op_and()};
        while (accept(TokenKind::or_or)) parts.push_back(op_and());
        return parts.size() == 1 ? std::move(parts.front()) : OpExpr::any_of(std::move(parts));
    }

    OpExpr op_and() {
        std::vector<OpExpr> parts{op_unary()};
        while (accept(TokenKind::and_and)) parts.push_back(op_unary());
        return parts.size() == 1 ? std::move(parts.front()) : OpExpr::all_of(std::move(parts));
    }

    OpExpr op_unary() {
        if (accept(TokenKind::bang)) return OpExpr::negation(op_unary());
        if (accept(TokenKind::lparen)) {
            OpExpr inner = op_or();
            expect(TokenKind::rparen);
            return inner;
        }
        if (check(TokenKind::identifier)) {
            if (auto op = op_from_string(fold_case(peek().text))) {
                next();
                return OpExpr::single(*op);
            }
        }
        fail({"operation"});
    }

    // ---- entities and patterns -----------------------------------------------
    EntityRef entity() {
        const Token& type = peek();
        auto kind = entity_keyword(type);
        if (!kind) fail({"'proc'", "'file'", "'ip'"});
        next();
        EntityRef e;
        e.kind = *kind;
        e.span = Span{type.span};
        if (check(TokenKind::identifier)) {
            if (!is_reserved_word(peek().text)) {
                e.name = next().text;
            } else if (!may_follow_entity_type(peek())) {
                reserved(peek());
            }
        }
        if (accept(TokenKind::lbracket)) {
            e.constraints = attr_or();
            expect(TokenKind::rbracket);
        }
        e.span.at.end = tokens_[pos_ > 0 ? pos_ - 1 : 0].span.end;
        return e;
    }

    EventPattern pattern(EntityRef subject) {
        EventPattern p;
        p.span = Span{subject.span.at};
        p.subject = std::move(subject);
        p.ops = op_or();
        p.object = entity();
        if (accept_keyword("as")) {
            p.event_name = declared_id("event id");
            if (accept(TokenKind::lbracket)) {
                p.event_constraints = attr_or();
                expect(TokenKind::rbracket);
            }
        }
        if (accept(TokenKind::lparen)) {
            p.window = twind();
            expect(TokenKind::rparen);
        }
        p.span.at.end = tokens_[pos_ > 0 ? pos_ - 1 : 0].span.end;
        return p;
    }

    void multievent(QueryContext& ctx, EntityRef first) {
        ctx.patterns.push_back(pattern(std::move(first)));
        while (entity_keyword(peek())) ctx.patterns.push_back(pattern(entity()));
        if (accept_keyword("with")) {
            do {
                ctx.relationships.push_back(relationship());
            } while (accept(TokenKind::comma));
        }
    }

    AttrOperand operand() {
        AttrOperand o;
        o.name = identifier("id");
        if (accept(TokenKind::dot)) o.attribute = identifier("attribute");
        return o;
    }

    Relationship relationship() {
        Relationship r;
        r.span = Span{peek().span};
        if (check(TokenKind::identifier) && (keyword_is(peek(1), "before") || keyword_is(peek(1), "after") ||
                                             keyword_is(peek(1), "within"))) {
            TemporalRelationship t;
            t.left = next().text;
            std::string order = fold_case(next().text);
            t.order = order == "before" ? TemporalOrder::before
                      : order == "after" ? TemporalOrder::after
                                         : TemporalOrder::within;
            if (accept(TokenKind::lbracket)) {
                SourceSpan at = peek().span;
                std::int64_t lo = expect(TokenKind::integer).integer;
                expect(TokenKind::minus);
                std::int64_t hi = expect(TokenKind::integer).integer;
                const Token& u = check(TokenKind::identifier) ? next() : (fail({"time unit"}), peek());
                auto unit = duration_unit_ms(fold_case(u.text));
                if (!unit) throw SyntaxError("unknown time unit '" + u.text + "'", u.span, {"time unit"});
                expect(TokenKind::rbracket);
                if (lo > hi) throw SemanticError("temporal range lower bound exceeds upper bound", t.left, at);
                t.range = TemporalRange{lo * *unit, hi * *unit};
            }
            t.right = identifier("event id");
            r.body = std::move(t);
        } else {
            AttrRelationship a;
            a.left = operand();
            auto cmp = comparator_of(peek().kind);
            if (!cmp) fail({"comparator", "'before'", "'after'", "'within'"});
            next();
            a.op = *cmp;
            a.right = operand();
            r.body = std::move(a);
        }
        r.span.at.end = tokens_[pos_ - 1].span.end;
        return r;
    }

    void dependency(QueryContext& ctx, std::optional<EntityRef> first) {
        DependencyChain chain;
        SourceSpan at = peek().span;
        if (!first) {
            chain.keyword = keyword_is(peek(), "forward") ? ChainKeyword::forward : ChainKeyword::backward;
            next();
            expect(TokenKind::colon);
            at = peek().span;
            first = entity();
        }
        chain.nodes.push_back(std::move(*first));
        while (check(TokenKind::arrow_right) || check(TokenKind::arrow_left)) {
            ChainEdge edge;
            edge.span = Span{peek().span};
            edge.rightward = next().kind == TokenKind::arrow_right;
            expect(TokenKind::lbracket);
            edge.ops = op_or();
            expect(TokenKind::rbracket);
            chain.edges.push_back(std::move(edge));
            chain.nodes.push_back(entity());
        }
        if (chain.edges.empty()) throw SemanticError("dependency chain needs at least one edge", "", at);
        ctx.chain = std::move(chain);
    }

    // ---- return clause -------------------------------------------------------
    ReturnItem return_item() {
        ReturnItem item;
        item.span = Span{peek().span};
        if (auto agg = aggregate_keyword(peek()); agg && check(TokenKind::lparen, 1)) {
            next();
            next();
            item.agg = *agg;
            item.distinct = accept_keyword("distinct");
            item.name = identifier("id");
            if (accept(TokenKind::dot)) item.attribute = identifier("attribute");
            expect(TokenKind::rparen);
        } else {
            item.name = identifier("id");
            if (accept(TokenKind::dot)) item.attribute = identifier("attribute");
        }
        if (accept_keyword("as")) item.alias = declared_id("alias");
        item.span.at.end = tokens_[pos_ - 1].span.end;
        return item;
    }

    ReturnSpec returns() {
        ReturnSpec r;
        expect_keyword("return");
        if (keyword_is(peek(), "count") && !check(TokenKind::lparen, 1)) {
            next();
            r.count = true;
        }
        r.distinct = accept_keyword("distinct");
        do {
            r.items.push_back(return_item());
        } while (accept(TokenKind::comma));
        return r;
    }

    void filters(ReturnSpec& r) {
        bool seen_group = false, seen_having = false, seen_sort = false, seen_top = false;
        while (true) {
            const Token& t = peek();
            if (!seen_group && keyword_is(t, "group")) {
                next();
                expect_keyword("by");
                do {
                    r.group_by.push_back(return_item());
                } while (accept(TokenKind::comma));
                seen_group = true;
            } else if (!seen_having && keyword_is(t, "having")) {
                next();
                r.having = expr();
                seen_having = true;
            } else if (!seen_sort && keyword_is(t, "sort")) {
                next();
                expect_keyword("by");
                do {
                    SortKey k;
                    k.span = Span{peek().span};
                    k.name = identifier("sort key");
                    if (accept(TokenKind::dot)) k.attribute = identifier("attribute");
                    r.sort_by.push_back(std::move(k));
                } while (accept(TokenKind::comma));
                if (accept_keyword("desc")) r.descending = true;
                else accept_keyword("asc");
                seen_sort = true;
            } else if (!seen_top && keyword_is(t, "top")) {
                next();
                const Token& n = expect(TokenKind::integer);
                if (n.integer < 0) throw SyntaxError("top expects a non-negative integer", n.span, {"integer"});
                r.top = n.integer;
                seen_top = true;
            } else {
                break;
            }
        }
    }

    // ---- having expressions --------------------------------------------------
    static ValueExpr binary(ValueExpr::BinOp op, ValueExpr a, ValueExpr b) {
        ValueExpr e;
        e.kind = ValueExpr::Kind::binary;
        e.op = op;
        e.span = Span{SourceSpan{a.span.at.begin, b.span.at.end}};
        e.args.push_back(std::move(a));
        e.args.push_back(std::move(b));
        return e;
    }

    ValueExpr expr() { return expr_or(); }

    ValueExpr expr_or() {
        ValueExpr left = expr_and();
        while (accept(TokenKind::or_or)) left = binary(ValueExpr::BinOp::lor, std::move(left), expr_and());
        return left;
    }

    ValueExpr expr_and() {
        ValueExpr left = expr_cmp();
        while (accept(TokenKind::and_and)) left = binary(ValueExpr::BinOp::land, std::move(left), expr_cmp());
        return left;
    }

    ValueExpr expr_cmp() {
        ValueExpr left = expr_add();
        while (true) {
            using B = ValueExpr::BinOp;
            std::optional<B> op;
            switch (peek().kind) {
                case TokenKind::lt: op = B::lt; break;
                case TokenKind::le: op = B::le; break;
                case TokenKind::gt: op = B::gt; break;
                case TokenKind::ge: op = B::ge; break;
                case TokenKind::eq: op = B::eq; break;
                case TokenKind::ne: op = B::ne; break;
                default: break;
            }
            if (!op) return left;
            next();
            left = binary(*op, std::move(left), expr_add());
        }
    }

    ValueExpr expr_add() {
        ValueExpr left = expr_mul();
        while (check(TokenKind::plus) || check(TokenKind::minus)) {
            auto op = next().kind == TokenKind::plus ? ValueExpr::BinOp::add : ValueExpr::BinOp::sub;
            left = binary(op, std::move(left), expr_mul());
        }
        return left;
    }

    ValueExpr expr_mul() {
        ValueExpr left = expr_unary();
        while (check(TokenKind::star) || check(TokenKind::slash)) {
            auto op = next().kind == TokenKind::star ? ValueExpr::BinOp::mul : ValueExpr::BinOp::div;
            left = binary(op, std::move(left), expr_unary());
        }
        return left;
    }

    ValueExpr expr_unary() {
        SourceSpan at = peek().span;
        if (check(TokenKind::minus) || check(TokenKind::bang)) {
            bool negate = next().kind == TokenKind::minus;
            ValueExpr e;
            e.kind = negate ? ValueExpr::Kind::negate : ValueExpr::Kind::logical_not;
            e.args.push_back(expr_unary());
            e.span = Span{SourceSpan{at.begin, e.args.front().span.at.end}};
            return e;
        }
        return expr_primary();
    }

    ValueExpr expr_primary() {
        const Token& t = peek();
        ValueExpr e;
        e.span = Span{t.span};
        switch (t.kind) {
            case TokenKind::integer:
            case TokenKind::decimal:
                e.kind = ValueExpr::Kind::number;
                e.number = next().decimal;
                return e;
            case TokenKind::string:
                e.kind = ValueExpr::Kind::string;
                e.text = next().text;
                return e;
            case TokenKind::lparen: {
                next();
                ValueExpr inner = expr();
                expect(TokenKind::rparen);
                return inner;
            }
            case TokenKind::identifier: {
                e.text = next().text;
                if (accept(TokenKind::lparen)) {
                    e.kind = ValueExpr::Kind::call;
                    if (!check(TokenKind::rparen)) {
                        do {
                            e.args.push_back(expr());
                        } while (accept(TokenKind::comma));
                    }
                    expect(TokenKind::rparen);
                } else {
                    e.kind = ValueExpr::Kind::ref;
                    if (accept(TokenKind::dot)) e.text += "." + identifier("attribute");
                    if (accept(TokenKind::lbracket)) {
                        e.kind = ValueExpr::Kind::history;
                        e.lag = expect(TokenKind::integer).integer;
                        expect(TokenKind::rbracket);
                    }
                }
                e.span.at.end = tokens_[pos_ - 1].span.end;
                return e;
            }
            default: fail({"number", "name", "'('"});
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::vector<Token> tokens_or_throw(std::string_view text) {
    LexResult lexed = lex(text);
    if (!lexed.errors.empty()) throw lexed.errors.front();
    return std::move(lexed.tokens);
}

}  // namespace

QueryContext parse_raw(std::string_view text) { return Parser(tokens_or_throw(text)).query(); }

QueryContext parse(std::string_view text) { return expand_shortcuts(parse_raw(text)); }

TimeWindow parse_time_literal(std::string_view text) { return Parser(tokens_or_throw(text)).time_literal(); }

}  // namespace aiql
