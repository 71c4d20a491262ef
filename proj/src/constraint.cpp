#include "aiql/constraint.hpp"

#include <algorithm>

namespace aiql {

std::string_view to_string(Comparator op) {
    switch (op) {
        case Comparator::eq: return "=";
        case Comparator::ne: return "!=";
        case Comparator::lt: return "<";
        case Comparator::le: return "<=";
        case Comparator::gt: return ">";
        case Comparator::ge: return ">=";
        case Comparator::in: return "in";
        case Comparator::not_in: return "not in";
    }
    return "?";
}

namespace {

template <class T>
bool ordered(Comparator op, const T& a, const T& b) {
    switch (op) {
        case Comparator::lt: return a < b;
        case Comparator::le: return a <= b;
        case Comparator::gt: return a > b;
        case Comparator::ge: return a >= b;
        default: return false;
    }
}

bool is_ordering(Comparator op) {
    return op == Comparator::lt || op == Comparator::le || op == Comparator::gt || op == Comparator::ge;
}

bool order_scalars(Comparator op, const Scalar& a, const Scalar& b) {
    const auto* ai = std::get_if<std::int64_t>(&a);
    const auto* bi = std::get_if<std::int64_t>(&b);
    if (ai && bi) return ordered(op, *ai, *bi);
    if (!ai && !bi) return ordered(op, fold_case(std::get<std::string>(a)), fold_case(std::get<std::string>(b)));
    auto an = scalar_as_int(a);
    auto bn = scalar_as_int(b);
    if (an && bn) return ordered(op, *an, *bn);
    return false;
}

bool literal_equals(const Scalar& actual, const Scalar& literal) {
    if (const auto* li = std::get_if<std::int64_t>(&literal)) {
        if (const auto* ai = std::get_if<std::int64_t>(&actual)) return *ai == *li;
        auto an = scalar_as_int(actual);
        return an && *an == *li;
    }
    return match_value(std::get<std::string>(literal), scalar_to_string(actual));
}

bool attribute_equals(const Scalar& left, const Scalar& right) {
    const auto* li = std::get_if<std::int64_t>(&left);
    const auto* ri = std::get_if<std::int64_t>(&right);
    if (li && ri) return *li == *ri;
    if (li || ri) {
        auto ln = scalar_as_int(left);
        auto rn = scalar_as_int(right);
        return ln && rn && *ln == *rn;
    }
    return fold_case(std::get<std::string>(left)) == fold_case(std::get<std::string>(right));
}

}  // namespace

bool compare_scalar(Comparator op, const Scalar& actual, const Scalar& literal) {
    if (op == Comparator::eq) return literal_equals(actual, literal);
    if (op == Comparator::ne) return !literal_equals(actual, literal);
    if (is_ordering(op)) return order_scalars(op, actual, literal);
    return false;
}

bool compare_attributes(Comparator op, const Scalar& left, const Scalar& right) {
    if (op == Comparator::eq) return attribute_equals(left, right);
    if (op == Comparator::ne) return !attribute_equals(left, right);
    if (is_ordering(op)) return order_scalars(op, left, right);
    return false;
}

bool evaluate(const Comparison& cmp, const std::optional<Scalar>& actual) {
    if (!actual) return false;
    switch (cmp.op) {
        case Comparator::in:
            return std::any_of(cmp.values.begin(), cmp.values.end(),
                               [&](const Scalar& v) { return literal_equals(*actual, v); });
        case Comparator::not_in:
            return std::none_of(cmp.values.begin(), cmp.values.end(),
                                [&](const Scalar& v) { return literal_equals(*actual, v); });
        default:
            if (cmp.values.empty()) return false;
            return compare_scalar(cmp.op, *actual, cmp.values.front());
    }
}

Constraint Constraint::compare(Comparison c) {
    Constraint out;
    out.kind = Kind::compare;
    out.cmp = std::move(c);
    return out;
}

Constraint Constraint::all_of(std::vector<Constraint> parts) {
    Constraint out;
    out.kind = Kind::all;
    out.children = std::move(parts);
    return out;
}

Constraint Constraint::any_of(std::vector<Constraint> parts) {
    Constraint out;
    out.kind = Kind::any;
    out.children = std::move(parts);
    return out;
}

Constraint Constraint::negation(Constraint inner) {
    Constraint out;
    out.kind = Kind::negate;
    out.children.push_back(std::move(inner));
    return out;
}

std::size_t Constraint::atom_count() const {
    std::size_t n = 0;
    for_each_comparison([&](const Comparison&) { ++n; });
    return n;
}

std::vector<const Comparison*> Constraint::required_comparisons() const {
    std::vector<const Comparison*> out;
    if (kind == Kind::compare) {
        out.push_back(&cmp);
    } else if (kind == Kind::all) {
        for (const auto& c : children) {
            auto inner = c.required_comparisons();
            out.insert(out.end(), inner.begin(), inner.end());
        }
    }
    return out;
}

Constraint conjoin(Constraint a, Constraint b) {
    if (a.is_always()) return b;
    if (b.is_always()) return a;
    std::vector<Constraint> parts;
    auto absorb = [&](Constraint c) {
        if (c.kind == Constraint::Kind::all) {
            for (auto& child : c.children) parts.push_back(std::move(child));
        } else {
            parts.push_back(std::move(c));
        }
    };
    absorb(std::move(a));
    absorb(std::move(b));
    return Constraint::all_of(std::move(parts));
}

OpExpr OpExpr::single(OpType op) {
    OpExpr out;
    out.kind = Kind::op;
    out.op = op;
    return out;
}

OpExpr OpExpr::all_of(std::vector<OpExpr> parts) {
    OpExpr out;
    out.kind = Kind::all;
    out.children = std::move(parts);
    return out;
}

OpExpr OpExpr::any_of(std::vector<OpExpr> parts) {
    OpExpr out;
    out.kind = Kind::any;
    out.children = std::move(parts);
    return out;
}

OpExpr OpExpr::negation(OpExpr inner) {
    OpExpr out;
    out.kind = Kind::negate;
    out.children.push_back(std::move(inner));
    return out;
}

bool OpExpr::matches(OpType candidate) const {
    switch (kind) {
        case Kind::op: return op == candidate;
        case Kind::all:
            return std::all_of(children.begin(), children.end(), [&](const OpExpr& c) { return c.matches(candidate); });
        case Kind::any:
            return std::any_of(children.begin(), children.end(), [&](const OpExpr& c) { return c.matches(candidate); });
        case Kind::negate: return !children.front().matches(candidate);
    }
    return false;
}

std::uint8_t OpExpr::mask() const {
    std::uint8_t m = 0;
    for (std::size_t i = 0; i < kOpTypeCount; ++i)
        if (matches(static_cast<OpType>(i))) m |= static_cast<std::uint8_t>(1u << i);
    return m;
}

std::string format_scalar_literal(const Scalar& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    std::string out = "\"";
    for (char c : std::get<std::string>(value)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string format_comparison(const Comparison& c) {
    std::string out = c.attribute.empty() ? std::string() : c.attribute + " ";
    if (c.op == Comparator::in || c.op == Comparator::not_in) {
        out += std::string(to_string(c.op)) + " (";
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            if (i) out += ", ";
            out += format_scalar_literal(c.values[i]);
        }
        return out + ")";
    }
    if (c.attribute.empty()) {
        // Bare value: only equality has a surface form.
        return format_scalar_literal(c.values.front());
    }
    return out + std::string(to_string(c.op)) + " " + format_scalar_literal(c.values.front());
}

std::string format_child(const Constraint& c) {
    if (c.kind == Constraint::Kind::all || c.kind == Constraint::Kind::any) return "(" + format_constraint(c) + ")";
    return format_constraint(c);
}

std::string format_op_child(const OpExpr& e) {
    if (e.kind == OpExpr::Kind::all || e.kind == OpExpr::Kind::any) return "(" + format_op_expr(e) + ")";
    return format_op_expr(e);
}

}  // namespace

std::string format_constraint(const Constraint& c) {
    switch (c.kind) {
        case Constraint::Kind::always: return "";
        case Constraint::Kind::compare: return format_comparison(c.cmp);
        case Constraint::Kind::all:
        case Constraint::Kind::any: {
            std::string out;
            const char* sep = c.kind == Constraint::Kind::all ? " && " : " || ";
            for (std::size_t i = 0; i < c.children.size(); ++i) {
                if (i) out += sep;
                out += format_child(c.children[i]);
            }
            return out;
        }
        case Constraint::Kind::negate: {
            const auto& inner = c.children.front();
            if (inner.kind == Constraint::Kind::compare) return "!(" + format_constraint(inner) + ")";
            return "!" + format_child(inner);
        }
    }
    return "";
}

std::string format_op_expr(const OpExpr& e) {
    switch (e.kind) {
        case OpExpr::Kind::op: return std::string(to_string(e.op));
        case OpExpr::Kind::all:
        case OpExpr::Kind::any: {
            std::string out;
            const char* sep = e.kind == OpExpr::Kind::all ? " && " : " || ";
            for (std::size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += sep;
                out += format_op_child(e.children[i]);
            }
            return out;
        }
        case OpExpr::Kind::negate: return "!" + format_op_child(e.children.front());
    }
    return "";
}

}  // namespace aiql
