#pragma once

// Boolean constraint trees over entity/event attributes and over operations.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aiql/model.hpp"

namespace aiql {

enum class Comparator : std::uint8_t { eq, ne, lt, le, gt, ge, in, not_in };

std::string_view to_string(Comparator op);

/// Comparison semantics shared by data queries and relationships:
///  - `=`/`!=` with a string literal use match_value (wildcards honoured);
///  - ordering comparators compare integers numerically and strings
///    case-insensitively; mixed operands compare numerically when the
///    string parses as an integer, otherwise the comparison is false.
bool compare_scalar(Comparator op, const Scalar& actual, const Scalar& literal);

/// Attribute-to-attribute comparison (relationships): like compare_scalar
/// but string equality is plain case-insensitive equality.
bool compare_attributes(Comparator op, const Scalar& left, const Scalar& right);

struct Comparison {
    /// Canonical attribute name; empty until shortcut expansion fills in the
    /// default attribute for a bare value.
    std::string attribute;
    Comparator op = Comparator::eq;
    std::vector<Scalar> values;  // one value unless op is in / not_in

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// A missing attribute fails every comparison (including `!=`).
bool evaluate(const Comparison& cmp, const std::optional<Scalar>& actual);

struct Constraint {
    enum class Kind : std::uint8_t { always, compare, all, any, negate };

    Kind kind = Kind::always;
    Comparison cmp;
    std::vector<Constraint> children;

    static Constraint always() { return {}; }
    static Constraint compare(Comparison c);
    static Constraint all_of(std::vector<Constraint> parts);
    static Constraint any_of(std::vector<Constraint> parts);
    static Constraint negation(Constraint inner);

    bool is_always() const { return kind == Kind::always; }

    /// Number of attribute comparisons in the tree.
    std::size_t atom_count() const;

    template <class Lookup>
    bool evaluate(const Lookup& lookup) const {
        switch (kind) {
            case Kind::always: return true;
            case Kind::compare: return aiql::evaluate(cmp, lookup(cmp.attribute));
            case Kind::all:
                for (const auto& c : children)
                    if (!c.evaluate(lookup)) return false;
                return true;
            case Kind::any:
                for (const auto& c : children)
                    if (c.evaluate(lookup)) return true;
                return false;
            case Kind::negate: return !children.front().evaluate(lookup);
        }
        return false;
    }

    /// Visits every comparison node.
    template <class Fn>
    void for_each_comparison(Fn&& fn) const {
        if (kind == Kind::compare) fn(cmp);
        for (const auto& c : children) c.for_each_comparison(fn);
    }
    template <class Fn>
    void for_each_comparison_mut(Fn&& fn) {
        if (kind == Kind::compare) fn(cmp);
        for (auto& c : children) c.for_each_comparison_mut(fn);
    }

    /// Comparisons that must all hold for the tree to hold (top-level
    /// conjuncts); used for index selection.
    std::vector<const Comparison*> required_comparisons() const;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Conjunction that drops `always` operands.
Constraint conjoin(Constraint a, Constraint b);

/// Boolean expression over the operation of an event.
struct OpExpr {
    enum class Kind : std::uint8_t { op, all, any, negate };

    Kind kind = Kind::op;
    OpType op = OpType::read;
    std::vector<OpExpr> children;

    static OpExpr single(OpType op);
    static OpExpr all_of(std::vector<OpExpr> parts);
    static OpExpr any_of(std::vector<OpExpr> parts);
    static OpExpr negation(OpExpr inner);

    bool matches(OpType candidate) const;
    /// Bit i set iff the expression accepts OpType(i).
    std::uint8_t mask() const;

    friend bool operator==(const OpExpr&, const OpExpr&) = default;
};

/// Source-text rendering used by the pretty printer and explain output.
std::string format_scalar_literal(const Scalar& value);
std::string format_constraint(const Constraint& c);
std::string format_op_expr(const OpExpr& e);

}  // namespace aiql
