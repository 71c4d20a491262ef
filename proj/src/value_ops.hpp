#pragma once

// Value helpers shared by result assembly and anomaly evaluation.

#include <optional>
#include <string>
#include <vector>

#include "aiql/engine.hpp"

namespace aiql::detail {

inline constexpr double kTolerance = 1e-9;

Value to_value(const std::optional<Scalar>& s);
std::optional<double> as_number(const Value& v);
bool truthy(const Value& v);

/// Total order: missing < numbers < strings; numbers by value.
int compare_values(const Value& a, const Value& b);

/// Attribute of `pattern`'s slot for event `ev`.
Value slot_value(const Store& store, EventIndex ev, Role role, const std::string& attribute);

/// count/avg/sum/max/min over `values` (missing values ignored).
Value aggregate(Aggregate agg, bool distinct, std::vector<Value> values);

/// `ref(column, lag)` yields a column value; `call(e)` evaluates a built-in.
/// nullopt means undefined (missing data, insufficient history, x/0).
template <class Ref, class Call>
std::optional<Value> eval_expr(const ValueExpr& e, const Ref& ref, const Call& call);

std::optional<Value> apply_binary(ValueExpr::BinOp op, const Value& a, const Value& b);

template <class Ref, class Call>
std::optional<Value> eval_expr(const ValueExpr& e, const Ref& ref, const Call& call) {
    using K = ValueExpr::Kind;
    switch (e.kind) {
        case K::number: return Value{e.number};
        case K::string: return Value{e.text};
        case K::ref: return ref(e.text, std::int64_t{0});
        case K::history: return ref(e.text, e.lag);
        case K::call: {
            auto v = call(e);
            if (!v) return std::nullopt;
            return Value{*v};
        }
        case K::negate: {
            auto v = eval_expr(e.args[0], ref, call);
            if (!v) return std::nullopt;
            auto n = as_number(*v);
            if (!n) return std::nullopt;
            return Value{-*n};
        }
        case K::logical_not: {
            auto v = eval_expr(e.args[0], ref, call);
            if (!v) return std::nullopt;
            return Value{std::int64_t{truthy(*v) ? 0 : 1}};
        }
        case K::binary: {
            auto a = eval_expr(e.args[0], ref, call);
            if (e.op == ValueExpr::BinOp::land && a && !truthy(*a)) return Value{std::int64_t{0}};
            if (e.op == ValueExpr::BinOp::lor && a && truthy(*a)) return Value{std::int64_t{1}};
            auto b = eval_expr(e.args[1], ref, call);
            if (!a || !b) return std::nullopt;
            return apply_binary(e.op, *a, *b);
        }
    }
    return std::nullopt;
}

}  // namespace aiql::detail
