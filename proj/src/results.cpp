// Result assembly: projection, aggregation, having, distinct, count, sort, top.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "aiql/anomaly.hpp"
#include "aiql/rewrite.hpp"
#include "value_ops.hpp"

namespace aiql {

std::string value_to_string(const Value& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", d);
                return buf;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            return buf;
        }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, v);
}

namespace detail {

Value to_value(const std::optional<Scalar>& s) {
    if (!s) return std::monostate{};
    if (const auto* i = std::get_if<std::int64_t>(&*s)) return *i;
    return std::get<std::string>(*s);
}

std::optional<double> as_number(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

bool truthy(const Value& v) {
    if (auto n = as_number(v)) return *n != 0.0;
    if (const auto* s = std::get_if<std::string>(&v)) return !s->empty();
    return false;
}

int compare_values(const Value& a, const Value& b) {
    auto rank = [](const Value& v) {
        if (std::holds_alternative<std::monostate>(v)) return 0;
        if (std::holds_alternative<std::string>(v)) return 2;
        return 1;
    };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra == 0) return 0;
    if (ra == 2) {
        int c = std::get<std::string>(a).compare(std::get<std::string>(b));
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
    double x = *as_number(a), y = *as_number(b);
    return x < y ? -1 : (x > y ? 1 : 0);
}

Value slot_value(const Store& store, EventIndex ev, Role role, const std::string& attribute) {
    switch (role) {
        case Role::subject: return to_value(entity_attribute(store.entity(store.subject_of(ev)), attribute));
        case Role::object: return to_value(entity_attribute(store.entity(store.object_of(ev)), attribute));
        case Role::event: return to_value(event_attribute(store.event(ev), attribute));
    }
    return std::monostate{};
}

Value aggregate(Aggregate agg, bool distinct, std::vector<Value> values) {
    std::erase_if(values, [](const Value& v) { return std::holds_alternative<std::monostate>(v); });
    if (distinct) {
        std::sort(values.begin(), values.end(), [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
        values.erase(std::unique(values.begin(), values.end(),
                                 [](const Value& a, const Value& b) { return compare_values(a, b) == 0; }),
                     values.end());
    }
    switch (agg) {
        case Aggregate::none: return values.empty() ? Value{} : values.front();
        case Aggregate::count: return static_cast<std::int64_t>(values.size());
        case Aggregate::avg: {
            double sum = 0;
            std::size_t n = 0;
            for (const auto& v : values)
                if (auto x = as_number(v)) sum += *x, ++n;
            if (n == 0) return std::monostate{};
            return sum / static_cast<double>(n);
        }
        case Aggregate::sum: {
            bool all_int = true;
            std::int64_t isum = 0;
            double dsum = 0;
            std::size_t n = 0;
            for (const auto& v : values) {
                auto x = as_number(v);
                if (!x) continue;
                ++n;
                dsum += *x;
                if (const auto* i = std::get_if<std::int64_t>(&v))
                    isum += *i;
                else
                    all_int = false;
            }
            if (n == 0) return std::monostate{};
            return all_int ? Value{isum} : Value{dsum};
        }
        case Aggregate::max:
        case Aggregate::min: {
            std::optional<Value> best;
            for (const auto& v : values) {
                if (!as_number(v)) continue;
                if (!best || (agg == Aggregate::max ? compare_values(v, *best) > 0 : compare_values(v, *best) < 0))
                    best = v;
            }
            return best ? *best : Value{};
        }
    }
    return std::monostate{};
}

std::optional<Value> apply_binary(ValueExpr::BinOp op, const Value& a, const Value& b) {
    using B = ValueExpr::BinOp;
    auto flag = [](bool x) { return Value{std::int64_t{x ? 1 : 0}}; };
    if (op == B::land) return flag(truthy(a) && truthy(b));
    if (op == B::lor) return flag(truthy(a) || truthy(b));
    auto x = as_number(a);
    auto y = as_number(b);
    if (x && y) {
        const double tol = kTolerance * std::max({1.0, std::fabs(*x), std::fabs(*y)});
        switch (op) {
            case B::add: return Value{*x + *y};
            case B::sub: return Value{*x - *y};
            case B::mul: return Value{*x * *y};
            case B::div:
                if (*y == 0.0) return std::nullopt;
                return Value{*x / *y};
            case B::lt: return flag(*x < *y - tol);
            case B::le: return flag(*x <= *y + tol);
            case B::gt: return flag(*x > *y + tol);
            case B::ge: return flag(*x >= *y - tol);
            case B::eq: return flag(std::fabs(*x - *y) <= tol);
            case B::ne: return flag(std::fabs(*x - *y) > tol);
            default: return std::nullopt;
        }
    }
    const auto* s = std::get_if<std::string>(&a);
    const auto* t = std::get_if<std::string>(&b);
    if (!s || !t) return std::nullopt;
    int c = fold_case(*s).compare(fold_case(*t));
    switch (op) {
        case B::lt: return flag(c < 0);
        case B::le: return flag(c <= 0);
        case B::gt: return flag(c > 0);
        case B::ge: return flag(c >= 0);
        case B::eq: return flag(c == 0);
        case B::ne: return flag(c != 0);
        default: return std::nullopt;
    }
}

}  // namespace detail

namespace {

using Row = std::vector<Value>;

struct RowLess {
    bool operator()(const Row& a, const Row& b) const {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            if (int c = detail::compare_values(a[i], b[i])) return c < 0;
        return a.size() < b.size();
    }
};

Value item_value(const Store& store, const TupleSet& t, std::size_t row, const ReturnItem& item) {
    int col = t.column_of(item.pattern);
    if (col < 0) throw SemanticError("return item " + item.reference() + " does not resolve", item.name, item.span.at);
    return detail::slot_value(store, t.at(row, static_cast<std::size_t>(col)), item.role, item.attribute);
}

/// Applies having, distinct, count, sort and top to projected rows.
ResultTable finish(ResultTable table, const ReturnSpec& spec) {
    if (spec.having) {
        std::vector<Row> kept;
        for (auto& row : table.rows) {
            auto ref = [&](const std::string& name, std::int64_t) -> std::optional<Value> {
                for (std::size_t c = 0; c < table.columns.size(); ++c)
                    if (table.columns[c] == name) return row[c];
                return std::nullopt;
            };
            auto call = [](const ValueExpr&) -> std::optional<double> { return std::nullopt; };
            auto v = detail::eval_expr(*spec.having, ref, call);
            if (v && detail::truthy(*v)) kept.push_back(std::move(row));
        }
        table.rows = std::move(kept);
    }
    if (spec.distinct || spec.count) {
        std::map<Row, std::size_t, RowLess> seen;
        std::vector<Row> unique;
        std::vector<std::int64_t> counts;
        for (auto& row : table.rows) {
            auto [it, inserted] = seen.emplace(row, unique.size());
            if (inserted) {
                unique.push_back(std::move(row));
                counts.push_back(1);
            } else {
                ++counts[it->second];
            }
        }
        if (spec.count)
            for (std::size_t i = 0; i < unique.size(); ++i) unique[i].push_back(counts[i]);
        table.rows = std::move(unique);
    }
    if (spec.count) table.columns.push_back("count");
    if (!spec.sort_by.empty()) {
        std::stable_sort(table.rows.begin(), table.rows.end(), [&](const Row& a, const Row& b) {
            for (const auto& key : spec.sort_by) {
                auto c = static_cast<std::size_t>(key.column);
                if (int d = detail::compare_values(a[c], b[c])) return spec.descending ? d > 0 : d < 0;
            }
            return false;
        });
    }
    if (spec.top && static_cast<std::size_t>(std::max<std::int64_t>(*spec.top, 0)) < table.rows.size())
        table.rows.resize(static_cast<std::size_t>(std::max<std::int64_t>(*spec.top, 0)));
    return table;
}

}  // namespace

ResultTable assemble_results(const Store& store, const TupleSet& tuples, const QueryContext& ctx) {
    const ReturnSpec& spec = ctx.returns;
    ResultTable table;

    if (spec.items.empty()) {
        // No return clause: one event-id column per pattern.
        for (std::size_t c = 0; c < tuples.arity(); ++c)
            table.columns.push_back(ctx.patterns[static_cast<std::size_t>(tuples.schema()[c])].event_name);
        for (std::size_t r = 0; r < tuples.size(); ++r) {
            Row row;
            for (std::size_t c = 0; c < tuples.arity(); ++c) row.emplace_back(store.event(tuples.at(r, c)).id);
            table.rows.push_back(std::move(row));
        }
        return finish(std::move(table), spec);
    }

    for (const auto& item : spec.items) table.columns.push_back(item.column_name());
    const bool aggregated = !spec.group_by.empty() || std::any_of(spec.items.begin(), spec.items.end(), [](const auto& i) {
                                return i.agg != Aggregate::none;
                            });

    if (!aggregated) {
        for (std::size_t r = 0; r < tuples.size(); ++r) {
            Row row;
            for (const auto& item : spec.items) row.push_back(item_value(store, tuples, r, item));
            table.rows.push_back(std::move(row));
        }
    } else {
        // Group key: group-by items, else the plain items.
        std::vector<const ReturnItem*> key_items;
        if (!spec.group_by.empty()) {
            for (const auto& g : spec.group_by) key_items.push_back(&g);
        } else {
            for (const auto& i : spec.items)
                if (i.agg == Aggregate::none) key_items.push_back(&i);
        }
        std::map<Row, std::size_t, RowLess> index;
        std::vector<std::vector<std::size_t>> members;
        for (std::size_t r = 0; r < tuples.size(); ++r) {
            Row key;
            for (const auto* k : key_items) key.push_back(item_value(store, tuples, r, *k));
            auto [it, inserted] = index.emplace(std::move(key), members.size());
            if (inserted) members.emplace_back();
            members[it->second].push_back(r);
        }
        for (const auto& group : members) {
            Row row;
            for (const auto& item : spec.items) {
                if (item.agg == Aggregate::none) {
                    row.push_back(item_value(store, tuples, group.front(), item));
                    continue;
                }
                std::vector<Value> values;
                for (std::size_t r : group) values.push_back(item_value(store, tuples, r, item));
                row.push_back(detail::aggregate(item.agg, item.distinct, std::move(values)));
            }
            table.rows.push_back(std::move(row));
        }
    }
    if (spec.count && spec.having) {
        // `having` may reference the count column, so compute it first.
        ReturnSpec counted;
        counted.count = true;
        table = finish(std::move(table), counted);
        ReturnSpec rest = spec;
        rest.count = false;
        return finish(std::move(table), rest);
    }
    return finish(std::move(table), spec);
}

ResultTable run_query(const Store& store, const QueryContext& input, const EngineOptions& options) {
    QueryContext ctx = compile_if_dependency(input);
    if (ctx.flavor == Flavor::anomaly) return anomaly_results(store, ctx, options.execute);
    TupleSet tuples = execute_tuples(store, ctx, options);
    return assemble_results(store, tuples, ctx);
}

}  // namespace aiql
