#include "aiql/query.hpp"

#include <cmath>
#include <cstdio>

namespace aiql {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::subject: return "subject";
        case Role::object: return "object";
        case Role::event: return "event";
    }
    return "?";
}

std::string_view to_string(TemporalOrder order) {
    switch (order) {
        case TemporalOrder::before: return "before";
        case TemporalOrder::after: return "after";
        case TemporalOrder::within: return "within";
    }
    return "?";
}

std::string_view to_string(Aggregate agg) {
    switch (agg) {
        case Aggregate::none: return "";
        case Aggregate::count: return "count";
        case Aggregate::avg: return "avg";
        case Aggregate::sum: return "sum";
        case Aggregate::max: return "max";
        case Aggregate::min: return "min";
    }
    return "?";
}

std::string_view to_string(Flavor flavor) {
    switch (flavor) {
        case Flavor::multievent: return "multievent";
        case Flavor::dependency: return "dependency";
        case Flavor::anomaly: return "anomaly";
    }
    return "?";
}

int Relationship::left_pattern() const {
    return temporal() ? time().left_pattern : attr().left.pattern;
}

int Relationship::right_pattern() const {
    return temporal() ? time().right_pattern : attr().right.pattern;
}

std::string ReturnItem::reference() const {
    return attribute.empty() ? name : name + "." + attribute;
}

std::string ReturnItem::column_name() const {
    if (!alias.empty()) return alias;
    if (agg == Aggregate::none) return reference();
    return std::string(to_string(agg)) + "(" + (distinct ? "distinct " : "") + reference() + ")";
}

std::optional<NameBinding> resolve_name(const QueryContext& ctx, std::string_view name) {
    if (name.empty()) return std::nullopt;
    for (std::size_t i = 0; i < ctx.patterns.size(); ++i) {
        const auto& p = ctx.patterns[i];
        if (p.subject.name == name) return NameBinding{static_cast<int>(i), Role::subject, p.subject.kind};
        if (p.object.name == name) return NameBinding{static_cast<int>(i), Role::object, p.object.kind};
        if (p.event_name == name) return NameBinding{static_cast<int>(i), Role::event, p.object.kind};
    }
    return std::nullopt;
}

namespace {

std::string format_number(double v) {
    char buf[64];
    if (std::floor(v) == v && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
    }
    return buf;
}

std::string_view binop_text(ValueExpr::BinOp op) {
    using B = ValueExpr::BinOp;
    switch (op) {
        case B::add: return "+";
        case B::sub: return "-";
        case B::mul: return "*";
        case B::div: return "/";
        case B::lt: return "<";
        case B::le: return "<=";
        case B::gt: return ">";
        case B::ge: return ">=";
        case B::eq: return "=";
        case B::ne: return "!=";
        case B::land: return "&&";
        case B::lor: return "||";
    }
    return "?";
}

std::string entity_keyword(EntityKind kind) {
    switch (kind) {
        case EntityKind::file: return "file";
        case EntityKind::process: return "proc";
        case EntityKind::network: return "ip";
    }
    return "?";
}

std::string format_entity(const EntityRef& e) {
    std::string out = entity_keyword(e.kind);
    if (!e.generated && !e.name.empty()) out += " " + e.name;
    if (!e.constraints.is_always()) out += "[" + format_constraint(e.constraints) + "]";
    return out;
}

std::string format_window(const TimeWindow& w) {
    return "from \"" + format_iso8601(w.begin) + "\" to \"" + format_iso8601(w.end) + "\"";
}

std::string format_operand(const AttrOperand& o) {
    return o.attribute.empty() ? o.name : o.name + "." + o.attribute;
}

std::string format_item(const ReturnItem& item) {
    std::string out;
    if (item.agg == Aggregate::none) {
        out = item.reference();
    } else {
        out = std::string(to_string(item.agg)) + "(" + (item.distinct ? "distinct " : "") + item.reference() + ")";
    }
    if (!item.alias.empty()) out += " as " + item.alias;
    return out;
}

std::string format_returns(const ReturnSpec& r) {
    std::string out = "return";
    if (r.count) out += " count";
    if (r.distinct) out += " distinct";
    for (std::size_t i = 0; i < r.items.size(); ++i) out += (i ? ", " : " ") + format_item(r.items[i]);
    out += "\n";
    if (!r.group_by.empty()) {
        out += "group by";
        for (std::size_t i = 0; i < r.group_by.size(); ++i) out += (i ? ", " : " ") + format_item(r.group_by[i]);
        out += "\n";
    }
    if (r.having) out += "having " + format_value_expr(*r.having) + "\n";
    if (!r.sort_by.empty()) {
        out += "sort by";
        for (std::size_t i = 0; i < r.sort_by.size(); ++i) {
            const auto& k = r.sort_by[i];
            out += (i ? ", " : " ") + (k.attribute.empty() ? k.name : k.name + "." + k.attribute);
        }
        if (r.descending) out += " desc";
        out += "\n";
    }
    if (r.top) out += "top " + std::to_string(*r.top) + "\n";
    return out;
}

std::string format_globals(const GlobalConstraints& g) {
    std::string out;
    if (g.event_filter.kind == Constraint::Kind::all) {
        for (const auto& c : g.event_filter.children) out += format_constraint(c) + "\n";
    } else if (!g.event_filter.is_always()) {
        out += format_constraint(g.event_filter) + "\n";
    }
    if (g.window) out += "(" + format_window(*g.window) + ")\n";
    if (g.sliding) {
        out += "window = " + format_duration(g.sliding->length_ms) + "\n";
        out += "step = " + format_duration(g.sliding->step_ms) + "\n";
    }
    return out;
}

}  // namespace

std::string format_relationship(const Relationship& r) {
    if (r.temporal()) {
        const auto& t = r.time();
        std::string out = t.left + " " + std::string(to_string(t.order));
        if (t.range) {
            auto unit = common_unit(t.range->lo, t.range->hi);
            out += "[" + std::to_string(t.range->lo / unit) + "-" + std::to_string(t.range->hi / unit) + " " +
                   std::string(unit_name(unit)) + "]";
        }
        return out + " " + t.right;
    }
    const auto& a = r.attr();
    return format_operand(a.left) + " " + std::string(to_string(a.op)) + " " + format_operand(a.right);
}

std::string format_value_expr(const ValueExpr& e) {
    using K = ValueExpr::Kind;
    switch (e.kind) {
        case K::number: return format_number(e.number);
        case K::string: return format_scalar_literal(Scalar{e.text});
        case K::ref: return e.text;
        case K::history: return e.text + "[" + std::to_string(e.lag) + "]";
        case K::call: {
            std::string out = e.text + "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + format_value_expr(e.args[i]);
            return out + ")";
        }
        case K::negate: return "-(" + format_value_expr(e.args.front()) + ")";
        case K::logical_not: return "!(" + format_value_expr(e.args.front()) + ")";
        case K::binary:
            return "(" + format_value_expr(e.args[0]) + " " + std::string(binop_text(e.op)) + " " +
                   format_value_expr(e.args[1]) + ")";
    }
    return "";
}

std::string to_aiql(const QueryContext& ctx) {
    std::string out = format_globals(ctx.globals);
    if (ctx.flavor == Flavor::dependency && ctx.chain) {
        const auto& chain = *ctx.chain;
        if (chain.keyword == ChainKeyword::forward) out += "forward: ";
        if (chain.keyword == ChainKeyword::backward) out += "backward: ";
        for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
            if (i > 0) {
                const auto& edge = chain.edges[i - 1];
                out += std::string("\n") + (edge.rightward ? "->[" : "<-[") + format_op_expr(edge.ops) + "] ";
            }
            out += format_entity(chain.nodes[i]);
        }
        out += "\n";
    } else {
        for (const auto& p : ctx.patterns) {
            out += format_entity(p.subject) + " " + format_op_expr(p.ops) + " " + format_entity(p.object);
            if (!p.generated_event_name && !p.event_name.empty()) {
                out += " as " + p.event_name;
                if (!p.event_constraints.is_always()) out += "[" + format_constraint(p.event_constraints) + "]";
            }
            if (p.window) out += " (" + format_window(*p.window) + ")";
            out += "\n";
        }
        std::vector<std::string> rels;
        for (const auto& r : ctx.relationships)
            if (!r.implicit()) rels.push_back(format_relationship(r));
        if (!rels.empty()) {
            out += "with ";
            for (std::size_t i = 0; i < rels.size(); ++i) out += (i ? ", " : "") + rels[i];
            out += "\n";
        }
    }
    out += format_returns(ctx.returns);
    return out;
}

}  // namespace aiql
