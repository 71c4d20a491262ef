// Context-aware shortcut expansion and name resolution.

#include <algorithm>
#include <map>
#include <set>

#include "aiql/parser.hpp"

namespace aiql {

namespace {

std::string_view kind_prefix(EntityKind kind) {
    switch (kind) {
        case EntityKind::file: return "_file";
        case EntityKind::process: return "_proc";
        case EntityKind::network: return "_ip";
    }
    return "_ent";
}

class NamePool {
public:
    void reserve(const std::string& name) {
        if (!name.empty()) used_.insert(name);
    }
    std::string fresh(std::string_view prefix) {
        for (int k = 1;; ++k) {
            std::string candidate = std::string(prefix) + std::to_string(k);
            if (used_.insert(candidate).second) return candidate;
        }
    }

private:
    std::set<std::string> used_;
};

void canonicalize_entity_constraints(Constraint& c, EntityKind kind, const std::string& owner, SourceSpan at) {
    c.for_each_comparison_mut([&](Comparison& cmp) {
        if (cmp.attribute.empty()) {
            cmp.attribute = std::string(default_attribute(kind));
            return;
        }
        auto canonical = canonical_entity_attribute(kind, cmp.attribute);
        if (!canonical)
            throw SemanticError("attribute '" + cmp.attribute + "' not valid for " + std::string(to_string(kind)) +
                                    (owner.empty() ? "" : " " + owner),
                                cmp.attribute, at);
        cmp.attribute = *canonical;
    });
}

void canonicalize_event_constraints(Constraint& c, SourceSpan at) {
    c.for_each_comparison_mut([&](Comparison& cmp) {
        if (cmp.attribute.empty()) {
            cmp.attribute = "id";
            return;
        }
        auto canonical = canonical_event_attribute(cmp.attribute);
        if (!canonical) throw SemanticError("attribute '" + cmp.attribute + "' not valid for events", cmp.attribute, at);
        cmp.attribute = *canonical;
    });
}

std::string canonical_attribute(const NameBinding& b, const std::string& attribute, const std::string& name,
                                SourceSpan at) {
    if (b.role == Role::event) {
        if (attribute.empty()) return "id";
        auto c = canonical_event_attribute(attribute);
        if (!c) throw SemanticError("attribute '" + attribute + "' not valid for event " + name, name, at);
        return *c;
    }
    if (attribute.empty()) return std::string(default_attribute(b.kind));
    auto c = canonical_entity_attribute(b.kind, attribute);
    if (!c)
        throw SemanticError("attribute '" + attribute + "' not valid for " + std::string(to_string(b.kind)) + " " + name,
                            name, at);
    return *c;
}

bool numeric_attribute(const NameBinding& b, const std::string& canonical) {
    return b.role == Role::event ? is_numeric_event_attribute(canonical) : is_numeric_entity_attribute(canonical);
}

// Resolves a return or group-by item against a name lookup.
template <class Resolve>
void resolve_item(ReturnItem& item, const Resolve& resolve) {
    auto b = resolve(item.name);
    if (!b) throw SemanticError("undeclared id '" + item.name + "' in return", item.name, item.span.at);
    item.attribute = canonical_attribute(*b, item.attribute, item.name, item.span.at);
    item.pattern = b->pattern;
    item.role = b->role;
    if (item.agg != Aggregate::none && item.agg != Aggregate::count && !numeric_attribute(*b, item.attribute))
        throw SemanticError(std::string(to_string(item.agg)) + " needs a numeric attribute, got " + item.reference(),
                            item.name, item.span.at);
}

void check_kinds(const EventPattern& p) {
    if (p.subject.kind != EntityKind::process)
        throw SemanticError("event subject must be a process", p.subject.name, p.subject.span.at);
    std::uint8_t allowed = 0;
    for (std::size_t op = 0; op < kOpTypeCount; ++op)
        if (op_allowed(static_cast<OpType>(op), p.object.kind)) allowed |= static_cast<std::uint8_t>(1u << op);
    if ((p.ops.mask() & allowed) == 0)
        throw SemanticError("operation " + format_op_expr(p.ops) + " not valid for " +
                                std::string(to_string(p.object.kind)) + " object",
                            p.object.name, p.span.at);
}

struct Appearance {
    int pattern;
    Role role;
    EntityKind kind;
    SourceSpan at;
};

bool same_implicit(const Relationship& r, const AttrRelationship& a) {
    if (r.temporal()) return false;
    const auto& x = r.attr();
    return x.op == a.op && x.left.name == a.left.name && x.left.attribute == a.left.attribute &&
           x.left.pattern == a.left.pattern && x.left.role == a.left.role && x.right.name == a.right.name &&
           x.right.attribute == a.right.attribute && x.right.pattern == a.right.pattern && x.right.role == a.right.role;
}

// Column names a having/sort expression may refer to.
struct Columns {
    std::vector<std::string> names;  // alias or generated column name
    std::vector<std::string> references;

    std::optional<int> find(const std::string& text) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == text) return static_cast<int>(i);
        for (std::size_t i = 0; i < references.size(); ++i)
            if (references[i] == text) return static_cast<int>(i);
        return std::nullopt;
    }
};

template <class Resolve>
std::optional<int> find_column(const Columns& cols, const std::string& name, const std::string& attribute,
                               const Resolve& resolve) {
    std::string text = attribute.empty() ? name : name + "." + attribute;
    if (auto c = cols.find(text)) return c;
    if (auto b = resolve(name)) {
        std::string canonical;
        try {
            canonical = canonical_attribute(*b, attribute, name, {});
        } catch (const SemanticError&) {
            return std::nullopt;
        }
        return cols.find(name + "." + canonical);
    }
    return std::nullopt;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

template <class Resolve>
void resolve_having(ValueExpr& e, const Columns& cols, bool sliding, const Resolve& resolve) {
    using K = ValueExpr::Kind;
    switch (e.kind) {
        case K::ref:
        case K::history: {
            if (e.kind == K::history && !sliding)
                throw SemanticError("history reference " + e.text + "[" + std::to_string(e.lag) +
                                        "] needs a sliding window",
                                    e.text, e.span.at);
            auto dot = e.text.find('.');
            std::string name = dot == std::string::npos ? e.text : e.text.substr(0, dot);
            std::string attr = dot == std::string::npos ? std::string() : e.text.substr(dot + 1);
            auto col = find_column(cols, name, attr, resolve);
            if (!col) throw SemanticError("unknown alias '" + e.text + "' in having", e.text, e.span.at);
            e.text = cols.names[static_cast<std::size_t>(*col)];
            return;
        }
        case K::call: {
            std::string fn = upper(e.text);
            std::size_t want = fn == "CMA" ? 1 : 2;
            if (fn != "SMA" && fn != "CMA" && fn != "WMA" && fn != "EWMA")
                throw SemanticError("unknown function '" + e.text + "'", e.text, e.span.at);
            if (!sliding) throw SemanticError(fn + " needs a sliding window", e.text, e.span.at);
            if (e.args.size() != want)
                throw SemanticError(fn + " expects " + std::to_string(want) + " argument(s)", e.text, e.span.at);
            if (e.args[0].kind != K::ref)
                throw SemanticError(fn + " expects a column name as its first argument", e.text, e.span.at);
            resolve_having(e.args[0], cols, sliding, resolve);
            if (want == 2) {
                const auto& p = e.args[1];
                if (p.kind != K::number) throw SemanticError(fn + " expects a numeric parameter", e.text, e.span.at);
                if (fn == "EWMA" && !(p.number > 0.0 && p.number <= 1.0))
                    throw SemanticError("EWMA smoothing factor must be in (0, 1]", e.text, p.span.at);
                if (fn != "EWMA" && (p.number < 1.0 || p.number != static_cast<double>(static_cast<std::int64_t>(p.number))))
                    throw SemanticError(fn + " window must be a positive integer", e.text, p.span.at);
            }
            e.text = fn;
            return;
        }
        default:
            for (auto& a : e.args) resolve_having(a, cols, sliding, resolve);
    }
}

void expand_globals(GlobalConstraints& g) {
    canonicalize_event_constraints(g.event_filter, {});
    if (g.sliding) {
        if (g.sliding->step_ms <= 0 || g.sliding->length_ms < g.sliding->step_ms)
            throw SemanticError("sliding window needs length >= step > 0", "window", {});
    }
}

template <class Resolve>
void resolve_return_spec(ReturnSpec& spec, bool sliding, const Resolve& resolve) {
    for (auto& item : spec.items) resolve_item(item, resolve);
    for (auto& item : spec.group_by) resolve_item(item, resolve);

    Columns cols;
    for (const auto& item : spec.items) {
        cols.names.push_back(item.column_name());
        cols.references.push_back(item.agg == Aggregate::none ? item.reference() : item.column_name());
    }
    if (spec.count) {
        cols.names.push_back("count");
        cols.references.push_back("count");
    }
    if (spec.having) resolve_having(*spec.having, cols, sliding, resolve);
    for (auto& key : spec.sort_by) {
        auto col = find_column(cols, key.name, key.attribute, resolve);
        if (!col) {
            std::string text = key.attribute.empty() ? key.name : key.name + "." + key.attribute;
            throw SemanticError("sort key '" + text + "' is not a returned column", key.name, key.span.at);
        }
        key.column = *col;
    }
}

void expand_dependency(QueryContext& ctx) {
    auto& chain = *ctx.chain;
    NamePool pool;
    for (const auto& n : chain.nodes) pool.reserve(n.name);
    std::map<std::string, EntityKind> kinds;
    for (auto& n : chain.nodes) {
        if (n.name.empty()) {
            n.name = pool.fresh(kind_prefix(n.kind));
            n.generated = true;
        }
        auto [it, inserted] = kinds.emplace(n.name, n.kind);
        if (!inserted && it->second != n.kind)
            throw SemanticError("'" + n.name + "' reused with a different entity type", n.name, n.span.at);
        canonicalize_entity_constraints(n.constraints, n.kind, n.name, n.span.at);
    }
    if (ctx.globals.sliding) throw SemanticError("dependency queries cannot use a sliding window", "window", {});
    auto resolve = [&](const std::string& name) -> std::optional<NameBinding> {
        auto it = kinds.find(name);
        if (it == kinds.end()) return std::nullopt;
        return NameBinding{-1, Role::subject, it->second};
    };
    resolve_return_spec(ctx.returns, false, resolve);
    // Pattern bindings are assigned when the chain is compiled.
    for (auto& item : ctx.returns.items) item.pattern = -1;
    for (auto& item : ctx.returns.group_by) item.pattern = -1;
}

}  // namespace

void resolve_returns(QueryContext& ctx) {
    resolve_return_spec(ctx.returns, ctx.globals.sliding.has_value(),
                        [&](const std::string& name) { return resolve_name(ctx, name); });
}

QueryContext expand_shortcuts(QueryContext ctx) {
    expand_globals(ctx.globals);
    if (ctx.flavor == Flavor::dependency && ctx.chain) {
        expand_dependency(ctx);
        return ctx;
    }

    NamePool pool;
    for (const auto& p : ctx.patterns) {
        pool.reserve(p.subject.name);
        pool.reserve(p.object.name);
        pool.reserve(p.event_name);
    }
    for (auto& p : ctx.patterns) {
        for (EntityRef* e : {&p.subject, &p.object}) {
            if (e->name.empty()) {
                e->name = pool.fresh(kind_prefix(e->kind));
                e->generated = true;
            }
        }
        if (p.event_name.empty()) {
            p.event_name = pool.fresh("_evt");
            p.generated_event_name = true;
        }
        check_kinds(p);
        canonicalize_entity_constraints(p.subject.constraints, p.subject.kind, p.subject.name, p.subject.span.at);
        canonicalize_entity_constraints(p.object.constraints, p.object.kind, p.object.name, p.object.span.at);
        canonicalize_event_constraints(p.event_constraints, p.span.at);
        if (p.window && p.window->empty()) throw SemanticError("empty local time window", p.event_name, p.span.at);
    }

    // Name table: events are unique; entity names may repeat (reuse) with one kind.
    std::map<std::string, std::vector<Appearance>> entities;
    std::set<std::string> events;
    for (std::size_t i = 0; i < ctx.patterns.size(); ++i) {
        const auto& p = ctx.patterns[i];
        if (!events.insert(p.event_name).second)
            throw SemanticError("event id '" + p.event_name + "' declared twice", p.event_name, p.span.at);
        if (p.subject.name == p.object.name)
            throw SemanticError("'" + p.subject.name + "' used as both subject and object of one event",
                                p.subject.name, p.object.span.at);
        for (auto [e, role] : {std::pair{&p.subject, Role::subject}, std::pair{&p.object, Role::object}}) {
            auto& list = entities[e->name];
            if (!list.empty() && list.front().kind != e->kind)
                throw SemanticError("'" + e->name + "' reused with a different entity type", e->name, e->span.at);
            list.push_back({static_cast<int>(i), role, e->kind, e->span.at});
        }
    }
    for (const auto& [name, list] : entities)
        if (events.count(name))
            throw SemanticError("'" + name + "' names both an entity and an event", name, list.front().at);

    // Explicit relationships.
    for (auto& r : ctx.relationships) {
        if (r.temporal()) {
            auto& t = std::get<TemporalRelationship>(r.body);
            for (auto [name, slot] : {std::pair{&t.left, &t.left_pattern}, std::pair{&t.right, &t.right_pattern}}) {
                auto b = resolve_name(ctx, *name);
                if (!b) throw SemanticError("undeclared id '" + *name + "' in with", *name, r.span.at);
                if (b->role != Role::event)
                    throw SemanticError("'" + *name + "' is not an event id", *name, r.span.at);
                *slot = b->pattern;
            }
            if (t.order == TemporalOrder::within && !t.range)
                throw SemanticError("'within' needs a range", t.left, r.span.at);
            if (t.left_pattern == t.right_pattern)
                throw SemanticError("temporal relationship relates '" + t.left + "' to itself", t.left, r.span.at);
            continue;
        }
        auto& a = std::get<AttrRelationship>(r.body);
        if (a.implicit) continue;
        auto lb = resolve_name(ctx, a.left.name);
        if (!lb) throw SemanticError("undeclared id '" + a.left.name + "' in with", a.left.name, r.span.at);
        auto rb = resolve_name(ctx, a.right.name);
        if (!rb) throw SemanticError("undeclared id '" + a.right.name + "' in with", a.right.name, r.span.at);
        if (a.left.attribute.empty() && a.right.attribute.empty()) {
            a.left.attribute = "id";
            a.right.attribute = "id";
        }
        a.left.attribute = canonical_attribute(*lb, a.left.attribute, a.left.name, r.span.at);
        a.right.attribute = canonical_attribute(*rb, a.right.attribute, a.right.name, r.span.at);
        a.left.pattern = lb->pattern;
        a.left.role = lb->role;
        a.right.pattern = rb->pattern;
        a.right.role = rb->role;
    }

    // Reused entity names join consecutive appearances on id.
    std::vector<std::pair<int, AttrRelationship>> injected;
    for (const auto& [name, list] : entities) {
        for (std::size_t k = 1; k < list.size(); ++k) {
            AttrRelationship a;
            a.left = {name, "id", list[k - 1].pattern, list[k - 1].role};
            a.right = {name, "id", list[k].pattern, list[k].role};
            a.implicit = true;
            injected.emplace_back(list[k].pattern, std::move(a));
        }
    }
    std::stable_sort(injected.begin(), injected.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [pattern, a] : injected) {
        bool present = std::any_of(ctx.relationships.begin(), ctx.relationships.end(),
                                   [&](const Relationship& r) { return same_implicit(r, a); });
        if (!present) ctx.relationships.push_back(Relationship{std::move(a), Span{}});
    }

    resolve_returns(ctx);

    if (ctx.globals.sliding) {
        ctx.flavor = Flavor::anomaly;
        if (ctx.patterns.size() != 1)
            throw SemanticError("anomaly queries take exactly one event pattern", ctx.patterns[1].event_name,
                                ctx.patterns[1].span.at);
        if (!ctx.globals.window) throw SemanticError("anomaly queries need a global time window", "window", {});
    } else {
        ctx.flavor = Flavor::multievent;
    }
    return ctx;
}

}  // namespace aiql
