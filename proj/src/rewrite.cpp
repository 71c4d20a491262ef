#include "aiql/rewrite.hpp"

#include "aiql/parser.hpp"

namespace aiql {

QueryContext compile_dependency(const DependencyChain& chain, const GlobalConstraints& globals,
                                const ReturnSpec& returns) {
    if (chain.edges.empty() || chain.nodes.size() != chain.edges.size() + 1)
        throw SemanticError("dependency chain needs at least one edge", "", {});

    QueryContext out;
    out.flavor = Flavor::multievent;
    out.globals = globals;
    out.returns = returns;

    // Unnamed nodes get one fresh name so both incident edges share it.
    std::vector<EntityRef> nodes = chain.nodes;
    auto used = [&](const std::string& name) {
        for (const auto& n : nodes)
            if (n.name == name) return true;
        return false;
    };
    for (auto& n : nodes) {
        if (!n.name.empty()) continue;
        std::string prefix = n.kind == EntityKind::file ? "_file" : n.kind == EntityKind::process ? "_proc" : "_ip";
        for (int k = 1;; ++k) {
            if (!used(prefix + std::to_string(k))) {
                n.name = prefix + std::to_string(k);
                break;
            }
        }
        n.generated = true;
    }

    std::vector<bool> constrained(nodes.size(), false);
    for (std::size_t i = 0; i < chain.edges.size(); ++i) {
        const ChainEdge& edge = chain.edges[i];
        std::size_t subject = edge.rightward ? i : i + 1;
        std::size_t object = edge.rightward ? i + 1 : i;

        EventPattern p;
        p.subject = nodes[subject];
        p.object = nodes[object];
        p.ops = edge.ops;
        p.span = edge.span;
        p.event_name = "_evt" + std::to_string(i + 1);

        // Node constraints live on the first pattern mentioning the node.
        for (auto [node, ref] : {std::pair{subject, &p.subject}, std::pair{object, &p.object}}) {
            if (constrained[node]) ref->constraints = Constraint::always();
            constrained[node] = true;
        }
        if (p.subject.kind != EntityKind::process)
            throw SemanticError("'" + p.subject.name + "' must be a process to be the subject of " +
                                    format_op_expr(edge.ops),
                                p.subject.name, edge.span.at);
        std::uint8_t allowed = 0;
        for (std::size_t op = 0; op < kOpTypeCount; ++op)
            if (op_allowed(static_cast<OpType>(op), p.object.kind)) allowed |= static_cast<std::uint8_t>(1u << op);
        if ((edge.ops.mask() & allowed) == 0)
            throw SemanticError("operation " + format_op_expr(edge.ops) + " not valid for " +
                                    std::string(to_string(p.object.kind)) + " '" + p.object.name + "'",
                                p.object.name, edge.span.at);
        out.patterns.push_back(std::move(p));
    }

    if (chain.keyword != ChainKeyword::none) {
        for (std::size_t i = 0; i + 1 < out.patterns.size(); ++i) {
            TemporalRelationship t;
            t.left = out.patterns[i].event_name;
            t.right = out.patterns[i + 1].event_name;
            t.order = chain.keyword == ChainKeyword::forward ? TemporalOrder::before : TemporalOrder::after;
            t.left_pattern = static_cast<int>(i);
            t.right_pattern = static_cast<int>(i + 1);
            out.relationships.push_back(Relationship{std::move(t), Span{}});
        }
    }

    // Shared nodes become implicit id joins; names, returns and kinds are
    // resolved by the regular expansion.
    return expand_shortcuts(std::move(out));
}

QueryContext compile_if_dependency(const QueryContext& ctx) {
    if (ctx.flavor != Flavor::dependency || !ctx.chain) return ctx;
    return compile_dependency(*ctx.chain, ctx.globals, ctx.returns);
}

}  // namespace aiql
