#include <algorithm>

#include "aiql/engine.hpp"

namespace aiql {

namespace {

// Agent ids a required `agentid = v` / `agentid in (...)` conjunct allows.
std::optional<std::vector<AgentId>> required_agents(const Constraint& filter) {
    std::optional<std::vector<AgentId>> out;
    for (const Comparison* cmp : filter.required_comparisons()) {
        if (cmp->attribute != "agentid") continue;
        if (cmp->op != Comparator::eq && cmp->op != Comparator::in) continue;
        std::vector<AgentId> ids;
        bool numeric = true;
        for (const auto& v : cmp->values) {
            auto n = scalar_as_int(v);
            if (!n) {
                numeric = false;
                break;
            }
            ids.push_back(AgentId{*n});
        }
        if (!numeric) continue;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (out) {
            std::vector<AgentId> both;
            std::set_intersection(out->begin(), out->end(), ids.begin(), ids.end(), std::back_inserter(both));
            out = std::move(both);
        } else {
            out = std::move(ids);
        }
    }
    return out;
}

int category_rank(EntityKind kind) { return kind == EntityKind::file ? 1 : 2; }

}  // namespace

DataQuery synthesize_data_query(const EventPattern& pattern, const GlobalConstraints& globals) {
    DataQuery q;
    q.subject_kind = pattern.subject.kind;
    q.object_kind = pattern.object.kind;
    q.ops = pattern.ops;
    q.op_mask = pattern.ops.mask();
    q.subject_constraints = pattern.subject.constraints;
    q.object_constraints = pattern.object.constraints;
    q.event_constraints = conjoin(globals.event_filter, pattern.event_constraints);
    q.agents = required_agents(globals.event_filter);
    if (globals.window || pattern.window) {
        q.time_range = intersect(globals.window, pattern.window);
        if (!q.time_range || q.time_range->empty()) {
            q.time_range = TimeWindow{0, 0};
            q.statically_empty = true;
        }
    }
    if (q.op_mask == 0) q.statically_empty = true;
    return q;
}

int pruning_score(const EventPattern& pattern) {
    auto n = pattern.subject.constraints.atom_count() + pattern.object.constraints.atom_count() +
             pattern.event_constraints.atom_count() + (pattern.window ? 1 : 0);
    return static_cast<int>(n);
}

int relationship_type_rank(const Relationship& rel, const std::vector<EventPattern>& patterns) {
    int l = category_rank(patterns[static_cast<std::size_t>(rel.left_pattern())].category());
    int r = category_rank(patterns[static_cast<std::size_t>(rel.right_pattern())].category());
    return std::max(l, r);
}

std::vector<std::size_t> sort_relationships(const std::vector<Relationship>& rels,
                                            const std::vector<EventPattern>& patterns, const std::vector<int>& scores) {
    std::vector<std::size_t> order(rels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        const auto& r = rels[i];
        return std::pair{relationship_type_rank(r, patterns),
                         scores[static_cast<std::size_t>(r.left_pattern())] +
                             scores[static_cast<std::size_t>(r.right_pattern())]};
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
    return order;
}

}  // namespace aiql
