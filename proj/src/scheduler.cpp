// Relationship-based scheduling (Algorithm 1).

#include <algorithm>
#include <future>
#include <limits>
#include <numeric>

#include "aiql/rewrite.hpp"
#include "tuple_ops.hpp"

namespace aiql {

std::string_view to_string(StepCase c) {
    switch (c) {
        case StepCase::create: return "create";
        case StepCase::update: return "update";
        case StepCase::filter: return "filter";
        case StepCase::merge: return "merge";
    }
    return "?";
}

Plan plan_schedule(const QueryContext& ctx) {
    Plan plan;
    for (const auto& p : ctx.patterns) plan.scores.push_back(pruning_score(p));
    plan.order = sort_relationships(ctx.relationships, ctx.patterns, plan.scores);

    // group[i]: which tuple set pattern i belongs to (-1 = not executed).
    std::vector<int> group(ctx.patterns.size(), -1);
    int next_group = 0;
    for (std::size_t idx : plan.order) {
        const auto& rel = ctx.relationships[idx];
        int i = rel.left_pattern();
        int j = rel.right_pattern();
        auto gi = group[static_cast<std::size_t>(i)];
        auto gj = group[static_cast<std::size_t>(j)];
        PlanStep step;
        step.relationship = idx;
        if (gi < 0 && gj < 0) {
            step.kind = StepCase::create;
            bool left_first = plan.scores[static_cast<std::size_t>(i)] >= plan.scores[static_cast<std::size_t>(j)];
            step.first = left_first ? i : j;
            step.second = left_first ? j : i;
            group[static_cast<std::size_t>(i)] = group[static_cast<std::size_t>(j)] = next_group++;
        } else if (gi < 0 || gj < 0) {
            step.kind = StepCase::update;
            step.first = gi >= 0 ? i : j;
            step.second = gi >= 0 ? j : i;
            group[static_cast<std::size_t>(step.second)] = group[static_cast<std::size_t>(step.first)];
        } else if (gi == gj) {
            step.kind = StepCase::filter;
            step.first = i;
            step.second = j;
        } else {
            step.kind = StepCase::merge;
            step.first = i;
            step.second = j;
            for (auto& g : group)
                if (g == gj) g = gi;
        }
        plan.steps.push_back(step);
    }
    for (std::size_t p = 0; p < group.size(); ++p)
        if (group[p] < 0) plan.leftovers.push_back(static_cast<int>(p));
    return plan;
}

EventIdSet constrained_execute(const Store& store, DataQuery q, const TupleSet& source, const Relationship& link,
                               int target, const ExecuteOptions& options) {
    const bool target_is_right = link.right_pattern() == target;
    const int other = target_is_right ? link.left_pattern() : link.right_pattern();
    const int column = source.column_of(other);
    if (column < 0) throw std::logic_error("constrained_execute: link does not reach the source tuple set");
    const auto col = static_cast<std::size_t>(column);

    if (detail::is_entity_id_link(link)) {
        const auto& a = link.attr();
        Role source_role = target_is_right ? a.left.role : a.right.role;
        Role target_role = target_is_right ? a.right.role : a.left.role;
        std::vector<EntityIndex> ids;
        ids.reserve(source.size());
        for (std::size_t r = 0; r < source.size(); ++r)
            ids.push_back(detail::operand_entity(store, source_role, source.at(r, col)));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        auto& slot = target_role == Role::subject ? q.subject_binding : q.object_binding;
        if (slot) {
            std::vector<EntityIndex> both;
            std::set_intersection(slot->begin(), slot->end(), ids.begin(), ids.end(), std::back_inserter(both));
            ids = std::move(both);
        }
        slot = std::move(ids);
        return store.execute(q, options);
    }

    std::vector<std::int64_t> starts;
    if (link.temporal()) {
        starts.reserve(source.size());
        for (std::size_t r = 0; r < source.size(); ++r) starts.push_back(store.start_of(source.at(r, col)));
        std::sort(starts.begin(), starts.end());
        auto intervals = delta_intervals(link.time());
        TimeWindow bounds{0, 0};
        if (!starts.empty() && !intervals.empty()) {
            std::int64_t dlo = std::numeric_limits<std::int64_t>::max();
            std::int64_t dhi = std::numeric_limits<std::int64_t>::min();
            for (const auto& iv : intervals) {
                dlo = std::min(dlo, iv.lo);
                dhi = std::max(dhi, iv.hi);
            }
            const std::int64_t lo = starts.front();
            const std::int64_t hi = starts.back();
            // Right start = left start + Δ.
            if (target_is_right) {
                bounds = {saturating_add(lo, dlo), saturating_add(saturating_add(hi, dhi), 1)};
            } else {
                bounds = {saturating_add(lo, dhi == std::numeric_limits<std::int64_t>::min() ? 0 : -dhi),
                          saturating_add(saturating_add(hi, dlo == std::numeric_limits<std::int64_t>::min()
                                                                    ? std::numeric_limits<std::int64_t>::max()
                                                                    : -dlo),
                                         1)};
            }
        }
        q.time_bounds = q.time_bounds ? intersect(q.time_bounds, bounds).value_or(TimeWindow{0, 0}) : bounds;
    }

    EventIdSet found = store.execute(q, options);

    // Exact semi-join against the source.
    std::vector<EventIndex> kept;
    if (link.temporal()) {
        for (EventIndex e : found.ids()) {
            std::int64_t s = store.start_of(e);
            bool any = false;
            for (const auto& iv : delta_intervals(link.time())) {
                // Source start t: target right => s - t in iv; target left => t - s in iv.
                std::int64_t lo = 0, hi = 0;
                if (target_is_right) {
                    lo = iv.hi == std::numeric_limits<std::int64_t>::max() ? std::numeric_limits<std::int64_t>::min()
                                                                           : saturating_add(s, -iv.hi);
                    hi = iv.lo == std::numeric_limits<std::int64_t>::min() ? std::numeric_limits<std::int64_t>::max()
                                                                           : saturating_add(s, -iv.lo);
                } else {
                    lo = saturating_add(s, iv.lo);
                    hi = saturating_add(s, iv.hi);
                }
                auto it = std::lower_bound(starts.begin(), starts.end(), lo);
                if (it != starts.end() && *it <= hi) {
                    any = true;
                    break;
                }
            }
            if (any) kept.push_back(e);
        }
    } else {
        for (EventIndex e : found.ids()) {
            for (std::size_t r = 0; r < source.size(); ++r) {
                EventIndex o = source.at(r, col);
                bool ok = target_is_right ? eval_relationship(link, store, o, e) : eval_relationship(link, store, e, o);
                if (ok) {
                    kept.push_back(e);
                    break;
                }
            }
        }
    }
    return EventIdSet(&store, std::move(kept));
}

namespace {

std::vector<EventIdSet> execute_all(const Store& store, const std::vector<DataQuery>& queries,
                                    const std::vector<int>& patterns, const EngineOptions& options) {
    std::vector<EventIdSet> out(patterns.size());
    if (options.workers <= 1 || patterns.size() <= 1) {
        for (std::size_t k = 0; k < patterns.size(); ++k)
            out[k] = store.execute(queries[static_cast<std::size_t>(patterns[k])], options.execute);
        return out;
    }
    std::vector<std::future<EventIdSet>> futures;
    for (int p : patterns)
        futures.push_back(std::async(std::launch::async, [&, p] {
            return store.execute(queries[static_cast<std::size_t>(p)], options.execute);
        }));
    for (std::size_t k = 0; k < futures.size(); ++k) out[k] = futures[k].get();
    return out;
}

}  // namespace

TupleSet schedule(const Store& store, const QueryContext& input, const EngineOptions& options) {
    QueryContext ctx = compile_if_dependency(input);
    if (ctx.patterns.empty()) return TupleSet{};
    std::vector<DataQuery> queries;
    for (const auto& p : ctx.patterns) queries.push_back(synthesize_data_query(p, ctx.globals));
    Plan plan = plan_schedule(ctx);

    // M: pattern -> tuple set slot; slots are replaced, never shared stale.
    std::vector<std::optional<TupleSet>> sets;
    std::vector<int> slot(ctx.patterns.size(), -1);
    auto q = [&](int p) -> const DataQuery& { return queries[static_cast<std::size_t>(p)]; };
    auto slot_of = [&](int p) -> int& { return slot[static_cast<std::size_t>(p)]; };

    for (const auto& step : plan.steps) {
        const Relationship& rel = ctx.relationships[step.relationship];
        switch (step.kind) {
            case StepCase::create: {
                if (step.first == step.second) {
                    TupleSet only = TupleSet::single(step.first, store.execute(q(step.first), options.execute));
                    sets.emplace_back(detail::filter(store, only, rel));
                    slot_of(step.first) = static_cast<int>(sets.size() - 1);
                    break;
                }
                TupleSet first = TupleSet::single(step.first, store.execute(q(step.first), options.execute));
                EventIdSet s2 = constrained_execute(store, q(step.second), first, rel, step.second, options.execute);
                TupleSet joined = detail::join(store, first, TupleSet::single(step.second, s2), rel, options.row_budget);
                sets.emplace_back(std::move(joined));
                slot_of(step.first) = slot_of(step.second) = static_cast<int>(sets.size() - 1);
                break;
            }
            case StepCase::update: {
                auto& current = *sets[static_cast<std::size_t>(slot_of(step.first))];
                EventIdSet s2 = constrained_execute(store, q(step.second), current, rel, step.second, options.execute);
                current = detail::join(store, current, TupleSet::single(step.second, s2), rel, options.row_budget);
                slot_of(step.second) = slot_of(step.first);
                break;
            }
            case StepCase::filter: {
                auto& current = *sets[static_cast<std::size_t>(slot_of(step.first))];
                current = detail::filter(store, current, rel);
                break;
            }
            case StepCase::merge: {
                int a = slot_of(step.first);
                int b = slot_of(step.second);
                TupleSet merged = detail::join(store, *sets[static_cast<std::size_t>(a)],
                                               *sets[static_cast<std::size_t>(b)], rel, options.row_budget);
                sets[static_cast<std::size_t>(a)] = std::move(merged);
                sets[static_cast<std::size_t>(b)].reset();
                for (auto& s : slot)
                    if (s == b) s = a;
                break;
            }
        }
    }

    // Step 4: patterns no relationship touched.
    auto leftover = execute_all(store, queries, plan.leftovers, options);
    for (std::size_t k = 0; k < plan.leftovers.size(); ++k) {
        sets.emplace_back(TupleSet::single(plan.leftovers[k], leftover[k]));
        slot_of(plan.leftovers[k]) = static_cast<int>(sets.size() - 1);
    }

    // Step 5: cross-merge the remaining tuple sets.
    std::optional<TupleSet> result;
    for (auto& s : sets) {
        if (!s) continue;
        result = result ? detail::cross(*result, *s, options.row_budget) : std::move(*s);
    }
    return result->canonical();
}

std::string explain(const QueryContext& input, const EngineOptions& options) {
    QueryContext ctx = compile_if_dependency(input);
    std::string out;
    out += "flavor: " + std::string(to_string(input.flavor)) + "\n";
    out += "scheduler: " +
           std::string(options.scheduler == SchedulerKind::relationship ? "relationship" : "fetch-filter") + "\n";
    if (ctx.globals.window)
        out += "window: [" + format_iso8601(ctx.globals.window->begin) + ", " + format_iso8601(ctx.globals.window->end) +
               ")\n";
    if (ctx.globals.sliding)
        out += "sliding: length " + format_duration(ctx.globals.sliding->length_ms) + ", step " +
               format_duration(ctx.globals.sliding->step_ms) + "\n";
    Plan plan = plan_schedule(ctx);
    out += "patterns:\n";
    for (std::size_t i = 0; i < ctx.patterns.size(); ++i) {
        const auto& p = ctx.patterns[i];
        out += "  [" + std::to_string(i) + "] " + p.event_name + " score=" + std::to_string(plan.scores[i]) + " " +
               describe(synthesize_data_query(p, ctx.globals)) + "\n";
    }
    if (ctx.flavor == Flavor::anomaly) return out;
    if (options.scheduler == SchedulerKind::fetch_filter) {
        out += "fetch-and-filter: execute all patterns, cross product, then filter by:\n";
        for (const auto& r : ctx.relationships)
            out += "  " + format_relationship(r) + (r.implicit() ? " (implicit)" : "") + "\n";
        return out;
    }
    out += "relationships:\n";
    for (std::size_t k = 0; k < plan.order.size(); ++k) {
        const auto& r = ctx.relationships[plan.order[k]];
        int sum = plan.scores[static_cast<std::size_t>(r.left_pattern())] +
                  plan.scores[static_cast<std::size_t>(r.right_pattern())];
        out += "  " + std::to_string(k + 1) + ". " + format_relationship(r) + (r.implicit() ? " (implicit)" : "") +
               " rank=" + std::to_string(relationship_type_rank(r, ctx.patterns)) + " score=" + std::to_string(sum) +
               "\n";
    }
    out += "steps:\n";
    for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const auto& s = plan.steps[k];
        const auto& name = [&](int p) { return ctx.patterns[static_cast<std::size_t>(p)].event_name; };
        out += "  " + std::to_string(k + 1) + ". " + std::string(to_string(s.kind)) + " " + name(s.first) + ", " +
               name(s.second) + "\n";
    }
    if (!plan.leftovers.empty()) {
        out += "unconstrained:";
        for (int p : plan.leftovers) out += " " + ctx.patterns[static_cast<std::size_t>(p)].event_name;
        out += "\n";
    }
    return out;
}

}  // namespace aiql
