// Time-window partitioning across workers.

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <thread>

#include "aiql/engine.hpp"
#include "aiql/rewrite.hpp"

namespace aiql {

std::vector<QueryContext> partition_time_window(const QueryContext& ctx) {
    if (!ctx.globals.window || ctx.globals.window->empty()) return {ctx};
    const TimeWindow w = *ctx.globals.window;
    const std::int64_t first = utc_day(w.begin);
    const std::int64_t last = utc_day(w.end - 1);
    if (first == last) return {ctx};
    std::vector<QueryContext> out;
    for (std::int64_t d = first; d <= last; ++d) {
        QueryContext sub = ctx;
        sub.globals.window = TimeWindow{std::max(w.begin, day_start_ms(d)), std::min(w.end, day_start_ms(d + 1))};
        out.push_back(std::move(sub));
    }
    return out;
}

std::optional<std::int64_t> temporal_span_bound(const QueryContext& input) {
    QueryContext ctx = compile_if_dependency(input);
    const std::size_t n = ctx.patterns.size();
    if (n == 0) return std::nullopt;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    // Any path between two patterns uses each edge at most once, so the sum
    // of all ranged edge bounds dominates every pairwise distance.
    std::int64_t total = 0;
    for (const auto& rel : ctx.relationships) {
        if (!rel.temporal() || !rel.time().range) continue;
        total = saturating_add(total, rel.time().range->hi);
        parent[find(static_cast<std::size_t>(rel.left_pattern()))] = find(static_cast<std::size_t>(rel.right_pattern()));
    }
    for (std::size_t i = 1; i < n; ++i)
        if (find(i) != find(0)) return std::nullopt;
    return total;
}

namespace {

TupleSet run_scheduler(const Store& store, const QueryContext& ctx, const EngineOptions& options) {
    return options.scheduler == SchedulerKind::relationship ? schedule(store, ctx, options)
                                                            : fetch_and_filter(store, ctx, options);
}

/// Runs every context on up to `workers` threads; results keep input order.
std::vector<TupleSet> run_all(const Store& store, const std::vector<QueryContext>& contexts,
                              const EngineOptions& options) {
    std::vector<TupleSet> results(contexts.size());
    EngineOptions inner = options;
    inner.workers = 1;
    const std::size_t threads = std::min(options.workers, contexts.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < contexts.size(); ++i) results[i] = run_scheduler(store, contexts[i], inner);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(contexts.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < contexts.size(); i = next++) {
                try {
                    results[i] = run_scheduler(store, contexts[i], inner);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace

TupleSet execute_tuples(const Store& store, const QueryContext& input, const EngineOptions& options) {
    QueryContext ctx = compile_if_dependency(input);
    std::vector<QueryContext> days = partition_time_window(ctx);
    if (days.size() <= 1) return run_scheduler(store, ctx, options);

    auto bound = temporal_span_bound(ctx);
    if (!bound || *bound >= kMillisPerDay) return run_scheduler(store, ctx, options);

    // Per-day contexts plus one margin context per day boundary catching
    // tuples whose events straddle it.
    const TimeWindow w = *ctx.globals.window;
    std::vector<QueryContext> parts = days;
    for (std::size_t i = 1; i < days.size(); ++i) {
        const std::int64_t boundary = days[i].globals.window->begin;
        QueryContext margin = ctx;
        margin.globals.window = TimeWindow{std::max(w.begin, boundary - *bound),
                                           std::min(w.end, saturating_add(boundary, *bound + 1))};
        parts.push_back(std::move(margin));
    }
    std::vector<TupleSet> results = run_all(store, parts, options);

    TupleSet merged(results.front().canonical().schema());
    for (const auto& r : results) {
        TupleSet c = r.canonical();
        for (std::size_t i = 0; i < c.size(); ++i) merged.append(c.row(i));
    }
    return merged.canonical();
}

}  // namespace aiql
