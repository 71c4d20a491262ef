// Fetch-and-filter baseline: independent execution, product, filter.

#include "aiql/rewrite.hpp"
#include "tuple_ops.hpp"

namespace aiql {

TupleSet fetch_and_filter(const Store& store, const QueryContext& input, const EngineOptions& options) {
    QueryContext ctx = compile_if_dependency(input);
    if (ctx.patterns.empty()) return TupleSet{};

    std::vector<TupleSet> fetched;
    for (std::size_t i = 0; i < ctx.patterns.size(); ++i) {
        DataQuery q = synthesize_data_query(ctx.patterns[i], ctx.globals);
        fetched.push_back(TupleSet::single(static_cast<int>(i), store.execute(q, options.execute)));
    }
    // Each relationship filters the product as soon as both of its patterns
    // are in it.
    std::vector<bool> applied(ctx.relationships.size(), false);
    TupleSet product = std::move(fetched[0]);
    for (std::size_t i = 0;; ++i) {
        for (std::size_t r = 0; r < ctx.relationships.size(); ++r) {
            const auto& rel = ctx.relationships[r];
            if (applied[r] || !product.contains(rel.left_pattern()) || !product.contains(rel.right_pattern())) continue;
            product = detail::filter(store, product, rel);
            applied[r] = true;
        }
        if (i + 1 == fetched.size()) break;
        product = detail::cross(product, fetched[i + 1], options.row_budget);
    }
    return product.canonical();
}

}  // namespace aiql
