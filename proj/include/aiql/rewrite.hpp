#pragma once

// Compilation of dependency (forward/backward tracking) queries into
// multievent queries.

#include "aiql/query.hpp"

namespace aiql {

/// One pattern per edge: `A ->[op] B` makes A the subject, `A <-[op] B`
/// makes B the subject. Nodes shared by consecutive edges are joined on id;
/// `forward` orders consecutive events with `before`, `backward` with
/// `after`. Throws SemanticError when an edge's operation does not fit its
/// node kinds.
QueryContext compile_dependency(const DependencyChain& chain, const GlobalConstraints& globals,
                                const ReturnSpec& returns);

/// compile_dependency for a parsed dependency context; other flavors are
/// returned unchanged.
QueryContext compile_if_dependency(const QueryContext& ctx);

}  // namespace aiql
