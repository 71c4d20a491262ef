#pragma once

// Join, filter and product kernels over TupleSets (engine internals).

#include "aiql/engine.hpp"

namespace aiql::detail {

/// Entity `id` equality between subject/object operands.
bool is_entity_id_link(const Relationship& rel);

/// Rows of a x b satisfying `rel`; rel links a pattern of `a` with one of `b`.
TupleSet join(const Store& store, const TupleSet& a, const TupleSet& b, const Relationship& rel,
              std::uint64_t row_budget);

/// Rows of `t` satisfying `rel`; both endpoints are columns of `t`.
TupleSet filter(const Store& store, const TupleSet& t, const Relationship& rel);

/// Unconstrained product.
TupleSet cross(const TupleSet& a, const TupleSet& b, std::uint64_t row_budget);

/// Entity of the operand role for an event (subject or object).
EntityIndex operand_entity(const Store& store, Role role, EventIndex ev);

}  // namespace aiql::detail
