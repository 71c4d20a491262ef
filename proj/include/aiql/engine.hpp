#pragma once

// Multievent execution: data-query synthesis, relationship-based scheduling
// (and the fetch-and-filter baseline), time-window partitioning across
// workers, and result assembly.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aiql/query.hpp"
#include "aiql/store.hpp"

namespace aiql {

/// Event-index tuples; column c holds events of pattern schema[c].
class TupleSet {
public:
    TupleSet() = default;
    explicit TupleSet(std::vector<int> schema) : schema_(std::move(schema)) {}
    /// One-column set from a pattern's matches.
    static TupleSet single(int pattern, const EventIdSet& events);

    const std::vector<int>& schema() const { return schema_; }
    std::size_t arity() const { return schema_.size(); }
    std::size_t size() const { return arity() == 0 ? 0 : cells_.size() / arity(); }
    bool empty() const { return size() == 0; }

    std::span<const EventIndex> row(std::size_t i) const { return {cells_.data() + i * arity(), arity()}; }
    EventIndex at(std::size_t row, std::size_t column) const { return cells_[row * arity() + column]; }
    void append(std::span<const EventIndex> row) { cells_.insert(cells_.end(), row.begin(), row.end()); }
    void reserve_rows(std::size_t n) { cells_.reserve(n * arity()); }

    /// Column holding `pattern`, or -1.
    int column_of(int pattern) const;
    bool contains(int pattern) const { return column_of(pattern) >= 0; }

    /// Columns reordered to ascending pattern id, rows sorted and
    /// deduplicated. Row order is then (start_time, id) lexicographic.
    TupleSet canonical() const;
    /// Canonical rows as vectors (test convenience).
    std::vector<std::vector<EventIndex>> rows() const;

    friend bool operator==(const TupleSet&, const TupleSet&) = default;

private:
    std::vector<int> schema_;
    std::vector<EventIndex> cells_;
};

// ---- data queries -----------------------------------------------------------

/// One DataQuery per pattern; the global agent filter becomes the agent set
/// and the global window is intersected with the pattern's local window.
DataQuery synthesize_data_query(const EventPattern& pattern, const GlobalConstraints& globals);

/// Atomic comparisons in the pattern's constraints, plus one for a local window.
int pruning_score(const EventPattern& pattern);

/// 2 when either endpoint is a process or network event, else 1.
int relationship_type_rank(const Relationship& rel, const std::vector<EventPattern>& patterns);

/// Relationship indices ordered by descending (type rank, score sum), ties
/// in query order.
std::vector<std::size_t> sort_relationships(const std::vector<Relationship>& rels,
                                            const std::vector<EventPattern>& patterns, const std::vector<int>& scores);

// ---- relationships ------------------------------------------------------------

/// Inclusive interval of Δ = right.start - left.start.
struct DeltaInterval {
    std::int64_t lo;
    std::int64_t hi;
};

/// Admissible Δ intervals (two for a ranged `within`, merged when they touch).
std::vector<DeltaInterval> delta_intervals(const TemporalRelationship& rel);

bool eval_temporal(const TemporalRelationship& rel, std::int64_t left_start, std::int64_t right_start);
bool eval_temporal(const TemporalRelationship& rel, const Event& left, const Event& right);

/// `left` is an event of rel.left_pattern and `right` of rel.right_pattern.
bool eval_relationship(const Relationship& rel, const Store& store, EventIndex left, EventIndex right);

// ---- scheduling ---------------------------------------------------------------

enum class SchedulerKind : std::uint8_t { relationship, fetch_filter };

struct EngineOptions {
    SchedulerKind scheduler = SchedulerKind::relationship;
    std::size_t workers = 1;
    std::uint64_t row_budget = 10'000'000;
    ExecuteOptions execute;
};

enum class StepCase : std::uint8_t { create, update, filter, merge };
std::string_view to_string(StepCase c);

struct PlanStep {
    std::size_t relationship = 0;
    StepCase kind = StepCase::create;
    int first = -1;   // pattern executed first (create) or the executed side
    int second = -1;  // the other pattern
};

/// The static schedule Algorithm 1 follows for a context.
struct Plan {
    std::vector<int> scores;
    std::vector<std::size_t> order;
    std::vector<PlanStep> steps;
    std::vector<int> leftovers;  // patterns without relationships (step 4)
};

Plan plan_schedule(const QueryContext& ctx);

/// Stable textual plan: data queries with scores, relationship order and
/// per-step case.
std::string explain(const QueryContext& ctx, const EngineOptions& options = {});

/// Relationship-based scheduling over the whole context.
TupleSet schedule(const Store& store, const QueryContext& ctx, const EngineOptions& options = {});

/// Executes every pattern unconstrained and filters the cross product,
/// applying each relationship once both of its patterns are in it. Throws
/// ResourceError when an intermediate product exceeds options.row_budget.
TupleSet fetch_and_filter(const Store& store, const QueryContext& ctx, const EngineOptions& options = {});

/// Executes `q` (the query of `target`) pushing down what `link` implies
/// about `source`: an id-set binding for entity id equality, start-time
/// bounds for temporal links. The result is then restricted exactly to
/// events with a partner in `source`.
EventIdSet constrained_execute(const Store& store, DataQuery q, const TupleSet& source, const Relationship& link,
                               int target, const ExecuteOptions& options = {});

/// Per-UTC-day sub-contexts of the global window (the context itself when
/// the window spans one day or is absent).
std::vector<QueryContext> partition_time_window(const QueryContext& ctx);

/// Upper bound on |start difference| between any two events of one result
/// tuple, when every pattern is connected through ranged temporal
/// relationships.
std::optional<std::int64_t> temporal_span_bound(const QueryContext& ctx);

/// Schedules `ctx` with the configured scheduler, splitting the global
/// window across options.workers when possible. The result is canonical and
/// independent of the worker count.
TupleSet execute_tuples(const Store& store, const QueryContext& ctx, const EngineOptions& options = {});

// ---- results --------------------------------------------------------------------

using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

std::string value_to_string(const Value& v);

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

/// Projection, aggregation under group by, having, distinct, count, then
/// sort by and top.
ResultTable assemble_results(const Store& store, const TupleSet& tuples, const QueryContext& ctx);

/// Full pipeline for any flavor: dependency queries are compiled, anomaly
/// queries go to the sliding-window evaluator.
ResultTable run_query(const Store& store, const QueryContext& ctx, const EngineOptions& options = {});

}  // namespace aiql
