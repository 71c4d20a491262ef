#pragma once

// QueryContext: the parsed, shortcut-expanded form of one AIQL query.
//
// Source spans are carried for diagnostics only; SourceSpan compares equal
// to every other span so operator== on these types is structural.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aiql/constraint.hpp"
#include "aiql/errors.hpp"
#include "aiql/model.hpp"
#include "aiql/time_util.hpp"

namespace aiql {

struct Span {
    SourceSpan at;
    friend bool operator==(const Span&, const Span&) { return true; }
};

/// Which slot of a pattern a name refers to.
enum class Role : std::uint8_t { subject, object, event };

std::string_view to_string(Role role);

struct EntityRef {
    EntityKind kind = EntityKind::process;
    std::string name;        // empty until expansion assigns one
    bool generated = false;  // name invented by expansion (not printed)
    Constraint constraints;
    Span span;

    friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

struct EventPattern {
    EntityRef subject;
    OpExpr ops;
    EntityRef object;
    std::string event_name;
    bool generated_event_name = false;
    Constraint event_constraints;
    std::optional<TimeWindow> window;
    Span span;

    /// File, process or network event: the object's kind.
    EntityKind category() const { return object.kind; }

    friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

/// name.attribute, resolved to the first pattern slot that declares `name`.
struct AttrOperand {
    std::string name;
    std::string attribute;  // empty for the `p1 = p3` shorthand until expansion
    int pattern = -1;
    Role role = Role::subject;

    friend bool operator==(const AttrOperand&, const AttrOperand&) = default;
};

struct AttrRelationship {
    AttrOperand left;
    Comparator op = Comparator::eq;
    AttrOperand right;
    /// Injected by expansion for a reused entity id.
    bool implicit = false;

    friend bool operator==(const AttrRelationship&, const AttrRelationship&) = default;
};

enum class TemporalOrder : std::uint8_t { before, after, within };

std::string_view to_string(TemporalOrder order);

/// Inclusive [lo, hi] in milliseconds.
struct TemporalRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    friend bool operator==(const TemporalRange&, const TemporalRange&) = default;
};

struct TemporalRelationship {
    std::string left;
    TemporalOrder order = TemporalOrder::before;
    std::optional<TemporalRange> range;
    std::string right;
    int left_pattern = -1;
    int right_pattern = -1;

    friend bool operator==(const TemporalRelationship&, const TemporalRelationship&) = default;
};

struct Relationship {
    std::variant<AttrRelationship, TemporalRelationship> body;
    Span span;

    bool temporal() const { return std::holds_alternative<TemporalRelationship>(body); }
    const AttrRelationship& attr() const { return std::get<AttrRelationship>(body); }
    const TemporalRelationship& time() const { return std::get<TemporalRelationship>(body); }
    bool implicit() const { return !temporal() && attr().implicit; }
    int left_pattern() const;
    int right_pattern() const;

    friend bool operator==(const Relationship&, const Relationship&) = default;
};

/// Surface form, e.g. "p1.id = p3.id" or "evt1 before[1-2 min] evt2".
std::string format_relationship(const Relationship& r);

struct SlidingWindow {
    std::int64_t length_ms = 0;
    std::int64_t step_ms = 0;
    friend bool operator==(const SlidingWindow&, const SlidingWindow&) = default;
};

struct GlobalConstraints {
    /// Event-attribute constraints applied to every pattern (e.g. agentid = 1).
    Constraint event_filter;
    std::optional<TimeWindow> window;
    std::optional<SlidingWindow> sliding;

    friend bool operator==(const GlobalConstraints&, const GlobalConstraints&) = default;
};

enum class Aggregate : std::uint8_t { none, count, avg, sum, max, min };

std::string_view to_string(Aggregate agg);

struct ReturnItem {
    std::string name;
    std::string attribute;  // empty until expansion infers the default
    Aggregate agg = Aggregate::none;
    bool distinct = false;  // count(distinct x)
    std::string alias;
    int pattern = -1;
    Role role = Role::subject;
    Span span;

    std::string reference() const;  // "name.attribute"
    std::string column_name() const;

    friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

/// Arithmetic/boolean expression used by `having`.
struct ValueExpr {
    enum class Kind : std::uint8_t { number, string, ref, history, call, negate, logical_not, binary };
    enum class BinOp : std::uint8_t { add, sub, mul, div, lt, le, gt, ge, eq, ne, land, lor };

    Kind kind = Kind::number;
    double number = 0.0;
    std::string text;  // string literal, column reference or function name
    std::int64_t lag = 0;
    BinOp op = BinOp::add;
    std::vector<ValueExpr> args;
    Span span;

    friend bool operator==(const ValueExpr&, const ValueExpr&) = default;
};

std::string format_value_expr(const ValueExpr& e);

struct SortKey {
    std::string name;
    std::string attribute;
    int column = -1;
    Span span;
    friend bool operator==(const SortKey&, const SortKey&) = default;
};

struct ReturnSpec {
    bool count = false;
    bool distinct = false;
    std::vector<ReturnItem> items;
    std::vector<ReturnItem> group_by;
    std::optional<ValueExpr> having;
    std::vector<SortKey> sort_by;
    bool descending = false;
    std::optional<std::int64_t> top;

    friend bool operator==(const ReturnSpec&, const ReturnSpec&) = default;
};

enum class Flavor : std::uint8_t { multievent, dependency, anomaly };
enum class ChainKeyword : std::uint8_t { none, forward, backward };

std::string_view to_string(Flavor flavor);

struct ChainEdge {
    bool rightward = true;  // `->` (left node is the subject) vs `<-`
    OpExpr ops;
    Span span;
    friend bool operator==(const ChainEdge&, const ChainEdge&) = default;
};

struct DependencyChain {
    std::vector<EntityRef> nodes;
    std::vector<ChainEdge> edges;
    ChainKeyword keyword = ChainKeyword::none;
    friend bool operator==(const DependencyChain&, const DependencyChain&) = default;
};

struct QueryContext {
    Flavor flavor = Flavor::multievent;
    GlobalConstraints globals;
    std::vector<EventPattern> patterns;
    std::vector<Relationship> relationships;
    ReturnSpec returns;
    std::optional<DependencyChain> chain;

    friend bool operator==(const QueryContext&, const QueryContext&) = default;
};

struct NameBinding {
    int pattern = -1;
    Role role = Role::subject;
    EntityKind kind = EntityKind::process;  // meaningful for subject/object
};

/// First pattern slot declaring `name`, scanning patterns in order and
/// subject, object, event within a pattern.
std::optional<NameBinding> resolve_name(const QueryContext& ctx, std::string_view name);

/// Canonical AIQL text; parse(to_aiql(ctx)) reproduces ctx.
std::string to_aiql(const QueryContext& ctx);

}  // namespace aiql
