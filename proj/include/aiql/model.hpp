#pragma once

// Entities, events and attribute schemas shared by every other module.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aiql {

/// Host identifier. Negative values occur in real deployments (hashed host ids).
struct AgentId {
    std::int64_t value = 0;
    friend auto operator<=>(const AgentId&, const AgentId&) = default;
};

/// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
    std::int64_t ms = 0;
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

enum class EntityKind : std::uint8_t { file, process, network };
inline constexpr std::size_t kEntityKindCount = 3;

enum class OpType : std::uint8_t { read, write, execute, start, end, rename, remove, connect };
inline constexpr std::size_t kOpTypeCount = 8;

std::string_view to_string(EntityKind kind);
std::string_view to_string(OpType op);
/// Accepts "file", "process", "network".
std::optional<EntityKind> entity_kind_from_string(std::string_view text);
/// Accepts the lowercase operation names; "delete" maps to OpType::remove.
std::optional<OpType> op_from_string(std::string_view text);

using Scalar = std::variant<std::int64_t, std::string>;

std::string scalar_to_string(const Scalar& value);
std::optional<std::int64_t> scalar_as_int(const Scalar& value);

struct Entity {
    std::string id;
    EntityKind kind = EntityKind::file;
    AgentId agent;
    std::map<std::string, Scalar, std::less<>> attrs;
};

struct Event {
    std::string id;
    AgentId agent;
    std::string subject;
    OpType op = OpType::read;
    std::string object;
    Timestamp start_time;
    Timestamp end_time;
    std::optional<std::int64_t> amount;
    std::optional<std::int64_t> failure_code;
};

/// An event is a file, process or network event according to its object.
inline EntityKind event_category(const Entity& object) { return object.kind; }

/// Attribute filled in when a query gives only a value.
std::string_view default_attribute(EntityKind kind);

/// Schema attributes stored in Entity::attrs for a kind.
std::span<const std::string_view> schema_attributes(EntityKind kind);

/// Maps a query-level attribute name to its canonical form for the kind.
/// Besides the schema, every entity exposes `id` and `agentid`; the
/// network spellings `dstip`, `srcip`, `dstport`, `srcport` are aliases.
std::optional<std::string> canonical_entity_attribute(EntityKind kind, std::string_view name);

/// Event attributes: id, agentid, optype, start_time, end_time, amount, failure_code.
std::optional<std::string> canonical_event_attribute(std::string_view name);

/// Numeric-only attributes (aggregations such as sum/avg require one of these).
bool is_numeric_entity_attribute(std::string_view canonical);
bool is_numeric_event_attribute(std::string_view canonical);

std::optional<Scalar> entity_attribute(const Entity& entity, std::string_view canonical);
std::optional<Scalar> event_attribute(const Event& event, std::string_view canonical);

/// Whether an operation may target an object of the given kind. `connect`
/// targets network connections or (for cross-host tracking) a peer process.
bool op_allowed(OpType op, EntityKind object_kind);

struct Violation {
    std::string field;
    std::string message;
    friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_entity(const Entity& entity);

/// Checks event-local invariants plus those that need the resolved entities.
/// A null subject/object means the id did not resolve.
std::vector<Violation> validate_event(const Event& event, const Entity* subject, const Entity* object);

/// '%' matches any run of characters (possibly empty); otherwise the
/// comparison is exact. Both forms ignore ASCII case.
bool match_value(std::string_view pattern, std::string_view value);

/// ASCII lowercase copy.
std::string fold_case(std::string_view text);

}  // namespace aiql
