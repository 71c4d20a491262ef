#pragma once

// Immutable event store partitioned by (agent group, UTC day) with
// per-partition attribute indexes, and the single-pattern DataQuery.

#include <atomic>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aiql/constraint.hpp"
#include "aiql/model.hpp"
#include "aiql/time_util.hpp"

namespace aiql {

using EventIndex = std::uint32_t;
using EntityIndex = std::uint32_t;

struct PartitionKey {
    std::int64_t agent_group = 0;
    std::int64_t day = 0;  // days since epoch (UTC)
    friend auto operator<=>(const PartitionKey&, const PartitionKey&) = default;
};

/// agent_group = floor(agent / group_size); day = UTC day of start_time.
PartitionKey partition_key(const Event& event, std::int64_t group_size);
PartitionKey partition_key(AgentId agent, Timestamp start, std::int64_t group_size);
std::string to_string(const PartitionKey& key);

/// Backend-neutral search request for one event pattern.
struct DataQuery {
    EntityKind subject_kind = EntityKind::process;
    EntityKind object_kind = EntityKind::file;
    OpExpr ops = OpExpr::any_of({});
    std::uint8_t op_mask = 0xFF;
    Constraint subject_constraints;
    Constraint object_constraints;
    Constraint event_constraints;
    std::optional<std::vector<AgentId>> agents;  // sorted, unique
    std::optional<TimeWindow> time_range;
    std::optional<std::vector<EntityIndex>> subject_binding;  // sorted, unique
    std::optional<std::vector<EntityIndex>> object_binding;   // sorted, unique
    std::optional<TimeWindow> time_bounds;
    bool statically_empty = false;

    /// Effective start-time window: time_range ∩ time_bounds.
    std::optional<TimeWindow> effective_window() const { return intersect(time_range, time_bounds); }
};

std::string describe(const DataQuery& q);

class Store;

/// Event ids (store indexes) in ascending (start_time, id) order.
class EventIdSet {
public:
    EventIdSet() = default;
    EventIdSet(const Store* store, std::vector<EventIndex> ids) : store_(store), ids_(std::move(ids)) {}

    const std::vector<EventIndex>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const Event& event(std::size_t i) const;
    std::vector<std::string> event_ids() const;

private:
    const Store* store_ = nullptr;
    std::vector<EventIndex> ids_;
};

struct Rejection {
    std::string source;  // "entities" or "events"
    std::size_t line = 0;
    std::string reason;
};

struct IngestStats {
    std::size_t entities = 0;
    std::size_t events = 0;
    std::size_t rejected = 0;
    std::vector<Rejection> rejections;
};

/// Attributes with hash indexes in every partition.
enum class IndexedAttribute : std::uint8_t { subject_exe_name, object_name, object_dst_ip, op };

struct ExecuteOptions {
    bool prune_partitions = true;
    bool use_indexes = true;
};

class Store {
public:
    explicit Store(std::int64_t group_size = 1);
    ~Store();
    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    std::int64_t group_size() const { return group_size_; }

    // Ingestion (single writer, before seal). Each returns the rejection
    // reason, or nullopt when the record was accepted.
    std::optional<std::string> add_entity(Entity entity);
    std::optional<std::string> add_event(Event event);
    std::optional<std::string> add_entity_json(std::string_view line);
    std::optional<std::string> add_event_json(std::string_view line);

    /// Reads both line files, then seals. IO failure throws StoreError.
    IngestStats ingest(const std::filesystem::path& entities_path, const std::filesystem::path& events_path);
    IngestStats ingest(std::istream& entities, std::istream& events);

    void seal();
    bool sealed() const { return sealed_; }

    EventIdSet execute(const DataQuery& q, const ExecuteOptions& options = {}) const;

    /// Rows materialized by execute() since the last reset.
    std::uint64_t fetch_counter() const { return fetched_.load(std::memory_order_relaxed); }
    void reset_fetch_counter() { fetched_.store(0, std::memory_order_relaxed); }

    /// Index lookup across all partitions ('%'-free values only).
    std::vector<EventIndex> index_lookup(IndexedAttribute attribute, std::string_view value) const;

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t event_count() const { return events_.size(); }
    const Entity& entity(EntityIndex i) const { return entities_[i]; }
    const Event& event(EventIndex i) const { return events_[i]; }
    EntityIndex subject_of(EventIndex i) const { return subject_[i]; }
    EntityIndex object_of(EventIndex i) const { return object_[i]; }
    std::int64_t start_of(EventIndex i) const { return start_[i]; }
    std::optional<EntityIndex> find_entity(std::string_view id) const;
    std::optional<EventIndex> find_event(std::string_view id) const;

    std::vector<PartitionKey> partition_keys() const;
    std::size_t partition_size(const PartitionKey& key) const;
    /// Keys of partitions execute() would visit for `q`.
    std::vector<PartitionKey> partitions_for(const DataQuery& q, const ExecuteOptions& options = {}) const;

    /// Full predicate of `q` against one event (no pruning, no counting).
    bool matches(const DataQuery& q, EventIndex i) const;

    /// Writes the snapshot format (versioned header + entity/event lines).
    void save_snapshot(const std::filesystem::path& path) const;
    static Store load_snapshot(const std::filesystem::path& path, IngestStats* stats = nullptr);

    /// Sealed ordering puts events in (start_time, id) order; ingestion order
    /// is kept for snapshots.
    const std::vector<Event>& events() const { return events_; }
    const std::vector<Entity>& entities() const { return entities_; }

private:
    struct Partition;

    void require_sealed() const;
    void scan_partition(const Partition& part, const DataQuery& q, const ExecuteOptions& options,
                        std::vector<EventIndex>& out) const;

    std::int64_t group_size_;
    bool sealed_ = false;

    std::vector<Entity> entities_;
    std::unordered_map<std::string, EntityIndex> entity_by_id_;

    std::vector<Event> events_;
    std::unordered_map<std::string, EventIndex> event_by_id_;
    std::vector<EntityIndex> subject_;
    std::vector<EntityIndex> object_;
    std::vector<std::int64_t> start_;

    std::map<PartitionKey, std::unique_ptr<Partition>> partitions_;
    mutable std::atomic<std::uint64_t> fetched_{0};
};

/// JSON line encodings (field order as in the file formats).
std::string entity_to_json_line(const Entity& entity);
std::string event_to_json_line(const Event& event);

}  // namespace aiql
