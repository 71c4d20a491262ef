#include "aiql/store.hpp"

#include <algorithm>
#include <numeric>

#include "aiql/errors.hpp"
#include "aiql/simd.hpp"

namespace aiql {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Combined scan code: operation and object kind packed below 32 so one
// bitmask describes every (op, kind) pair a pattern accepts.
std::uint8_t scan_code(OpType op, EntityKind object_kind) {
    return static_cast<std::uint8_t>(static_cast<unsigned>(op) * kEntityKindCount + static_cast<unsigned>(object_kind));
}

std::uint32_t allowed_codes(std::uint8_t op_mask, EntityKind object_kind) {
    std::uint32_t allowed = 0;
    for (std::size_t op = 0; op < kOpTypeCount; ++op) {
        if ((op_mask >> op) & 1u) allowed |= 1u << scan_code(static_cast<OpType>(op), object_kind);
    }
    return allowed;
}

bool is_plain(const Scalar& v) {
    const auto* s = std::get_if<std::string>(&v);
    return s != nullptr && s->find('%') == std::string::npos;
}

// Literal values a required comparison restricts `attribute` to, when it
// can be answered from an equality index.
std::optional<std::vector<std::string>> index_keys(const Constraint& c, std::string_view attribute) {
    for (const Comparison* cmp : c.required_comparisons()) {
        if (cmp->attribute != attribute) continue;
        if (cmp->op != Comparator::eq && cmp->op != Comparator::in) continue;
        if (cmp->values.empty() || !std::all_of(cmp->values.begin(), cmp->values.end(), is_plain)) continue;
        std::vector<std::string> keys;
        for (const auto& v : cmp->values) keys.push_back(fold_case(std::get<std::string>(v)));
        return keys;
    }
    return std::nullopt;
}

}  // namespace

using PositionList = std::vector<std::uint32_t>;

struct Store::Partition {
    PartitionKey key;
    std::vector<EventIndex> events;  // ascending (start_time, id)
    std::vector<std::int64_t> starts;
    std::vector<std::uint8_t> codes;
    std::unordered_map<std::string, PositionList> by_subject_exe;
    std::unordered_map<std::string, PositionList> by_object_name;
    std::unordered_map<std::string, PositionList> by_object_dst_ip;
    std::array<PositionList, kOpTypeCount> by_op;
    std::unordered_map<EntityIndex, PositionList> by_subject;
    std::unordered_map<EntityIndex, PositionList> by_object;
};

PartitionKey partition_key(AgentId agent, Timestamp start, std::int64_t group_size) {
    return PartitionKey{floor_div(agent.value, std::max<std::int64_t>(group_size, 1)), utc_day(start.ms)};
}

PartitionKey partition_key(const Event& event, std::int64_t group_size) {
    return partition_key(event.agent, event.start_time, group_size);
}

std::string to_string(const PartitionKey& key) {
    return "group=" + std::to_string(key.agent_group) + " day=" + format_day(key.day);
}

const Event& EventIdSet::event(std::size_t i) const { return store_->event(ids_[i]); }

std::vector<std::string> EventIdSet::event_ids() const {
    std::vector<std::string> out;
    out.reserve(ids_.size());
    for (auto i : ids_) out.push_back(store_->event(i).id);
    return out;
}

Store::Store(std::int64_t group_size) : group_size_(group_size) {
    if (group_size_ < 1) throw StoreError("group_size must be >= 1");
}

Store::~Store() = default;

Store::Store(Store&& other) noexcept
    : group_size_(other.group_size_),
      sealed_(other.sealed_),
      entities_(std::move(other.entities_)),
      entity_by_id_(std::move(other.entity_by_id_)),
      events_(std::move(other.events_)),
      event_by_id_(std::move(other.event_by_id_)),
      subject_(std::move(other.subject_)),
      object_(std::move(other.object_)),
      start_(std::move(other.start_)),
      partitions_(std::move(other.partitions_)),
      fetched_(other.fetched_.load()) {}

Store& Store::operator=(Store&& other) noexcept {
    group_size_ = other.group_size_;
    sealed_ = other.sealed_;
    entities_ = std::move(other.entities_);
    entity_by_id_ = std::move(other.entity_by_id_);
    events_ = std::move(other.events_);
    event_by_id_ = std::move(other.event_by_id_);
    subject_ = std::move(other.subject_);
    object_ = std::move(other.object_);
    start_ = std::move(other.start_);
    partitions_ = std::move(other.partitions_);
    fetched_.store(other.fetched_.load());
    return *this;
}

std::optional<std::string> Store::add_entity(Entity entity) {
    if (sealed_) throw StoreError("store is sealed");
    if (auto violations = validate_entity(entity); !violations.empty()) return violations.front().message;
    if (entity_by_id_.count(entity.id)) return std::string("duplicate id");
    auto index = static_cast<EntityIndex>(entities_.size());
    entity_by_id_.emplace(entity.id, index);
    entities_.push_back(std::move(entity));
    return std::nullopt;
}

std::optional<std::string> Store::add_event(Event event) {
    if (sealed_) throw StoreError("store is sealed");
    auto subject = find_entity(event.subject);
    auto object = find_entity(event.object);
    auto violations = validate_event(event, subject ? &entities_[*subject] : nullptr,
                                     object ? &entities_[*object] : nullptr);
    if (!violations.empty()) return violations.front().message;
    if (event_by_id_.count(event.id)) return std::string("duplicate id");
    auto index = static_cast<EventIndex>(events_.size());
    event_by_id_.emplace(event.id, index);
    events_.push_back(std::move(event));
    return std::nullopt;
}

void Store::seal() {
    if (sealed_) return;
    std::vector<EventIndex> order(events_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](EventIndex a, EventIndex b) {
        const auto& ea = events_[a];
        const auto& eb = events_[b];
        if (ea.start_time != eb.start_time) return ea.start_time < eb.start_time;
        return ea.id < eb.id;
    });
    std::vector<Event> sorted;
    sorted.reserve(events_.size());
    for (auto i : order) sorted.push_back(std::move(events_[i]));
    events_ = std::move(sorted);

    event_by_id_.clear();
    subject_.resize(events_.size());
    object_.resize(events_.size());
    start_.resize(events_.size());
    for (EventIndex i = 0; i < events_.size(); ++i) {
        const auto& e = events_[i];
        event_by_id_.emplace(e.id, i);
        subject_[i] = entity_by_id_.at(e.subject);
        object_[i] = entity_by_id_.at(e.object);
        start_[i] = e.start_time.ms;
    }

    for (EventIndex i = 0; i < events_.size(); ++i) {
        auto key = partition_key(events_[i], group_size_);
        auto& slot = partitions_[key];
        if (!slot) {
            slot = std::make_unique<Partition>();
            slot->key = key;
        }
        slot->events.push_back(i);
    }
    for (auto& [key, part] : partitions_) {
        auto& p = *part;
        p.starts.reserve(p.events.size());
        p.codes.reserve(p.events.size());
        for (std::uint32_t pos = 0; pos < p.events.size(); ++pos) {
            EventIndex ev = p.events[pos];
            const Entity& subj = entities_[subject_[ev]];
            const Entity& obj = entities_[object_[ev]];
            p.starts.push_back(start_[ev]);
            p.codes.push_back(scan_code(events_[ev].op, obj.kind));
            if (auto v = entity_attribute(subj, "exe_name")) p.by_subject_exe[fold_case(scalar_to_string(*v))].push_back(pos);
            if (auto v = entity_attribute(obj, "name")) p.by_object_name[fold_case(scalar_to_string(*v))].push_back(pos);
            if (auto v = entity_attribute(obj, "dst_ip"))
                p.by_object_dst_ip[fold_case(scalar_to_string(*v))].push_back(pos);
            p.by_op[static_cast<std::size_t>(events_[ev].op)].push_back(pos);
            p.by_subject[subject_[ev]].push_back(pos);
            p.by_object[object_[ev]].push_back(pos);
        }
    }
    sealed_ = true;
}

void Store::require_sealed() const {
    if (!sealed_) throw StoreError("store is not sealed");
}

std::optional<EntityIndex> Store::find_entity(std::string_view id) const {
    auto it = entity_by_id_.find(std::string(id));
    if (it == entity_by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<EventIndex> Store::find_event(std::string_view id) const {
    auto it = event_by_id_.find(std::string(id));
    if (it == event_by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<PartitionKey> Store::partition_keys() const {
    std::vector<PartitionKey> out;
    for (const auto& [key, part] : partitions_) out.push_back(key);
    return out;
}

std::size_t Store::partition_size(const PartitionKey& key) const {
    auto it = partitions_.find(key);
    return it == partitions_.end() ? 0 : it->second->events.size();
}

std::vector<PartitionKey> Store::partitions_for(const DataQuery& q, const ExecuteOptions& options) const {
    std::vector<PartitionKey> out;
    if (q.statically_empty) return out;
    auto window = q.effective_window();
    if (window && window->empty()) return out;
    std::vector<std::int64_t> groups;
    if (q.agents) {
        for (auto a : *q.agents) groups.push_back(floor_div(a.value, group_size_));
        std::sort(groups.begin(), groups.end());
        groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    }
    for (const auto& [key, part] : partitions_) {
        if (options.prune_partitions) {
            if (q.agents && !std::binary_search(groups.begin(), groups.end(), key.agent_group)) continue;
            if (window && (key.day < utc_day(window->begin) || key.day > utc_day(window->end - 1))) continue;
        }
        out.push_back(key);
    }
    return out;
}

bool Store::matches(const DataQuery& q, EventIndex i) const {
    if (q.statically_empty) return false;
    const Event& ev = events_[i];
    const Entity& subj = entities_[subject_[i]];
    const Entity& obj = entities_[object_[i]];
    if (subj.kind != q.subject_kind || obj.kind != q.object_kind) return false;
    if (!((q.op_mask >> static_cast<unsigned>(ev.op)) & 1u)) return false;
    if (q.agents && !std::binary_search(q.agents->begin(), q.agents->end(), ev.agent)) return false;
    if (auto w = q.effective_window(); w && !w->contains(ev.start_time.ms)) return false;
    if (q.subject_binding && !std::binary_search(q.subject_binding->begin(), q.subject_binding->end(), subject_[i]))
        return false;
    if (q.object_binding && !std::binary_search(q.object_binding->begin(), q.object_binding->end(), object_[i]))
        return false;
    if (!q.subject_constraints.evaluate([&](std::string_view a) { return entity_attribute(subj, a); })) return false;
    if (!q.object_constraints.evaluate([&](std::string_view a) { return entity_attribute(obj, a); })) return false;
    if (!q.event_constraints.evaluate([&](std::string_view a) { return event_attribute(ev, a); })) return false;
    return true;
}

void Store::scan_partition(const Partition& part, const DataQuery& q, const ExecuteOptions& options,
                           std::vector<EventIndex>& out) const {
    // Contiguous slice for the time window (partition is sorted by start).
    std::uint32_t lo = 0;
    auto hi = static_cast<std::uint32_t>(part.events.size());
    if (auto w = q.effective_window()) {
        lo = static_cast<std::uint32_t>(std::lower_bound(part.starts.begin(), part.starts.end(), w->begin) -
                                        part.starts.begin());
        hi = static_cast<std::uint32_t>(std::lower_bound(part.starts.begin(), part.starts.end(), w->end) -
                                        part.starts.begin());
    }
    if (lo >= hi) return;

    const std::uint32_t allowed = allowed_codes(q.op_mask, q.object_kind);

    // Pick the smallest candidate source among the slice and the indexes.
    std::size_t best_size = hi - lo;
    std::vector<const PositionList*> best_lists;
    bool use_lists = false;
    auto consider = [&](std::vector<const PositionList*> lists) {
        std::size_t n = 0;
        for (const auto* l : lists) n += l->size();
        if (n < best_size) {
            best_size = n;
            best_lists = std::move(lists);
            use_lists = true;
        }
    };
    static const PositionList kEmpty;
    auto lookup_keys = [&](const std::unordered_map<std::string, PositionList>& index,
                           const std::vector<std::string>& keys) {
        std::vector<const PositionList*> lists;
        for (const auto& k : keys) {
            auto it = index.find(k);
            lists.push_back(it == index.end() ? &kEmpty : &it->second);
        }
        return lists;
    };
    auto lookup_entities = [&](const std::unordered_map<EntityIndex, PositionList>& index,
                               const std::vector<EntityIndex>& ids) {
        std::vector<const PositionList*> lists;
        for (auto id : ids) {
            auto it = index.find(id);
            if (it != index.end()) lists.push_back(&it->second);
        }
        return lists;
    };
    if (options.use_indexes) {
        if (auto keys = index_keys(q.subject_constraints, "exe_name")) consider(lookup_keys(part.by_subject_exe, *keys));
        if (auto keys = index_keys(q.object_constraints, "name")) consider(lookup_keys(part.by_object_name, *keys));
        if (auto keys = index_keys(q.object_constraints, "dst_ip")) consider(lookup_keys(part.by_object_dst_ip, *keys));
        if (q.subject_binding) consider(lookup_entities(part.by_subject, *q.subject_binding));
        if (q.object_binding) consider(lookup_entities(part.by_object, *q.object_binding));
        if (q.op_mask != 0xFF) {
            std::vector<const PositionList*> lists;
            for (std::size_t op = 0; op < kOpTypeCount; ++op)
                if ((q.op_mask >> op) & 1u) lists.push_back(&part.by_op[op]);
            consider(std::move(lists));
        }
    }

    std::vector<std::uint32_t> positions;
    if (use_lists) {
        for (const auto* l : best_lists) {
            for (auto pos : *l)
                if (pos >= lo && pos < hi && ((allowed >> part.codes[pos]) & 1u)) positions.push_back(pos);
        }
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    } else {
        simd::select_codes(std::span(part.codes).subspan(lo, hi - lo), allowed, lo, positions);
    }

    // Rows are materialized only when they pass every index-answerable
    // predicate, so adding a binding or narrowing a key never fetches more.
    if (options.use_indexes) {
        auto exe_keys = index_keys(q.subject_constraints, "exe_name");
        auto name_keys = index_keys(q.object_constraints, "name");
        auto ip_keys = index_keys(q.object_constraints, "dst_ip");
        auto key_ok = [](const std::optional<std::vector<std::string>>& keys, const Entity& e, std::string_view attr) {
            if (!keys) return true;
            auto v = entity_attribute(e, attr);
            if (!v) return false;
            std::string folded = fold_case(scalar_to_string(*v));
            return std::find(keys->begin(), keys->end(), folded) != keys->end();
        };
        std::erase_if(positions, [&](std::uint32_t pos) {
            EventIndex ev = part.events[pos];
            if (q.subject_binding && !std::binary_search(q.subject_binding->begin(), q.subject_binding->end(), subject_[ev]))
                return true;
            if (q.object_binding && !std::binary_search(q.object_binding->begin(), q.object_binding->end(), object_[ev]))
                return true;
            const Entity& subj = entities_[subject_[ev]];
            const Entity& obj = entities_[object_[ev]];
            return !key_ok(exe_keys, subj, "exe_name") || !key_ok(name_keys, obj, "name") ||
                   !key_ok(ip_keys, obj, "dst_ip");
        });
    }

    fetched_.fetch_add(positions.size(), std::memory_order_relaxed);
    for (auto pos : positions) {
        EventIndex ev = part.events[pos];
        if (matches(q, ev)) out.push_back(ev);
    }
}

EventIdSet Store::execute(const DataQuery& q, const ExecuteOptions& options) const {
    require_sealed();
    std::vector<EventIndex> out;
    for (const auto& key : partitions_for(q, options)) scan_partition(*partitions_.at(key), q, options, out);
    std::sort(out.begin(), out.end());
    return EventIdSet(this, std::move(out));
}

std::vector<EventIndex> Store::index_lookup(IndexedAttribute attribute, std::string_view value) const {
    require_sealed();
    std::vector<EventIndex> out;
    std::string key = fold_case(value);
    for (const auto& [k, part] : partitions_) {
        const PositionList* list = nullptr;
        switch (attribute) {
            case IndexedAttribute::subject_exe_name: {
                auto it = part->by_subject_exe.find(key);
                if (it != part->by_subject_exe.end()) list = &it->second;
                break;
            }
            case IndexedAttribute::object_name: {
                auto it = part->by_object_name.find(key);
                if (it != part->by_object_name.end()) list = &it->second;
                break;
            }
            case IndexedAttribute::object_dst_ip: {
                auto it = part->by_object_dst_ip.find(key);
                if (it != part->by_object_dst_ip.end()) list = &it->second;
                break;
            }
            case IndexedAttribute::op: {
                auto op = op_from_string(key);
                if (op) list = &part->by_op[static_cast<std::size_t>(*op)];
                break;
            }
        }
        if (list)
            for (auto pos : *list) out.push_back(part->events[pos]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string describe(const DataQuery& q) {
    std::string out = "process[" + format_constraint(q.subject_constraints) + "] " + format_op_expr(q.ops) + " " +
                      std::string(to_string(q.object_kind)) + "[" + format_constraint(q.object_constraints) + "]";
    if (!q.event_constraints.is_always()) out += " event[" + format_constraint(q.event_constraints) + "]";
    if (q.agents) {
        out += " agents={";
        for (std::size_t i = 0; i < q.agents->size(); ++i) out += (i ? "," : "") + std::to_string((*q.agents)[i].value);
        out += "}";
    }
    if (q.time_range) out += " time=[" + format_iso8601(q.time_range->begin) + ", " + format_iso8601(q.time_range->end) + ")";
    if (q.statically_empty) out += " (empty)";
    return out;
}

}  // namespace aiql
