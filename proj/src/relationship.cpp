#include <limits>

#include "aiql/engine.hpp"

namespace aiql {

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::optional<Scalar> operand_value(const Store& store, const AttrOperand& o, EventIndex ev) {
    switch (o.role) {
        case Role::subject: return entity_attribute(store.entity(store.subject_of(ev)), o.attribute);
        case Role::object: return entity_attribute(store.entity(store.object_of(ev)), o.attribute);
        case Role::event: return event_attribute(store.event(ev), o.attribute);
    }
    return std::nullopt;
}

}  // namespace

std::vector<DeltaInterval> delta_intervals(const TemporalRelationship& rel) {
    switch (rel.order) {
        case TemporalOrder::before:
            if (rel.range) return {{rel.range->lo, rel.range->hi}};
            return {{1, kMax}};
        case TemporalOrder::after:
            if (rel.range) return {{-rel.range->hi, -rel.range->lo}};
            return {{kMin, -1}};
        case TemporalOrder::within:
            if (!rel.range) return {};
            if (rel.range->lo == 0) return {{-rel.range->hi, rel.range->hi}};
            return {{-rel.range->hi, -rel.range->lo}, {rel.range->lo, rel.range->hi}};
    }
    return {};
}

bool eval_temporal(const TemporalRelationship& rel, std::int64_t left_start, std::int64_t right_start) {
    std::int64_t delta = 0;
    if (__builtin_sub_overflow(right_start, left_start, &delta)) return false;
    for (const auto& iv : delta_intervals(rel))
        if (delta >= iv.lo && delta <= iv.hi) return true;
    return false;
}

bool eval_temporal(const TemporalRelationship& rel, const Event& left, const Event& right) {
    return eval_temporal(rel, left.start_time.ms, right.start_time.ms);
}

bool eval_relationship(const Relationship& rel, const Store& store, EventIndex left, EventIndex right) {
    if (rel.temporal()) return eval_temporal(rel.time(), store.start_of(left), store.start_of(right));
    const auto& a = rel.attr();
    auto l = operand_value(store, a.left, left);
    if (!l) return false;
    auto r = operand_value(store, a.right, right);
    if (!r) return false;
    return compare_attributes(a.op, *l, *r);
}

}  // namespace aiql
