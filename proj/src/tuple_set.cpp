#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "aiql/errors.hpp"
#include "aiql/simd.hpp"
#include "tuple_ops.hpp"

namespace aiql {

TupleSet TupleSet::single(int pattern, const EventIdSet& events) {
    TupleSet t({pattern});
    t.cells_ = events.ids();
    return t;
}

int TupleSet::column_of(int pattern) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
        if (schema_[c] == pattern) return static_cast<int>(c);
    return -1;
}

TupleSet TupleSet::canonical() const {
    const std::size_t n = arity();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return schema_[a] < schema_[b]; });

    std::vector<int> schema(n);
    for (std::size_t c = 0; c < n; ++c) schema[c] = schema_[perm[c]];
    const std::size_t rows = size();
    std::vector<EventIndex> cells(cells_.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < n; ++c) cells[r * n + c] = cells_[r * n + perm[c]];

    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(cells.begin() + static_cast<std::ptrdiff_t>(a * n),
                                            cells.begin() + static_cast<std::ptrdiff_t>((a + 1) * n),
                                            cells.begin() + static_cast<std::ptrdiff_t>(b * n),
                                            cells.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
    };
    std::sort(order.begin(), order.end(), less);

    TupleSet out(std::move(schema));
    out.cells_.reserve(cells.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && !less(order[k - 1], order[k])) continue;
        auto begin = cells.begin() + static_cast<std::ptrdiff_t>(order[k] * n);
        out.cells_.insert(out.cells_.end(), begin, begin + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

std::vector<std::vector<EventIndex>> TupleSet::rows() const {
    TupleSet c = canonical();
    std::vector<std::vector<EventIndex>> out;
    for (std::size_t r = 0; r < c.size(); ++r) {
        auto row = c.row(r);
        out.emplace_back(row.begin(), row.end());
    }
    return out;
}

namespace detail {

namespace {

void check_budget(std::size_t rows, std::uint64_t budget) {
    if (rows > budget)
        throw ResourceError("intermediate result exceeds the row budget of " + std::to_string(budget) + " rows");
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) { return saturating_add(a, b); }
std::int64_t sat_sub(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_sub_overflow(a, b, &out))
        return b > 0 ? std::numeric_limits<std::int64_t>::min() : std::numeric_limits<std::int64_t>::max();
    return out;
}

void emit(TupleSet& out, std::span<const EventIndex> a, std::span<const EventIndex> b, std::vector<EventIndex>& buf) {
    buf.assign(a.begin(), a.end());
    buf.insert(buf.end(), b.begin(), b.end());
    out.append(buf);
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> s = a;
    s.insert(s.end(), b.begin(), b.end());
    return s;
}

}  // namespace

bool is_entity_id_link(const Relationship& rel) {
    if (rel.temporal()) return false;
    const auto& a = rel.attr();
    return a.op == Comparator::eq && a.left.attribute == "id" && a.right.attribute == "id" &&
           a.left.role != Role::event && a.right.role != Role::event;
}

EntityIndex operand_entity(const Store& store, Role role, EventIndex ev) {
    return role == Role::subject ? store.subject_of(ev) : store.object_of(ev);
}

TupleSet join(const Store& store, const TupleSet& a, const TupleSet& b, const Relationship& rel,
              std::uint64_t row_budget) {
    const int lp = rel.left_pattern();
    const int rp = rel.right_pattern();
    bool a_is_left = a.contains(lp) && b.contains(rp);
    if (!a_is_left && !(a.contains(rp) && b.contains(lp)))
        throw std::logic_error("join relationship does not link the two tuple sets");
    const auto ca = static_cast<std::size_t>(a.column_of(a_is_left ? lp : rp));
    const auto cb = static_cast<std::size_t>(b.column_of(a_is_left ? rp : lp));

    TupleSet out(concat(a.schema(), b.schema()));
    std::vector<EventIndex> buf;

    if (is_entity_id_link(rel)) {
        const auto& link = rel.attr();
        Role role_a = a_is_left ? link.left.role : link.right.role;
        Role role_b = a_is_left ? link.right.role : link.left.role;
        std::unordered_map<EntityIndex, std::vector<std::uint32_t>> by_entity;
        for (std::size_t r = 0; r < b.size(); ++r)
            by_entity[operand_entity(store, role_b, b.at(r, cb))].push_back(static_cast<std::uint32_t>(r));
        for (std::size_t r = 0; r < a.size(); ++r) {
            auto it = by_entity.find(operand_entity(store, role_a, a.at(r, ca)));
            if (it == by_entity.end()) continue;
            for (auto rb : it->second) emit(out, a.row(r), b.row(rb), buf);
            check_budget(out.size(), row_budget);
        }
        return out;
    }

    if (rel.temporal()) {
        std::vector<std::pair<std::int64_t, std::uint32_t>> starts;
        starts.reserve(b.size());
        for (std::size_t r = 0; r < b.size(); ++r)
            starts.emplace_back(store.start_of(b.at(r, cb)), static_cast<std::uint32_t>(r));
        std::sort(starts.begin(), starts.end());
        auto intervals = delta_intervals(rel.time());
        for (std::size_t r = 0; r < a.size(); ++r) {
            std::int64_t s = store.start_of(a.at(r, ca));
            for (const auto& iv : intervals) {
                // B is the right side: start_b - s in [lo, hi]; B is the left
                // side: s - start_b in [lo, hi].
                std::int64_t lo = a_is_left ? sat_add(s, iv.lo) : sat_sub(s, iv.hi);
                std::int64_t hi = a_is_left ? sat_add(s, iv.hi) : sat_sub(s, iv.lo);
                auto first = std::lower_bound(starts.begin(), starts.end(),
                                              std::pair{lo, std::uint32_t{0}});
                for (auto it = first; it != starts.end() && it->first <= hi; ++it)
                    emit(out, a.row(r), b.row(it->second), buf);
            }
            check_budget(out.size(), row_budget);
        }
        return out;
    }

    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t q = 0; q < b.size(); ++q) {
            EventIndex ea = a.at(r, ca);
            EventIndex eb = b.at(q, cb);
            bool ok = a_is_left ? eval_relationship(rel, store, ea, eb) : eval_relationship(rel, store, eb, ea);
            if (ok) emit(out, a.row(r), b.row(q), buf);
        }
        check_budget(out.size(), row_budget);
    }
    return out;
}

TupleSet filter(const Store& store, const TupleSet& t, const Relationship& rel) {
    const auto cl = static_cast<std::size_t>(t.column_of(rel.left_pattern()));
    const auto cr = static_cast<std::size_t>(t.column_of(rel.right_pattern()));
    TupleSet out(t.schema());
    if (rel.temporal()) {
        std::vector<std::int64_t> deltas(t.size());
        std::vector<std::uint8_t> valid(t.size(), 1);
        for (std::size_t r = 0; r < t.size(); ++r) {
            if (__builtin_sub_overflow(store.start_of(t.at(r, cr)), store.start_of(t.at(r, cl)), &deltas[r]))
                valid[r] = 0;
        }
        std::vector<std::uint32_t> keep;
        for (const auto& iv : delta_intervals(rel.time())) simd::select_range(deltas, iv.lo, iv.hi, 0, keep);
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        for (auto r : keep)
            if (valid[r]) out.append(t.row(r));
        return out;
    }
    for (std::size_t r = 0; r < t.size(); ++r)
        if (eval_relationship(rel, store, t.at(r, cl), t.at(r, cr))) out.append(t.row(r));
    return out;
}

TupleSet cross(const TupleSet& a, const TupleSet& b, std::uint64_t row_budget) {
    if (static_cast<double>(a.size()) * static_cast<double>(b.size()) > static_cast<double>(row_budget))
        throw ResourceError("cross product of " + std::to_string(a.size()) + " x " + std::to_string(b.size()) +
                            " rows exceeds the row budget of " + std::to_string(row_budget));
    TupleSet out(concat(a.schema(), b.schema()));
    out.reserve_rows(a.size() * b.size());
    std::vector<EventIndex> buf;
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t q = 0; q < b.size(); ++q) emit(out, a.row(r), b.row(q), buf);
    return out;
}

}  // namespace detail

}  // namespace aiql
