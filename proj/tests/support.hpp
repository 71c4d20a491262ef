#pragma once

// Test support: in-memory corpora, random corpus/query generators and
// brute-force oracles that share no code with the store or the scheduler.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aiql/engine.hpp"
#include "aiql/parser.hpp"
#include "aiql/rewrite.hpp"
#include "aiql/store.hpp"

namespace aiql::test {

inline constexpr std::int64_t kJan1 = 1483228800000;  // 2017-01-01T00:00:00Z
inline constexpr std::int64_t kSec = 1000;
inline constexpr std::int64_t kMin = 60 * kSec;
inline constexpr std::int64_t kHour = 60 * kMin;

inline Entity proc(const std::string& id, std::int64_t agent, const std::string& exe, std::int64_t pid = 100) {
    Entity e{id, EntityKind::process, AgentId{agent}, {}};
    e.attrs["exe_name"] = exe;
    e.attrs["name"] = exe;
    e.attrs["pid"] = pid;
    e.attrs["user"] = "root";
    return e;
}

inline Entity file(const std::string& id, std::int64_t agent, const std::string& name) {
    Entity e{id, EntityKind::file, AgentId{agent}, {}};
    e.attrs["name"] = name;
    e.attrs["owner"] = "root";
    return e;
}

inline Entity net(const std::string& id, std::int64_t agent, const std::string& dst, std::int64_t port = 80) {
    Entity e{id, EntityKind::network, AgentId{agent}, {}};
    e.attrs["dst_ip"] = dst;
    e.attrs["src_ip"] = "10.0.0.1";
    e.attrs["dst_port"] = port;
    return e;
}

inline Event event(const std::string& id, std::int64_t agent, const std::string& subject, OpType op,
                   const std::string& object, std::int64_t start, std::optional<std::int64_t> amount = std::nullopt) {
    Event e;
    e.id = id;
    e.agent = AgentId{agent};
    e.subject = subject;
    e.op = op;
    e.object = object;
    e.start_time = Timestamp{start};
    e.end_time = Timestamp{start + 10};
    e.amount = amount;
    return e;
}

/// Builds and seals a store; throws if any record is rejected.
inline Store make_store(const std::vector<Entity>& entities, const std::vector<Event>& events,
                        std::int64_t group_size = 1) {
    Store s(group_size);
    for (const auto& e : entities)
        if (auto why = s.add_entity(e)) throw std::runtime_error("entity " + e.id + ": " + *why);
    for (const auto& e : events)
        if (auto why = s.add_event(e)) throw std::runtime_error("event " + e.id + ": " + *why);
    s.seal();
    return s;
}

// ---- random corpora -----------------------------------------------------------

struct RandomCorpusOptions {
    int hosts = 3;
    int procs_per_host = 8;
    int files_per_host = 8;
    int ips_per_host = 4;
    int events = 1000;
    std::int64_t begin = kJan1 + 22 * kHour;  // spans midnight
    std::int64_t span = 4 * kHour;
};

inline const std::vector<std::string>& exe_pool() {
    static const std::vector<std::string> v{"bash", "sshd", "apache2", "cat", "vim", "python", "curl", "cron"};
    return v;
}
inline const std::vector<std::string>& file_pool() {
    static const std::vector<std::string> v{".viminfo", "/etc/passwd", "/tmp/a.sh", "/tmp/b.sh",
                                            "notes.txt", "/var/log/syslog", "a.dll",      "backup1.dmp"};
    return v;
}
inline const std::vector<std::string>& ip_pool() {
    static const std::vector<std::string> v{"1.1.1.1", "2.2.2.2", "3.3.3.3", "4.4.4.4"};
    return v;
}

struct RandomCorpus {
    std::vector<Entity> entities;
    std::vector<Event> events;
};

inline RandomCorpus random_corpus(std::uint64_t seed, const RandomCorpusOptions& o = {}) {
    std::mt19937_64 rng(seed);
    auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    RandomCorpus c;
    struct Host {
        std::vector<std::size_t> procs, files, ips;
    };
    std::vector<Host> hosts(static_cast<std::size_t>(o.hosts));
    for (int h = 0; h < o.hosts; ++h) {
        const std::int64_t agent = h + 1;
        auto& host = hosts[static_cast<std::size_t>(h)];
        for (int i = 0; i < o.procs_per_host; ++i) {
            host.procs.push_back(c.entities.size());
            c.entities.push_back(proc("h" + std::to_string(agent) + "p" + std::to_string(i), agent,
                                      exe_pool()[below(exe_pool().size())], static_cast<std::int64_t>(below(50))));
        }
        for (int i = 0; i < o.files_per_host; ++i) {
            host.files.push_back(c.entities.size());
            c.entities.push_back(
                file("h" + std::to_string(agent) + "f" + std::to_string(i), agent, file_pool()[below(file_pool().size())]));
        }
        for (int i = 0; i < o.ips_per_host; ++i) {
            host.ips.push_back(c.entities.size());
            c.entities.push_back(net("h" + std::to_string(agent) + "i" + std::to_string(i), agent,
                                     ip_pool()[below(ip_pool().size())], static_cast<std::int64_t>(80 + below(3))));
        }
    }
    static constexpr OpType file_ops[] = {OpType::read, OpType::write, OpType::execute};
    static constexpr OpType proc_ops[] = {OpType::start, OpType::end, OpType::connect};
    static constexpr OpType net_ops[] = {OpType::connect, OpType::read, OpType::write};
    for (int n = 0; n < o.events; ++n) {
        const auto h = below(hosts.size());
        const auto& host = hosts[h];
        const Entity& subject = c.entities[host.procs[below(host.procs.size())]];
        const auto kind = below(3);
        std::size_t object = 0;
        OpType op{};
        if (kind == 0) {
            object = host.files[below(host.files.size())];
            op = file_ops[below(3)];
        } else if (kind == 1) {
            // Occasionally a process on another host (cross-host connect).
            const auto& other = hosts[below(6) == 0 ? below(hosts.size()) : h];
            object = other.procs[below(other.procs.size())];
            op = proc_ops[below(3)];
        } else {
            object = host.ips[below(host.ips.size())];
            op = net_ops[below(3)];
        }
        char id[16];
        std::snprintf(id, sizeof id, "e%05d", n);
        // Coarse timestamps make equal start times common.
        const std::int64_t t = o.begin + static_cast<std::int64_t>(below(static_cast<std::size_t>(o.span / kSec))) * kSec;
        c.events.push_back(event(id, static_cast<std::int64_t>(h + 1), subject.id, op, c.entities[object].id, t,
                                 static_cast<std::int64_t>(below(5000))));
    }
    return c;
}

// ---- random queries -------------------------------------------------------------

/// Multievent query text with 2-4 patterns and 1-4 relationships (explicit
/// plus implicit reuse joins). Relationships connect every pattern and each
/// pattern carries at least one constraint unless both its entities are
/// reused.
inline std::string random_query(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    auto pick = [&](const std::vector<std::string>& v) { return v[below(v.size())]; };

    struct Slot {
        std::string name;
        char kind;  // 'p', 'f', 'i'
        std::size_t pattern;
    };
    std::string text;
    if (below(3) == 0) text += "(from \"2017-01-01T21:30:00Z\" to \"2017-01-02T01:30:00Z\")\n";
    if (below(4) == 0) text += "agentid = " + std::to_string(1 + below(3)) + "\n";

    const std::size_t patterns = 2 + below(3);
    std::vector<std::size_t> parent(patterns);
    for (std::size_t i = 0; i < patterns; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<Slot> subjects, objects, declared;
    int fresh = 0;
    std::size_t implicit = 0;
    auto constraint = [&](char kind) -> std::string {
        switch (kind) {
            case 'p': return below(2) ? "[\"" + pick(exe_pool()) + "\"]" : "[\"%a%\"]";
            case 'f': return below(2) ? "[\"" + pick(file_pool()) + "\"]" : "[name = \"%.sh\" || name = \".viminfo\"]";
            default: return below(2) ? "[\"" + pick(ip_pool()) + "\"]" : "[dst_port = 80]";
        }
    };
    // A fresh or reused entity; the bool reports reuse.
    auto entity = [&](char kind, std::size_t pattern, const std::string& avoid) -> std::pair<Slot, bool> {
        std::vector<Slot> same;
        for (const auto& d : declared)
            if (d.kind == kind && d.name != avoid) same.push_back(d);
        if (!same.empty() && implicit < 2 && below(3) == 0) {
            ++implicit;
            const Slot s = same[below(same.size())];
            parent[find(s.pattern)] = find(pattern);
            return {s, true};
        }
        Slot s{std::string(1, kind) + std::to_string(++fresh), kind, pattern};
        declared.push_back(s);
        return {s, false};
    };
    for (std::size_t i = 0; i < patterns; ++i) {
        auto [subj, subj_reused] = entity('p', i, "");
        const char kinds[] = {'f', 'p', 'i'};
        const char okind = kinds[below(3)];
        std::string ops;
        if (okind == 'f') ops = below(2) ? "read" : "read || write";
        else if (okind == 'p') ops = below(2) ? "start" : "connect";
        else ops = below(2) ? "connect" : "read || write";
        auto [obj, obj_reused] = entity(okind, i, subj.name);
        std::string subj_c = !subj_reused && below(2) ? constraint('p') : "";
        std::string obj_c = !obj_reused && below(2) ? constraint(okind) : "";
        if (subj_c.empty() && obj_c.empty()) {
            if (!obj_reused) obj_c = constraint(okind);
            else if (!subj_reused) subj_c = constraint('p');
        }
        const std::string kw = okind == 'f' ? "file" : okind == 'p' ? "proc" : "ip";
        text += "proc " + subj.name + subj_c + " " + ops + " " + kw + " " + obj.name + obj_c + " as evt" +
                std::to_string(i + 1) + "\n";
        subjects.push_back(subj);
        objects.push_back(obj);
    }

    auto relationship = [&](std::size_t a, std::size_t b) {
        const std::string ea = "evt" + std::to_string(a + 1), eb = "evt" + std::to_string(b + 1);
        const bool same_subject = subjects[a].name == subjects[b].name;
        switch (below(6)) {
            case 0: return ea + " before " + eb;
            case 1: return ea + " after " + eb;
            case 2:
                return ea + " before[" + std::to_string(below(5)) + "-" + std::to_string(5 + below(60)) + " min] " + eb;
            case 3:
                return ea + " within[" + std::to_string(below(10)) + "-" + std::to_string(10 + below(50)) + " min] " + eb;
            case 4:
                if (same_subject) return ea + " after[1-30 min] " + eb;
                return subjects[a].name + ".exe_name = " + subjects[b].name + ".exe_name";
            default:
                if (same_subject) return ea + " before " + eb;
                return subjects[a].name + " = " + subjects[b].name;
        }
    };
    std::vector<std::string> rels;
    for (std::size_t i = 1; i < patterns; ++i) {
        bool connected = false;
        for (std::size_t k = 0; k < i; ++k) connected = connected || find(k) == find(i);
        if (connected) continue;
        const std::size_t j = below(i);
        parent[find(i)] = find(j);
        rels.push_back(below(2) ? relationship(i, j) : relationship(j, i));
    }
    if (implicit + rels.size() == 0 || (implicit + rels.size() < 4 && below(2) == 0)) {
        std::size_t a = below(patterns), b = below(patterns);
        if (a == b) b = (a + 1) % patterns;
        rels.push_back(relationship(a, b));
    }
    if (!rels.empty()) {
        text += "with ";
        for (std::size_t k = 0; k < rels.size(); ++k) text += (k ? ", " : "") + rels[k];
        text += "\n";
    }
    text += "return evt1.id";
    for (std::size_t i = 1; i < patterns; ++i) text += ", evt" + std::to_string(i + 1) + ".id";
    text += "\n";
    return text;
}

// ---- oracles ---------------------------------------------------------------------

inline std::optional<Scalar> oracle_entity_attr(const Entity& e, const std::string& attr) {
    if (attr == "id") return Scalar{e.id};
    if (attr == "agentid") return Scalar{e.agent.value};
    auto it = e.attrs.find(attr);
    if (it == e.attrs.end()) return std::nullopt;
    return it->second;
}

inline std::optional<Scalar> oracle_event_attr(const Event& e, const std::string& attr) {
    if (attr == "id") return Scalar{e.id};
    if (attr == "agentid") return Scalar{e.agent.value};
    if (attr == "optype") return Scalar{std::string(to_string(e.op))};
    if (attr == "start_time") return Scalar{e.start_time.ms};
    if (attr == "end_time") return Scalar{e.end_time.ms};
    if (attr == "amount" && e.amount) return Scalar{*e.amount};
    if (attr == "failure_code" && e.failure_code) return Scalar{*e.failure_code};
    return std::nullopt;
}

/// Store-independent lookup tables over the corpus.
struct OracleCorpus {
    const Store* store;
    std::map<std::string, const Entity*> by_id;

    explicit OracleCorpus(const Store& s) : store(&s) {
        for (const auto& e : s.entities()) by_id[e.id] = &e;
    }
    const Entity& subject(EventIndex i) const { return *by_id.at(store->event(i).subject); }
    const Entity& object(EventIndex i) const { return *by_id.at(store->event(i).object); }
};

inline bool oracle_pattern_match(const OracleCorpus& c, const EventPattern& p, const GlobalConstraints& g,
                                 EventIndex i) {
    const Event& ev = c.store->event(i);
    const Entity& s = c.subject(i);
    const Entity& o = c.object(i);
    if (s.kind != p.subject.kind || o.kind != p.object.kind || !p.ops.matches(ev.op)) return false;
    auto sl = [&](const std::string& a) { return oracle_entity_attr(s, a); };
    auto ol = [&](const std::string& a) { return oracle_entity_attr(o, a); };
    auto el = [&](const std::string& a) { return oracle_event_attr(ev, a); };
    if (!p.subject.constraints.evaluate(sl) || !p.object.constraints.evaluate(ol)) return false;
    if (!p.event_constraints.evaluate(el) || !g.event_filter.evaluate(el)) return false;
    const std::int64_t t = ev.start_time.ms;
    if (g.window && !(t >= g.window->begin && t < g.window->end)) return false;
    if (p.window && !(t >= p.window->begin && t < p.window->end)) return false;
    return true;
}

/// Direct Δ arithmetic with Δ = right.start - left.start.
inline bool oracle_temporal(const TemporalRelationship& r, std::int64_t left, std::int64_t right) {
    const std::int64_t d = right - left;
    switch (r.order) {
        case TemporalOrder::before: return r.range ? (d >= r.range->lo && d <= r.range->hi) : d > 0;
        case TemporalOrder::after: return r.range ? (-d >= r.range->lo && -d <= r.range->hi) : d < 0;
        case TemporalOrder::within: {
            const std::int64_t a = d < 0 ? -d : d;
            return r.range && a >= r.range->lo && a <= r.range->hi;
        }
    }
    return false;
}

inline std::optional<Scalar> oracle_operand(const OracleCorpus& c, const AttrOperand& op, EventIndex i) {
    switch (op.role) {
        case Role::subject: return oracle_entity_attr(c.subject(i), op.attribute);
        case Role::object: return oracle_entity_attr(c.object(i), op.attribute);
        case Role::event: return oracle_event_attr(c.store->event(i), op.attribute);
    }
    return std::nullopt;
}

inline bool oracle_relationship(const OracleCorpus& c, const Relationship& r, EventIndex left, EventIndex right) {
    if (r.temporal())
        return oracle_temporal(r.time(), c.store->event(left).start_time.ms, c.store->event(right).start_time.ms);
    const auto& a = r.attr();
    auto l = oracle_operand(c, a.left, left);
    auto rv = oracle_operand(c, a.right, right);
    if (!l || !rv) return false;
    return compare_attributes(a.op, *l, *rv);
}

/// Cross product of linear-scan matches, filtered by every relationship;
/// rows in pattern order, sorted.
inline std::vector<std::vector<EventIndex>> oracle_rows(const Store& store, const QueryContext& input) {
    QueryContext ctx = compile_if_dependency(input);
    OracleCorpus c(store);
    std::vector<std::vector<EventIndex>> candidates(ctx.patterns.size());
    for (std::size_t p = 0; p < ctx.patterns.size(); ++p)
        for (EventIndex i = 0; i < store.event_count(); ++i)
            if (oracle_pattern_match(c, ctx.patterns[p], ctx.globals, i)) candidates[p].push_back(i);

    std::vector<std::vector<EventIndex>> rows;
    std::vector<EventIndex> current(ctx.patterns.size());
    std::function<void(std::size_t)> walk = [&](std::size_t p) {
        if (p == ctx.patterns.size()) {
            rows.push_back(current);
            return;
        }
        for (EventIndex e : candidates[p]) {
            current[p] = e;
            bool ok = true;
            for (const auto& r : ctx.relationships) {
                auto l = static_cast<std::size_t>(r.left_pattern());
                auto rr = static_cast<std::size_t>(r.right_pattern());
                if (std::max(l, rr) != p) continue;
                if (!oracle_relationship(c, r, current[l], current[rr])) {
                    ok = false;
                    break;
                }
            }
            if (ok) walk(p + 1);
        }
    };
    walk(0);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

/// Linear scan with the full DataQuery predicate.
inline std::vector<EventIndex> oracle_data_query(const Store& store, const DataQuery& q) {
    OracleCorpus c(store);
    std::vector<EventIndex> out;
    if (q.statically_empty) return out;
    for (EventIndex i = 0; i < store.event_count(); ++i) {
        const Event& ev = store.event(i);
        const Entity& s = c.subject(i);
        const Entity& o = c.object(i);
        if (s.kind != q.subject_kind || o.kind != q.object_kind) continue;
        if (!((q.op_mask >> static_cast<unsigned>(ev.op)) & 1u) || !q.ops.matches(ev.op)) continue;
        auto sl = [&](const std::string& a) { return oracle_entity_attr(s, a); };
        auto ol = [&](const std::string& a) { return oracle_entity_attr(o, a); };
        auto el = [&](const std::string& a) { return oracle_event_attr(ev, a); };
        if (!q.subject_constraints.evaluate(sl) || !q.object_constraints.evaluate(ol) ||
            !q.event_constraints.evaluate(el))
            continue;
        if (q.agents && !std::binary_search(q.agents->begin(), q.agents->end(), ev.agent)) continue;
        const std::int64_t t = ev.start_time.ms;
        if (q.time_range && !(t >= q.time_range->begin && t < q.time_range->end)) continue;
        if (q.time_bounds && !(t >= q.time_bounds->begin && t < q.time_bounds->end)) continue;
        if (q.subject_binding &&
            !std::binary_search(q.subject_binding->begin(), q.subject_binding->end(), *store.find_entity(s.id)))
            continue;
        if (q.object_binding &&
            !std::binary_search(q.object_binding->begin(), q.object_binding->end(), *store.find_entity(o.id)))
            continue;
        out.push_back(i);
    }
    return out;
}

}  // namespace aiql::test
