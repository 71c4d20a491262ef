#include "aiql/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "aiql/errors.hpp"

namespace aiql {

std::string to_string(const SourcePos& pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.col);
}

namespace {

constexpr std::array<std::string_view, 5> kFileAttrs{"name", "owner", "group", "volid", "dataid"};
constexpr std::array<std::string_view, 6> kProcessAttrs{"pid", "name", "exe_name", "user", "cmd", "signature"};
constexpr std::array<std::string_view, 5> kNetworkAttrs{"src_ip", "dst_ip", "src_port", "dst_port", "protocol"};

constexpr std::array<std::string_view, 7> kEventAttrs{"id",         "agentid", "optype", "start_time",
                                                      "end_time",   "amount",  "failure_code"};

bool contains(std::span<const std::string_view> names, std::string_view name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string_view to_string(EntityKind kind) {
    switch (kind) {
        case EntityKind::file: return "file";
        case EntityKind::process: return "process";
        case EntityKind::network: return "network";
    }
    return "?";
}

std::string_view to_string(OpType op) {
    switch (op) {
        case OpType::read: return "read";
        case OpType::write: return "write";
        case OpType::execute: return "execute";
        case OpType::start: return "start";
        case OpType::end: return "end";
        case OpType::rename: return "rename";
        case OpType::remove: return "delete";
        case OpType::connect: return "connect";
    }
    return "?";
}

std::optional<EntityKind> entity_kind_from_string(std::string_view text) {
    if (text == "file") return EntityKind::file;
    if (text == "process") return EntityKind::process;
    if (text == "network") return EntityKind::network;
    return std::nullopt;
}

std::optional<OpType> op_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kOpTypeCount; ++i) {
        auto op = static_cast<OpType>(i);
        if (to_string(op) == text) return op;
    }
    return std::nullopt;
}

std::string scalar_to_string(const Scalar& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    return std::get<std::string>(value);
}

std::optional<std::int64_t> scalar_as_int(const Scalar& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    const auto& s = std::get<std::string>(value);
    if (s.empty()) return std::nullopt;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return out;
}

std::string_view default_attribute(EntityKind kind) {
    switch (kind) {
        case EntityKind::file: return "name";
        case EntityKind::process: return "exe_name";
        case EntityKind::network: return "dst_ip";
    }
    return "name";
}

std::span<const std::string_view> schema_attributes(EntityKind kind) {
    switch (kind) {
        case EntityKind::file: return kFileAttrs;
        case EntityKind::process: return kProcessAttrs;
        case EntityKind::network: return kNetworkAttrs;
    }
    return {};
}

std::optional<std::string> canonical_entity_attribute(EntityKind kind, std::string_view name) {
    std::string folded = fold_case(name);
    if (folded == "id" || folded == "agentid") return folded;
    if (kind == EntityKind::network) {
        if (folded == "dstip") return std::string("dst_ip");
        if (folded == "srcip") return std::string("src_ip");
        if (folded == "dstport") return std::string("dst_port");
        if (folded == "srcport") return std::string("src_port");
    }
    if (contains(schema_attributes(kind), folded)) return folded;
    return std::nullopt;
}

std::optional<std::string> canonical_event_attribute(std::string_view name) {
    std::string folded = fold_case(name);
    if (folded == "starttime") folded = "start_time";
    if (folded == "endtime") folded = "end_time";
    if (contains(kEventAttrs, folded)) return folded;
    return std::nullopt;
}

bool is_numeric_entity_attribute(std::string_view canonical) {
    return canonical == "agentid" || canonical == "pid" || canonical == "src_port" || canonical == "dst_port";
}

bool is_numeric_event_attribute(std::string_view canonical) {
    return canonical == "agentid" || canonical == "start_time" || canonical == "end_time" ||
           canonical == "amount" || canonical == "failure_code";
}

std::optional<Scalar> entity_attribute(const Entity& entity, std::string_view canonical) {
    if (canonical == "id") return Scalar{entity.id};
    if (canonical == "agentid") return Scalar{entity.agent.value};
    auto it = entity.attrs.find(canonical);
    if (it == entity.attrs.end()) return std::nullopt;
    return it->second;
}

std::optional<Scalar> event_attribute(const Event& event, std::string_view canonical) {
    if (canonical == "id") return Scalar{event.id};
    if (canonical == "agentid") return Scalar{event.agent.value};
    if (canonical == "optype") return Scalar{std::string(to_string(event.op))};
    if (canonical == "start_time") return Scalar{event.start_time.ms};
    if (canonical == "end_time") return Scalar{event.end_time.ms};
    if (canonical == "amount") {
        if (event.amount) return Scalar{*event.amount};
        return std::nullopt;
    }
    if (canonical == "failure_code") {
        if (event.failure_code) return Scalar{*event.failure_code};
        return std::nullopt;
    }
    return std::nullopt;
}

bool op_allowed(OpType op, EntityKind object_kind) {
    if (op == OpType::connect) return object_kind == EntityKind::network || object_kind == EntityKind::process;
    return true;
}

std::vector<Violation> validate_entity(const Entity& entity) {
    std::vector<Violation> out;
    if (entity.id.empty()) out.push_back({"id", "id must be non-empty"});
    auto schema = schema_attributes(entity.kind);
    for (const auto& [key, value] : entity.attrs) {
        if (!contains(schema, key)) {
            out.push_back({key, key + " not valid for " + std::string(to_string(entity.kind))});
            continue;
        }
        if (is_numeric_entity_attribute(key) && !std::holds_alternative<std::int64_t>(value)) {
            out.push_back({key, key + " must be an integer"});
        }
    }
    return out;
}

std::vector<Violation> validate_event(const Event& event, const Entity* subject, const Entity* object) {
    std::vector<Violation> out;
    if (event.id.empty()) out.push_back({"id", "id must be non-empty"});
    if (event.start_time.ms < 0) out.push_back({"start_time", "negative timestamp"});
    if (event.end_time < event.start_time) out.push_back({"end_time", "time order"});
    if (subject == nullptr) {
        out.push_back({"subject", "dangling subject"});
    } else if (subject->kind != EntityKind::process) {
        out.push_back({"subject", "subject must be a process"});
    }
    if (object == nullptr) {
        out.push_back({"object", "dangling object"});
    } else if (!op_allowed(event.op, object->kind)) {
        out.push_back({"op", std::string(to_string(event.op)) + " not valid for " +
                                 std::string(to_string(object->kind)) + " object"});
    }
    return out;
}

bool match_value(std::string_view pattern, std::string_view value) {
    // Greedy wildcard match with single-point backtracking; '%' is the only
    // metacharacter.
    std::size_t p = 0, v = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (v < value.size()) {
        if (p < pattern.size() && pattern[p] == '%') {
            star = p++;
            mark = v;
        } else if (p < pattern.size() && lower(pattern[p]) == lower(value[v])) {
            ++p;
            ++v;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            v = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '%') ++p;
    return p == pattern.size();
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = lower(c);
    return out;
}

}  // namespace aiql
