#include <fstream>
#include <functional>
#include <sstream>

#include "aiql/errors.hpp"
#include "aiql/store.hpp"
#include "json.hpp"

namespace aiql {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<Scalar> to_scalar(const json& v) {
    if (v.is_number_integer()) return Scalar{v.get<std::int64_t>()};
    if (v.is_string()) return Scalar{v.get<std::string>()};
    return std::nullopt;
}

const json* field(const json& obj, const char* name) {
    auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* name) {
    const json* v = field(obj, name);
    if (!v || !v->is_string()) throw std::invalid_argument(std::string("missing or non-string field '") + name + "'");
    return v->get<std::string>();
}

std::int64_t require_int(const json& obj, const char* name) {
    const json* v = field(obj, name);
    if (!v || !v->is_number_integer()) throw std::invalid_argument(std::string("missing or non-integer field '") + name + "'");
    return v->get<std::int64_t>();
}

std::optional<std::int64_t> optional_int(const json& obj, const char* name) {
    const json* v = field(obj, name);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_number_integer()) throw std::invalid_argument(std::string("non-integer field '") + name + "'");
    return v->get<std::int64_t>();
}

Entity parse_entity(std::string_view line) {
    json j = json::parse(line);
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    Entity e;
    e.id = require_string(j, "id");
    auto kind = entity_kind_from_string(require_string(j, "type"));
    if (!kind) throw std::invalid_argument("unknown entity type");
    e.kind = *kind;
    e.agent = AgentId{require_int(j, "agentid")};
    if (const json* attrs = field(j, "attrs")) {
        if (!attrs->is_object()) throw std::invalid_argument("attrs is not an object");
        for (const auto& [key, value] : attrs->items()) {
            auto s = to_scalar(value);
            if (!s) throw std::invalid_argument("attribute '" + key + "' is not a string or integer");
            e.attrs.emplace(key, std::move(*s));
        }
    }
    return e;
}

Event parse_event(std::string_view line) {
    json j = json::parse(line);
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    Event e;
    e.id = require_string(j, "id");
    e.agent = AgentId{require_int(j, "agentid")};
    e.subject = require_string(j, "subject");
    auto op = op_from_string(require_string(j, "op"));
    if (!op) throw std::invalid_argument("unknown op");
    e.op = *op;
    e.object = require_string(j, "object");
    e.start_time = Timestamp{require_int(j, "start_time")};
    e.end_time = Timestamp{require_int(j, "end_time")};
    e.amount = optional_int(j, "amount");
    e.failure_code = optional_int(j, "failure_code");
    return e;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

void ingest_stream(std::istream& in, const char* source, IngestStats& stats,
                   const std::function<std::optional<std::string>(std::string_view)>& add) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        if (auto reason = add(line)) {
            ++stats.rejected;
            stats.rejections.push_back({source, lineno, *reason});
        } else if (std::string_view(source) == "entities") {
            ++stats.entities;
        } else {
            ++stats.events;
        }
    }
    if (in.bad()) throw StoreError(std::string("read failure on ") + source);
}

}  // namespace

std::optional<std::string> Store::add_entity_json(std::string_view line) {
    Entity e;
    try {
        e = parse_entity(line);
    } catch (const std::exception& ex) {
        return std::string("malformed: ") + ex.what();
    }
    return add_entity(std::move(e));
}

std::optional<std::string> Store::add_event_json(std::string_view line) {
    Event e;
    try {
        e = parse_event(line);
    } catch (const std::exception& ex) {
        return std::string("malformed: ") + ex.what();
    }
    return add_event(std::move(e));
}

IngestStats Store::ingest(std::istream& entities, std::istream& events) {
    IngestStats stats;
    ingest_stream(entities, "entities", stats, [&](std::string_view l) { return add_entity_json(l); });
    ingest_stream(events, "events", stats, [&](std::string_view l) { return add_event_json(l); });
    seal();
    return stats;
}

IngestStats Store::ingest(const std::filesystem::path& entities_path, const std::filesystem::path& events_path) {
    std::ifstream entities(entities_path);
    if (!entities) throw StoreError("cannot open " + entities_path.string());
    std::ifstream events(events_path);
    if (!events) throw StoreError("cannot open " + events_path.string());
    return ingest(entities, events);
}

std::string entity_to_json_line(const Entity& entity) {
    ordered_json j;
    j["id"] = entity.id;
    j["type"] = std::string(to_string(entity.kind));
    j["agentid"] = entity.agent.value;
    ordered_json attrs = ordered_json::object();
    for (const auto& [key, value] : entity.attrs) {
        if (const auto* i = std::get_if<std::int64_t>(&value))
            attrs[key] = *i;
        else
            attrs[key] = std::get<std::string>(value);
    }
    j["attrs"] = std::move(attrs);
    return j.dump();
}

std::string event_to_json_line(const Event& event) {
    ordered_json j;
    j["id"] = event.id;
    j["agentid"] = event.agent.value;
    j["subject"] = event.subject;
    j["op"] = std::string(to_string(event.op));
    j["object"] = event.object;
    j["start_time"] = event.start_time.ms;
    j["end_time"] = event.end_time.ms;
    if (event.amount) j["amount"] = *event.amount;
    if (event.failure_code) j["failure_code"] = *event.failure_code;
    return j.dump();
}

}  // namespace aiql
