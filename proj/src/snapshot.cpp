// Snapshot layout (text, one JSON document per line):
//   line 1: {"format":"aiql-snapshot","version":1,"group_size":G,"entities":N,"events":M}
//   next N lines: entity records, then M event records (ingest line formats).

#include <fstream>

#include "aiql/errors.hpp"
#include "aiql/store.hpp"
#include "json.hpp"

namespace aiql {

namespace {
constexpr int kSnapshotVersion = 1;
constexpr const char* kSnapshotFormat = "aiql-snapshot";
}  // namespace

void Store::save_snapshot(const std::filesystem::path& path) const {
    require_sealed();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + path.string());
    nlohmann::ordered_json header;
    header["format"] = kSnapshotFormat;
    header["version"] = kSnapshotVersion;
    header["group_size"] = group_size_;
    header["entities"] = entities_.size();
    header["events"] = events_.size();
    out << header.dump() << '\n';
    for (const auto& e : entities_) out << entity_to_json_line(e) << '\n';
    for (const auto& e : events_) out << event_to_json_line(e) << '\n';
    if (!out) throw StoreError("write failure on " + path.string());
}

Store Store::load_snapshot(const std::filesystem::path& path, IngestStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open snapshot " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw StoreError("empty snapshot " + path.string());
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const std::exception&) {
        throw StoreError("bad snapshot header in " + path.string());
    }
    if (header.value("format", "") != kSnapshotFormat) throw StoreError("not an aiql snapshot: " + path.string());
    if (header.value("version", 0) != kSnapshotVersion)
        throw StoreError("unsupported snapshot version " + std::to_string(header.value("version", 0)));

    Store store(header.value("group_size", std::int64_t{1}));
    auto entity_count = header.value("entities", std::size_t{0});
    auto event_count = header.value("events", std::size_t{0});
    IngestStats local;
    for (std::size_t i = 0; i < entity_count; ++i) {
        if (!std::getline(in, line)) throw StoreError("truncated snapshot " + path.string());
        if (auto reason = store.add_entity_json(line)) local.rejections.push_back({"entities", i + 2, *reason});
        else ++local.entities;
    }
    for (std::size_t i = 0; i < event_count; ++i) {
        if (!std::getline(in, line)) throw StoreError("truncated snapshot " + path.string());
        if (auto reason = store.add_event_json(line))
            local.rejections.push_back({"events", entity_count + i + 2, *reason});
        else
            ++local.events;
    }
    local.rejected = local.rejections.size();
    store.seal();
    if (stats) *stats = std::move(local);
    return store;
}

}  // namespace aiql
