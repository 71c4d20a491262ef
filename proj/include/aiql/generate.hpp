#pragma once

// Deterministic synthetic corpora with planted ground truth.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aiql/model.hpp"
#include "aiql/time_util.hpp"

namespace aiql {

enum class Scenario : std::uint8_t { apt_chain, dependency_chain, netspike, uniform };

std::string_view to_string(Scenario s);
std::optional<Scenario> scenario_from_string(std::string_view text);

struct GenerateOptions {
    Scenario scenario = Scenario::uniform;
    std::uint64_t seed = 42;
    std::int64_t hosts = 1;
    std::int64_t noise_events = 1000;
    std::int64_t processes_per_host = 20;
    std::int64_t files_per_host = 30;
    std::int64_t ips_per_host = 10;
    std::int64_t days = 1;
    std::int64_t start_ms = 1483228800000;  // 2017-01-01T00:00:00Z
};

/// What a scenario planted and how to find it.
struct Manifest {
    Scenario scenario = Scenario::uniform;
    std::uint64_t seed = 0;
    TimeWindow range;
    /// Planted event-id tuples, in the pattern order of queries[0].
    std::vector<std::vector<std::string>> tuples;
    /// AIQL text detecting the planted behavior.
    std::vector<std::string> queries;
    /// netspike: window indices expected to alert, the spiking group's key.
    std::vector<std::int64_t> alert_windows;
    std::string alert_group;
};

struct Corpus {
    std::vector<Entity> entities;
    std::vector<Event> events;  // ascending (start_time, id)
    Manifest manifest;
};

/// Throws std::invalid_argument for non-positive scale parameters.
Corpus generate(const GenerateOptions& options);

std::string manifest_to_json(const Manifest& manifest);

/// Writes entities.jsonl, events.jsonl and manifest.json under `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace aiql
