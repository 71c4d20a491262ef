#pragma once

// ResultTable rendering: aligned text table, JSON and CSV.

#include <string>
#include <string_view>

#include "aiql/engine.hpp"

namespace aiql {

enum class OutputFormat : std::uint8_t { table, json, csv };

std::optional<OutputFormat> output_format_from_string(std::string_view text);

std::string render_table(const ResultTable& t);
/// {"columns": [...], "rows": [[...], ...]}; null for missing values.
std::string render_json(const ResultTable& t);
/// RFC 4180 quoting.
std::string render_csv(const ResultTable& t);
std::string render(const ResultTable& t, OutputFormat format);

/// Inverse of render_json. Throws std::invalid_argument on malformed input.
ResultTable parse_json_table(std::string_view text);

}  // namespace aiql
