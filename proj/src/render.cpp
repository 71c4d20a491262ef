// Result rendering.

#include "aiql/render.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace aiql {

using nlohmann::ordered_json;

std::optional<OutputFormat> output_format_from_string(std::string_view text) {
    if (text == "table") return OutputFormat::table;
    if (text == "json") return OutputFormat::json;
    if (text == "csv") return OutputFormat::csv;
    return std::nullopt;
}

std::string render_table(const ResultTable& t) {
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) width[c] = t.columns[c].size();
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : t.rows) {
        auto& out = cells.emplace_back();
        for (std::size_t c = 0; c < row.size(); ++c) {
            out.push_back(value_to_string(row[c]));
            width[c] = std::max(width[c], out.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& parts) {
        std::string s;
        for (std::size_t c = 0; c < parts.size(); ++c) {
            if (c) s += " | ";
            s += parts[c];
            if (c + 1 < parts.size()) s.append(width[c] - parts[c].size(), ' ');
        }
        return s + "\n";
    };
    std::string out = line(t.columns);
    std::string rule;
    for (std::size_t c = 0; c < width.size(); ++c) {
        if (c) rule += "-+-";
        rule.append(width[c], '-');
    }
    out += rule + "\n";
    for (const auto& r : cells) out += line(r);
    out += "(" + std::to_string(t.rows.size()) + (t.rows.size() == 1 ? " row)\n" : " rows)\n");
    return out;
}

std::string render_json(const ResultTable& t) {
    ordered_json j;
    j["columns"] = t.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (const auto& v : row) {
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, std::monostate>)
                        r.push_back(nullptr);
                    else
                        r.push_back(x);
                },
                v);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump() + "\n";
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string render_csv(const ResultTable& t) {
    std::string out;
    auto line = [&](const auto& parts, auto to_text) {
        for (std::size_t c = 0; c < parts.size(); ++c) {
            if (c) out += ',';
            out += csv_field(to_text(parts[c]));
        }
        out += "\r\n";
    };
    line(t.columns, [](const std::string& s) { return s; });
    for (const auto& row : t.rows) line(row, [](const Value& v) { return value_to_string(v); });
    return out;
}

std::string render(const ResultTable& t, OutputFormat format) {
    switch (format) {
        case OutputFormat::table: return render_table(t);
        case OutputFormat::json: return render_json(t);
        case OutputFormat::csv: return render_csv(t);
    }
    return {};
}

ResultTable parse_json_table(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("malformed result JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("columns") || !j.contains("rows"))
        throw std::invalid_argument("result JSON needs columns and rows");
    ResultTable t;
    for (const auto& c : j["columns"]) t.columns.push_back(c.get<std::string>());
    for (const auto& r : j["rows"]) {
        std::vector<Value> row;
        for (const auto& v : r) {
            if (v.is_null())
                row.emplace_back(std::monostate{});
            else if (v.is_number_integer())
                row.emplace_back(v.get<std::int64_t>());
            else if (v.is_number_float())
                row.emplace_back(v.get<double>());
            else if (v.is_string())
                row.emplace_back(v.get<std::string>());
            else
                throw std::invalid_argument("unsupported JSON value in result row");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace aiql
