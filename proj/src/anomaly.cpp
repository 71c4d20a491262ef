// Sliding-window anomaly evaluation.

#include "aiql/anomaly.hpp"

#include <algorithm>
#include <map>

#include "value_ops.hpp"

namespace aiql {

std::vector<TimeWindow> window_slices(TimeWindow range, std::int64_t length_ms, std::int64_t step_ms) {
    std::vector<TimeWindow> out;
    if (length_ms <= 0 || step_ms <= 0 || range.end - range.begin < length_ms) return out;
    const std::int64_t n = (range.end - range.begin - length_ms) / step_ms + 1;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        std::int64_t b = range.begin + k * step_ms;
        out.push_back({b, b + length_ms});
    }
    return out;
}

std::optional<MovingAverage> moving_average_from_string(std::string_view name) {
    std::string n = fold_case(name);
    if (n == "sma") return MovingAverage::sma;
    if (n == "cma") return MovingAverage::cma;
    if (n == "wma") return MovingAverage::wma;
    if (n == "ewma") return MovingAverage::ewma;
    return std::nullopt;
}

std::vector<std::optional<double>> moving_average(MovingAverage kind, std::span<const double> x, double param) {
    std::vector<std::optional<double>> out(x.size());
    switch (kind) {
        case MovingAverage::sma:
        case MovingAverage::wma: {
            if (param < 1.0 || param != static_cast<double>(static_cast<std::int64_t>(param)))
                throw SemanticError("moving average window must be a positive integer", "", {});
            const auto n = static_cast<std::size_t>(param);
            const double weight_sum = static_cast<double>(n * (n + 1) / 2);
            for (std::size_t k = n - 1; k < x.size(); ++k) {
                double acc = 0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += (kind == MovingAverage::sma ? 1.0 : static_cast<double>(n - i)) * x[k - i];
                out[k] = acc / (kind == MovingAverage::sma ? static_cast<double>(n) : weight_sum);
            }
            return out;
        }
        case MovingAverage::cma: {
            double acc = 0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                acc += x[k];
                out[k] = acc / static_cast<double>(k + 1);
            }
            return out;
        }
        case MovingAverage::ewma: {
            if (!(param > 0.0 && param <= 1.0))
                throw SemanticError("EWMA smoothing factor must be in (0, 1]", "", {});
            for (std::size_t k = 0; k < x.size(); ++k)
                out[k] = k == 0 ? x[0] : param * x[k] + (1.0 - param) * *out[k - 1];
            return out;
        }
    }
    return out;
}

namespace {

using Row = std::vector<Value>;

struct RowLess {
    bool operator()(const Row& a, const Row& b) const {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            if (int c = detail::compare_values(a[i], b[i])) return c < 0;
        return a.size() < b.size();
    }
};

void require_anomaly(const QueryContext& ctx) {
    if (ctx.patterns.size() != 1)
        throw SemanticError("anomaly queries take exactly one event pattern", "", {});
    if (!ctx.globals.window || !ctx.globals.sliding)
        throw SemanticError("anomaly queries need a global time window and a sliding window", "window", {});
}

int column_index(const WindowSeries& s, const std::string& name) {
    for (std::size_t c = 0; c < s.columns.size(); ++c)
        if (s.columns[c] == name) return static_cast<int>(c);
    throw SemanticError("unknown alias '" + name + "'", name, {});
}

}  // namespace

WindowSeries aggregate_windows(const Store& store, const QueryContext& ctx, const ExecuteOptions& options) {
    require_anomaly(ctx);
    const auto& spec = ctx.returns;
    WindowSeries series;
    series.windows = window_slices(*ctx.globals.window, ctx.globals.sliding->length_ms, ctx.globals.sliding->step_ms);
    for (const auto& item : spec.items) {
        series.columns.push_back(item.column_name());
        series.key.push_back(item.agg == Aggregate::none);
    }
    if (series.windows.empty()) return series;

    std::vector<const ReturnItem*> key_items;
    if (!spec.group_by.empty()) {
        for (const auto& g : spec.group_by) key_items.push_back(&g);
    } else {
        for (const auto& i : spec.items)
            if (i.agg == Aggregate::none) key_items.push_back(&i);
    }

    const EventIdSet events = store.execute(synthesize_data_query(ctx.patterns.front(), ctx.globals), options);
    const std::int64_t origin = series.windows.front().begin;
    const std::int64_t length = ctx.globals.sliding->length_ms;
    const std::int64_t step = ctx.globals.sliding->step_ms;
    const auto last = static_cast<std::int64_t>(series.windows.size()) - 1;

    std::map<Row, std::map<std::size_t, std::vector<EventIndex>>, RowLess> buckets;
    for (EventIndex ev : events.ids()) {
        const std::int64_t t = store.start_of(ev) - origin;
        if (t < 0) continue;
        // Windows k with k*step <= t < k*step + length.
        std::int64_t hi = std::min(last, t / step);
        std::int64_t lo = t - length + 1 <= 0 ? 0 : (t - length + 1 + step - 1) / step;
        if (lo > hi) continue;
        Row key;
        for (const auto* k : key_items) key.push_back(detail::slot_value(store, ev, k->role, k->attribute));
        auto& per_window = buckets[key];
        for (std::int64_t k = lo; k <= hi; ++k) per_window[static_cast<std::size_t>(k)].push_back(ev);
    }

    for (auto& [key, per_window] : buckets) {
        WindowSeries::Group group;
        group.key = key;
        for (auto& [w, evs] : per_window) {
            WindowSeries::Entry entry;
            entry.window = w;
            bool emit = true;
            for (const auto& item : spec.items) {
                if (item.agg == Aggregate::none) {
                    entry.values.push_back(detail::slot_value(store, evs.front(), item.role, item.attribute));
                    continue;
                }
                std::vector<Value> values;
                values.reserve(evs.size());
                for (EventIndex ev : evs) values.push_back(detail::slot_value(store, ev, item.role, item.attribute));
                Value v = detail::aggregate(item.agg, item.distinct, std::move(values));
                if (item.agg == Aggregate::avg && std::holds_alternative<std::monostate>(v)) emit = false;
                entry.values.push_back(std::move(v));
            }
            if (emit) group.entries.push_back(std::move(entry));
        }
        if (!group.entries.empty()) series.groups.push_back(std::move(group));
    }
    return series;
}

std::vector<Alert> eval_having(const WindowSeries& series, const ValueExpr& expr, bool zero_fill) {
    std::vector<Alert> alerts;
    for (std::size_t g = 0; g < series.groups.size(); ++g) {
        std::vector<WindowSeries::Entry> entries = series.groups[g].entries;
        if (zero_fill && !entries.empty()) {
            std::vector<WindowSeries::Entry> filled;
            std::size_t next = 0;
            for (std::size_t w = entries.front().window; w < series.windows.size(); ++w) {
                if (next < entries.size() && entries[next].window == w) {
                    filled.push_back(entries[next++]);
                    continue;
                }
                WindowSeries::Entry blank;
                blank.window = w;
                for (std::size_t c = 0; c < series.columns.size(); ++c)
                    blank.values.push_back(series.key[c] ? entries.front().values[c] : Value{std::int64_t{0}});
                filled.push_back(std::move(blank));
            }
            entries = std::move(filled);
        }

        std::map<const ValueExpr*, std::vector<std::optional<double>>> averages;
        for (std::size_t j = 0; j < entries.size(); ++j) {
            auto ref = [&](const std::string& name, std::int64_t lag) -> std::optional<Value> {
                if (lag < 0 || static_cast<std::size_t>(lag) > j) return std::nullopt;
                return entries[j - static_cast<std::size_t>(lag)].values[static_cast<std::size_t>(column_index(series, name))];
            };
            auto call = [&](const ValueExpr& e) -> std::optional<double> {
                auto it = averages.find(&e);
                if (it == averages.end()) {
                    auto kind = moving_average_from_string(e.text);
                    if (!kind) throw SemanticError("unknown function '" + e.text + "'", e.text, e.span.at);
                    auto c = static_cast<std::size_t>(column_index(series, e.args[0].text));
                    std::vector<double> xs;
                    xs.reserve(entries.size());
                    std::vector<bool> defined;
                    for (const auto& en : entries) {
                        auto n = detail::as_number(en.values[c]);
                        xs.push_back(n.value_or(0.0));
                        defined.push_back(n.has_value());
                    }
                    double param = e.args.size() > 1 ? e.args[1].number : 0.0;
                    auto ma = moving_average(*kind, xs, param);
                    // An undefined input poisons every average that includes it.
                    auto first_missing = std::find(defined.begin(), defined.end(), false);
                    for (auto k = static_cast<std::size_t>(first_missing - defined.begin()); k < ma.size(); ++k)
                        ma[k].reset();
                    it = averages.emplace(&e, std::move(ma)).first;
                }
                return it->second[j];
            };
            auto v = detail::eval_expr(expr, ref, call);
            if (v && detail::truthy(*v)) alerts.push_back({g, entries[j].window, entries[j].values});
        }
    }
    std::stable_sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
        return a.window != b.window ? a.window < b.window : a.group < b.group;
    });
    return alerts;
}

ResultTable anomaly_results(const Store& store, const QueryContext& ctx, const ExecuteOptions& options,
                            bool zero_fill) {
    WindowSeries series = aggregate_windows(store, ctx, options);
    const auto& spec = ctx.returns;

    std::vector<Alert> alerts;
    if (spec.having) {
        alerts = eval_having(series, *spec.having, zero_fill);
    } else {
        for (std::size_t g = 0; g < series.groups.size(); ++g)
            for (const auto& e : series.groups[g].entries) alerts.push_back({g, e.window, e.values});
        std::stable_sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
            return a.window != b.window ? a.window < b.window : a.group < b.group;
        });
    }

    ResultTable table;
    std::vector<std::size_t> position(series.columns.size());
    for (std::size_t c = 0; c < series.columns.size(); ++c)
        if (series.key[c]) {
            position[c] = table.columns.size();
            table.columns.push_back(series.columns[c]);
        }
    const std::size_t wcol = table.columns.size();
    table.columns.push_back("window");
    table.columns.push_back("window_start");
    for (std::size_t c = 0; c < series.columns.size(); ++c)
        if (!series.key[c]) {
            position[c] = table.columns.size();
            table.columns.push_back(series.columns[c]);
        }

    for (const auto& a : alerts) {
        std::vector<Value> row(table.columns.size());
        for (std::size_t c = 0; c < series.columns.size(); ++c) row[position[c]] = a.values[c];
        row[wcol] = static_cast<std::int64_t>(a.window);
        row[wcol + 1] = format_iso8601(series.windows[a.window].begin);
        table.rows.push_back(std::move(row));
    }

    if (!spec.sort_by.empty()) {
        std::stable_sort(table.rows.begin(), table.rows.end(), [&](const Row& a, const Row& b) {
            for (const auto& key : spec.sort_by) {
                auto col = static_cast<std::size_t>(key.column);
                if (col >= position.size()) continue;
                auto c = position[col];
                if (int d = detail::compare_values(a[c], b[c])) return spec.descending ? d > 0 : d < 0;
            }
            return false;
        });
    }
    if (spec.top && *spec.top >= 0 && static_cast<std::size_t>(*spec.top) < table.rows.size())
        table.rows.resize(static_cast<std::size_t>(*spec.top));
    return table;
}

}  // namespace aiql
