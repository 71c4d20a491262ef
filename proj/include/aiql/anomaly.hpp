#pragma once

// Sliding-window anomaly evaluation: per-window aggregates per group,
// history references name[k] and moving-average built-ins.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aiql/engine.hpp"

namespace aiql {

/// W_k = [begin + k*step, begin + k*step + length) while W_k fits in range.
std::vector<TimeWindow> window_slices(TimeWindow range, std::int64_t length_ms, std::int64_t step_ms);

struct WindowSeries {
    std::vector<TimeWindow> windows;
    /// Return-item column names; `key` marks group-by (non-aggregate) items.
    std::vector<std::string> columns;
    std::vector<bool> key;

    struct Entry {
        std::size_t window = 0;
        std::vector<Value> values;  // one per column
    };
    struct Group {
        std::vector<Value> key;      // group-by values
        std::vector<Entry> entries;  // ascending window index
    };
    std::vector<Group> groups;  // ascending key order
};

/// Aggregates the single pattern of an anomaly context per window and group.
WindowSeries aggregate_windows(const Store& store, const QueryContext& ctx, const ExecuteOptions& options = {});

struct Alert {
    std::size_t group = 0;  // index into WindowSeries::groups
    std::size_t window = 0;
    std::vector<Value> values;
};

/// Groups absent from a window contribute no history entry unless
/// `zero_fill`, which inserts zero-valued entries for every window after a
/// group's first appearance. Entries lacking the history an expression needs
/// are skipped.
std::vector<Alert> eval_having(const WindowSeries& series, const ValueExpr& expr, bool zero_fill = false);

enum class MovingAverage : std::uint8_t { sma, cma, wma, ewma };

std::optional<MovingAverage> moving_average_from_string(std::string_view name);

/// Value per index; nullopt where undefined (SMA/WMA before n values).
/// Throws SemanticError for n < 1 or alpha outside (0, 1].
std::vector<std::optional<double>> moving_average(MovingAverage kind, std::span<const double> series, double param);

/// Alert table: group-by columns, window index, window start, aggregate
/// columns; sort by and top apply afterwards.
ResultTable anomaly_results(const Store& store, const QueryContext& ctx, const ExecuteOptions& options = {},
                            bool zero_fill = false);

}  // namespace aiql
