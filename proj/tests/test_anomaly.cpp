#include <gtest/gtest.h>

#include <cmath>

#include "aiql/anomaly.hpp"
#include "aiql/parser.hpp"
#include "support.hpp"

using namespace aiql;
using namespace aiql::test;

namespace {

ValueExpr having(const std::string& expr) {
    auto ctx = parse("(at \"01/01/2017\") window = 1 min, step = 10 sec proc p read ip i\n"
                     "return p, count(distinct i) as freq group by p having " + expr);
    return *ctx.returns.having;
}

/// One group "g" whose freq series is `values`, one entry per window.
WindowSeries series_of(const std::vector<double>& values) {
    WindowSeries s;
    s.columns = {"p.exe_name", "freq"};
    s.key = {true, false};
    WindowSeries::Group g;
    g.key = {Value{std::string("g")}};
    for (std::size_t k = 0; k < values.size(); ++k) {
        s.windows.push_back(TimeWindow{static_cast<std::int64_t>(k) * kSec, static_cast<std::int64_t>(k + 1) * kSec});
        g.entries.push_back({k, {Value{std::string("g")}, Value{values[k]}}});
    }
    s.groups.push_back(g);
    return s;
}

std::vector<std::size_t> alert_windows(const std::vector<Alert>& alerts) {
    std::vector<std::size_t> out;
    for (const auto& a : alerts) out.push_back(a.window);
    return out;
}

}  // namespace

TEST(Anomaly, WindowSlicesExamples) {
    EXPECT_EQ(window_slices({0, 120 * kSec}, 60 * kSec, 10 * kSec).size(), 7u);
    EXPECT_EQ(window_slices({0, 60 * kSec}, 60 * kSec, 10 * kSec).size(), 1u);
    EXPECT_TRUE(window_slices({0, 60 * kSec}, 61 * kSec, 10 * kSec).empty());
    auto w = window_slices({5, 125 * kSec + 5}, 60 * kSec, 10 * kSec);
    EXPECT_EQ(w[1], (TimeWindow{10 * kSec + 5, 70 * kSec + 5}));
    EXPECT_EQ(w.size(), 7u);
    EXPECT_EQ(w.back().end, 120 * kSec + 5);
}

TEST(Anomaly, WindowCountFormula) {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 2000; ++n) {
        const auto step = 1 + static_cast<std::int64_t>(rng() % 50);
        const auto length = step + static_cast<std::int64_t>(rng() % 200);
        const auto range = static_cast<std::int64_t>(rng() % 1000);
        const auto begin = static_cast<std::int64_t>(rng() % 1000);
        auto w = window_slices({begin, begin + range}, length, step);
        const std::size_t expected = range >= length ? static_cast<std::size_t>((range - length) / step + 1) : 0;
        ASSERT_EQ(w.size(), expected);
        for (const auto& x : w) ASSERT_TRUE(x.begin >= begin && x.end <= begin + range && x.end - x.begin == length);
    }
}

TEST(Anomaly, MovingAverageIdentities) {
    const std::vector<double> three{10, 1, 1};
    EXPECT_NEAR(*moving_average(MovingAverage::sma, three, 3).back(), 4.0, 1e-9);
    EXPECT_FALSE(moving_average(MovingAverage::sma, three, 3)[1]);
    const std::vector<double> two{1, 3};
    EXPECT_NEAR(*moving_average(MovingAverage::wma, two, 2).back(), 7.0 / 3.0, 1e-9);
    const std::vector<double> constant(20, 4.5);
    for (double alpha : {0.1, 0.5, 0.9, 1.0})
        for (auto v : moving_average(MovingAverage::ewma, constant, alpha)) EXPECT_NEAR(*v, 4.5, 1e-9);
    for (auto v : moving_average(MovingAverage::cma, constant, 0)) EXPECT_NEAR(*v, 4.5, 1e-9);
    EXPECT_THROW(moving_average(MovingAverage::sma, three, 0), SemanticError);
    EXPECT_THROW(moving_average(MovingAverage::ewma, three, 0), SemanticError);
    EXPECT_THROW(moving_average(MovingAverage::ewma, three, 1.5), SemanticError);
    EXPECT_EQ(moving_average_from_string("SMA"), MovingAverage::sma);
    EXPECT_EQ(moving_average_from_string("ewma"), MovingAverage::ewma);
    EXPECT_FALSE(moving_average_from_string("median"));
}

TEST(Anomaly, MovingAveragesMatchDefinitions) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-100, 100);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> x(1 + rng() % 30);
        for (auto& v : x) v = dist(rng);
        const auto n = 1 + static_cast<std::size_t>(rng() % 6);
        const double alpha = 0.05 + 0.95 * static_cast<double>(rng() % 1000) / 1000.0;
        auto sma = moving_average(MovingAverage::sma, x, static_cast<double>(n));
        auto wma = moving_average(MovingAverage::wma, x, static_cast<double>(n));
        auto cma = moving_average(MovingAverage::cma, x, 0);
        auto ewma = moving_average(MovingAverage::ewma, x, alpha);
        double e = x[0], sum = 0;
        const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
        for (std::size_t k = 0; k < x.size(); ++k) {
            sum += x[k];
            ASSERT_NEAR(*cma[k], sum / static_cast<double>(k + 1), 1e-9);
            if (k > 0) e = alpha * x[k] + (1 - alpha) * e;
            ASSERT_NEAR(*ewma[k], e, 1e-9);
            ASSERT_TRUE(*ewma[k] >= lo - 1e-9 && *ewma[k] <= hi + 1e-9);
            if (k + 1 < n) {
                ASSERT_FALSE(sma[k]);
                ASSERT_FALSE(wma[k]);
                continue;
            }
            double s = 0, w = 0;
            for (std::size_t i = 0; i < n; ++i) {
                s += x[k - i];
                w += static_cast<double>(n - i) * x[k - i];
            }
            ASSERT_NEAR(*sma[k], s / static_cast<double>(n), 1e-9);
            ASSERT_NEAR(*wma[k], w / (static_cast<double>(n * (n + 1)) / 2.0), 1e-9);
        }
        if (n == 1)
            for (std::size_t k = 0; k < x.size(); ++k) ASSERT_DOUBLE_EQ(*sma[k], x[k]);
    }
}

TEST(Anomaly, HavingQuery7Formula) {
    const auto expr = having("freq > 2 * (freq + freq[1] + freq[2]) / 3");
    EXPECT_EQ(alert_windows(eval_having(series_of({1, 1, 10}), expr)), std::vector<std::size_t>{2});
    EXPECT_TRUE(eval_having(series_of({5, 5, 5, 5, 5}), expr).empty());
    // Windows 0 and 1 lack lag-2 history even though they would pass.
    EXPECT_TRUE(eval_having(series_of({10, 10}), having("freq[2] >= 0 || freq > 0")).empty());
}

TEST(Anomaly, HistoryCountsOnlyPresentWindows) {
    WindowSeries s = series_of({1, 1, 10});
    s.windows.resize(6);
    for (std::size_t k = 3; k < 6; ++k) s.windows[k] = TimeWindow{static_cast<std::int64_t>(k) * kSec, static_cast<std::int64_t>(k + 1) * kSec};
    s.groups[0].entries[2].window = 5;  // absent from windows 2-4
    const auto expr = having("freq > 2 * (freq + freq[1] + freq[2]) / 3");
    EXPECT_EQ(alert_windows(eval_having(s, expr)), std::vector<std::size_t>{5});
    // Zero filling makes windows 2-4 zeros: freq[1] = freq[2] = 0 at window 5.
    auto filled = eval_having(s, expr, true);
    EXPECT_EQ(alert_windows(filled), std::vector<std::size_t>{5});
    EXPECT_TRUE(eval_having(s, having("freq > 0 && freq[1] == 0"), false).empty());
    EXPECT_EQ(alert_windows(eval_having(s, having("freq > 0 && freq[1] == 0"), true)), std::vector<std::size_t>{5});
}

TEST(Anomaly, BuiltinSmaEqualsExplicitFormula) {
    std::mt19937_64 rng(9);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> x(3 + rng() % 20);
        for (auto& v : x) v = static_cast<double>(rng() % 12);
        auto s = series_of(x);
        ASSERT_EQ(alert_windows(eval_having(s, having("freq > 2 * (freq + freq[1] + freq[2]) / 3"))),
                  alert_windows(eval_having(s, having("freq > 2 * SMA(freq, 3)"))));
        ASSERT_EQ(alert_windows(eval_having(s, having("freq > 1.5 * (2 * freq + freq[1]) / 3"))),
                  alert_windows(eval_having(s, having("freq > 1.5 * WMA(freq, 2)"))));
    }
}

TEST(Anomaly, UnknownAliasIsSemanticError) {
    EXPECT_THROW(parse("(at \"01/01/2017\") window = 1 min, step = 10 sec proc p read ip i\n"
                       "return p, count(i) as freq group by p having zz > 1"),
                 SemanticError);
    EXPECT_THROW(parse("(at \"01/01/2017\") window = 1 min, step = 10 sec proc p read ip i as e1\n"
                       "proc p write file f as e2 return p, count(i) as freq group by p having freq > 1"),
                 SemanticError);
}

namespace {

Store spiky_store(std::int64_t shift) {
    std::vector<Entity> ents{proc("p", 1, "steady"), proc("q", 1, "spike")};
    for (int i = 0; i < 12; ++i) ents.push_back(net("i" + std::to_string(i), 1, "10.0.0." + std::to_string(i)));
    std::vector<Event> evs;
    int n = 0;
    auto add = [&](const std::string& who, int ip, std::int64_t t) {
        evs.push_back(event("e" + std::to_string(n++), 1, who, OpType::read, "i" + std::to_string(ip), kJan1 + t + shift));
    };
    for (std::int64_t t = 0; t < 300 * kSec; t += 5 * kSec) {
        add("p", 0, t);
        add("q", 1, t);
    }
    for (int i = 2; i < 12; ++i) add("q", i, 200 * kSec + i * kSec);
    return make_store(ents, evs);
}

}  // namespace

TEST(Anomaly, AggregateWindowsCountsDistinct) {
    Store s = spiky_store(0);
    auto ctx = parse("(from \"2017-01-01T00:00:00Z\" to \"2017-01-01T00:06:00Z\") window = 1 min, step = 1 min\n"
                     "proc p read ip i return p, count(distinct i) as freq, count(i) as n group by p");
    auto series = aggregate_windows(s, ctx);
    ASSERT_EQ(series.windows.size(), 6u);
    ASSERT_EQ(series.groups.size(), 2u);
    const auto& spike = series.groups[0];  // "spike" < "steady"
    EXPECT_EQ(value_to_string(spike.key[0]), "spike");
    ASSERT_EQ(spike.entries.size(), 5u);
    EXPECT_EQ(value_to_string(spike.entries[0].values[1]), "1");
    EXPECT_EQ(value_to_string(spike.entries[0].values[2]), "12");
    EXPECT_EQ(value_to_string(spike.entries[3].values[1]), "11");
    EXPECT_EQ(value_to_string(spike.entries[3].values[2]), "22");
}

TEST(Anomaly, ShiftEquivariance) {
    const std::string text =
        "(from \"2017-01-01T00:00:00Z\" to \"2017-01-01T00:10:00Z\") window = 1 min, step = 10 sec\n"
        "proc p read ip i return p, count(distinct i) as freq group by p\n"
        "having freq > 2 * (freq + freq[1] + freq[2]) / 3";
    auto ctx = parse(text);
    Store a = spiky_store(0);
    Store b = spiky_store(10 * kSec);
    auto alerts_a = eval_having(aggregate_windows(a, ctx), *ctx.returns.having);
    auto alerts_b = eval_having(aggregate_windows(b, ctx), *ctx.returns.having);
    ASSERT_FALSE(alerts_a.empty());
    ASSERT_EQ(alerts_a.size(), alerts_b.size());
    for (std::size_t k = 0; k < alerts_a.size(); ++k) {
        EXPECT_EQ(alerts_b[k].window, alerts_a[k].window + 1);
        EXPECT_EQ(alerts_b[k].values, alerts_a[k].values);
    }
}

TEST(Anomaly, ResultTableLayout) {
    Store s = spiky_store(0);
    auto ctx = parse(
        "(from \"2017-01-01T00:00:00Z\" to \"2017-01-01T00:10:00Z\") window = 1 min, step = 10 sec\n"
        "proc p read ip i return p, count(distinct i) as freq group by p\n"
        "having freq > 2 * (freq + freq[1] + freq[2]) / 3");
    auto t = run_query(s, ctx);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"p.exe_name", "window", "window_start", "freq"}));
    ASSERT_FALSE(t.rows.empty());
    for (const auto& row : t.rows) EXPECT_EQ(value_to_string(row[0]), "spike");
    EXPECT_EQ(value_to_string(t.rows[0][2]).substr(0, 11), "2017-01-01T");
}

TEST(Anomaly, AverageOverAmounts) {
    std::vector<Event> evs{event("a", 1, "p", OpType::write, "i", kJan1 + 1 * kSec, 100),
                           event("b", 1, "p", OpType::write, "i", kJan1 + 2 * kSec, 300),
                           event("c", 1, "p", OpType::write, "i", kJan1 + 70 * kSec, 50)};
    Store s = make_store({proc("p", 1, "sqlservr"), net("i", 1, "203.0.113.129")}, evs);
    auto ctx = parse("(from \"2017-01-01T00:00:00Z\" to \"2017-01-01T00:02:00Z\") window = 1 min, step = 1 min\n"
                     "proc p write ip i as evt return p, avg(evt.amount) as amt group by p");
    auto series = aggregate_windows(s, ctx);
    ASSERT_EQ(series.groups.size(), 1u);
    ASSERT_EQ(series.groups[0].entries.size(), 2u);
    EXPECT_EQ(value_to_string(series.groups[0].entries[0].values[1]), "200.0");
    EXPECT_EQ(value_to_string(series.groups[0].entries[1].values[1]), "50.0");
}
