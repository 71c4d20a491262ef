#include <gtest/gtest.h>

#include "aiql/engine.hpp"
#include "aiql/parser.hpp"
#include "support.hpp"

using namespace aiql;
using namespace aiql::test;

namespace {

/// random_query with its global window replaced by `window`.
std::string with_window(std::uint64_t seed, const std::string& window) {
    std::string text = random_query(seed);
    if (text.rfind("(from", 0) == 0) text = text.substr(text.find('\n') + 1);
    return window + "\n" + text;
}

}  // namespace

TEST(Parallel, ThreeDayWindowGivesThreeParts) {
    auto ctx = parse("(from \"01/01/2017\" to \"01/04/2017\") proc p read file f return p");
    auto parts = partition_time_window(ctx);
    ASSERT_EQ(parts.size(), 3u);
    for (std::size_t d = 0; d < 3; ++d) {
        const std::int64_t begin = kJan1 + static_cast<std::int64_t>(d) * 24 * kHour;
        EXPECT_EQ(parts[d].globals.window, (TimeWindow{begin, begin + 24 * kHour}));
    }
}

TEST(Parallel, PartialDaysAreClipped) {
    auto ctx = parse("(from \"2017-01-01T20:00:00Z\" to \"2017-01-02T03:00:00Z\") proc p read file f return p");
    auto parts = partition_time_window(ctx);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0].globals.window, (TimeWindow{kJan1 + 20 * kHour, kJan1 + 24 * kHour}));
    EXPECT_EQ(parts[1].globals.window, (TimeWindow{kJan1 + 24 * kHour, kJan1 + 27 * kHour}));
}

TEST(Parallel, OneDayIsIdentity) {
    auto ctx = parse("(at \"01/01/2017\") proc p read file f return p");
    auto parts = partition_time_window(ctx);
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts[0], ctx);
    auto open = parse("proc p read file f return p");
    EXPECT_EQ(partition_time_window(open).size(), 1u);
}

TEST(Parallel, SpanBound) {
    EXPECT_EQ(temporal_span_bound(parse(
                  "proc p read file f as e1 proc q read file g as e2 proc r read file h as e3\n"
                  "with e1 before[1-2 min] e2, e3 within[0-5 min] e2\nreturn p")),
              7 * kMin);
    EXPECT_FALSE(temporal_span_bound(parse(
        "proc p read file f as e1 proc q read file g as e2\nwith e1 before e2\nreturn p")));
    EXPECT_FALSE(temporal_span_bound(parse(
        "proc p read file f as e1 proc q read file g as e2 proc r read file h as e3\n"
        "with e1 before[1-2 min] e2, p = r\nreturn p")));
    EXPECT_EQ(temporal_span_bound(parse("proc p read file f return p")), 0);
}

TEST(Parallel, ParallelEqualsSerialOnMultiDayCorpora) {
    const std::string window = "(from \"2017-01-01T00:00:00Z\" to \"2017-01-04T00:00:00Z\")";
    std::size_t nonempty = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto c = random_corpus(seed, {.hosts = 2, .events = 1200, .begin = kJan1 + 12 * kHour, .span = 48 * kHour});
        Store s = make_store(c.entities, c.events);
        for (std::uint64_t k = 0; k < 8; ++k) {
            auto ctx = parse(with_window(seed * 71 + k, window));
            EngineOptions serial;
            EngineOptions parallel;
            parallel.workers = 4;
            auto expected = oracle_rows(s, ctx);
            auto one = execute_tuples(s, ctx, serial);
            auto many = execute_tuples(s, ctx, parallel);
            ASSERT_EQ(one.rows(), expected) << with_window(seed * 71 + k, window);
            ASSERT_EQ(many, one);
            parallel.scheduler = SchedulerKind::fetch_filter;
            ASSERT_EQ(execute_tuples(s, ctx, parallel), one);
            nonempty += !expected.empty();
        }
    }
    EXPECT_GT(nonempty, 30u);
}

TEST(Parallel, CrossDayRangedRelationshipIsFound) {
    // One tuple straddles midnight by 90 seconds.
    Store s = make_store({proc("p", 1, "a"), file("f", 1, "x"), file("g", 1, "y")},
                         {event("e1", 1, "p", OpType::read, "f", kJan1 + 24 * kHour - 45 * kSec),
                          event("e2", 1, "p", OpType::write, "g", kJan1 + 24 * kHour + 45 * kSec),
                          event("e3", 1, "p", OpType::write, "g", kJan1 + 24 * kHour + 10 * kMin)});
    auto ctx = parse(
        "(from \"01/01/2017\" to \"01/03/2017\")\nproc p read file f as e1\nproc p write file g as e2\n"
        "with e1 before[1-2 min] e2\nreturn e1.id, e2.id");
    EngineOptions o;
    o.workers = 8;
    auto rows = execute_tuples(s, ctx, o).rows();
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(s.event(rows[0][1]).id, "e2");
}
