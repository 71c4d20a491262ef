#include <gtest/gtest.h>

#include <random>

#include "aiql/render.hpp"

using namespace aiql;

namespace {

ResultTable sample() {
    ResultTable t;
    t.columns = {"name", "n", "x"};
    t.rows = {{Value{std::string("vim")}, Value{std::int64_t{3}}, Value{2.5}},
              {Value{std::string("a,\"b\"\nc")}, Value{std::int64_t{-1}}, Value{}},
              {Value{std::string("")}, Value{std::int64_t{0}}, Value{1.0}}};
    return t;
}

}  // namespace

TEST(Render, Formats) {
    EXPECT_EQ(output_format_from_string("json"), OutputFormat::json);
    EXPECT_EQ(output_format_from_string("csv"), OutputFormat::csv);
    EXPECT_EQ(output_format_from_string("table"), OutputFormat::table);
    EXPECT_FALSE(output_format_from_string("xml"));
}

TEST(Render, Json) {
    ResultTable t;
    t.columns = {"a", "b"};
    t.rows = {{Value{std::string("x")}, Value{}}, {Value{std::int64_t{2}}, Value{0.5}}};
    EXPECT_EQ(render_json(t), "{\"columns\":[\"a\",\"b\"],\"rows\":[[\"x\",null],[2,0.5]]}\n");
}

TEST(Render, JsonRoundTrip) {
    EXPECT_EQ(parse_json_table(render_json(sample())), sample());
    std::mt19937_64 rng(1);
    for (int round = 0; round < 200; ++round) {
        ResultTable t;
        const std::size_t cols = 1 + rng() % 4;
        for (std::size_t c = 0; c < cols; ++c) t.columns.push_back("c" + std::to_string(c));
        for (std::size_t r = 0; r < rng() % 5; ++r) {
            std::vector<Value> row;
            for (std::size_t c = 0; c < cols; ++c) {
                switch (rng() % 4) {
                    case 0: row.emplace_back(); break;
                    case 1: row.emplace_back(static_cast<std::int64_t>(rng()) >> 1); break;
                    case 2: row.emplace_back(static_cast<double>(static_cast<std::int64_t>(rng() % 100000)) / 7.0); break;
                    default: row.emplace_back(std::string(1 + rng() % 3, static_cast<char>('a' + rng() % 26)) + "\"\\\t"); break;
                }
            }
            t.rows.push_back(std::move(row));
        }
        ASSERT_EQ(parse_json_table(render_json(t)), t);
    }
    EXPECT_THROW(parse_json_table("{\"columns\": 3}"), std::invalid_argument);
    EXPECT_THROW(parse_json_table("not json"), std::invalid_argument);
}

TEST(Render, CsvQuoting) {
    EXPECT_EQ(render_csv(sample()),
              "name,n,x\r\nvim,3,2.5\r\n\"a,\"\"b\"\"\nc\",-1,\r\n,0,1.0\r\n");
}

TEST(Render, Table) {
    ResultTable t;
    t.columns = {"name", "n"};
    t.rows = {{Value{std::string("vim")}, Value{std::int64_t{12}}}};
    const std::string out = render_table(t);
    EXPECT_NE(out.find("name | n"), std::string::npos) << out;
    EXPECT_NE(out.find("-+-"), std::string::npos);
    EXPECT_NE(out.find("vim  | 12"), std::string::npos) << out;
    EXPECT_NE(out.find("(1 row"), std::string::npos) << out;
    EXPECT_EQ(render(t, OutputFormat::json), render_json(t));
}
