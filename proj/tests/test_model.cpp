#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <set>

#include "aiql/model.hpp"
#include "support.hpp"

using namespace aiql;

TEST(Model, DefaultAttribute) {
    EXPECT_EQ(default_attribute(EntityKind::file), "name");
    EXPECT_EQ(default_attribute(EntityKind::process), "exe_name");
    EXPECT_EQ(default_attribute(EntityKind::network), "dst_ip");
}

TEST(Model, DefaultAttributeIsInjective) {
    std::set<std::string_view> seen;
    for (auto k : {EntityKind::file, EntityKind::process, EntityKind::network}) seen.insert(default_attribute(k));
    EXPECT_EQ(seen.size(), 3u);
}

TEST(Model, ValidateEntity) {
    Entity ok{"p", EntityKind::process, AgentId{1}, {}};
    ok.attrs["exe_name"] = "cmd.exe";
    EXPECT_TRUE(validate_entity(ok).empty());

    Entity bad{"f", EntityKind::file, AgentId{1}, {}};
    bad.attrs["dst_ip"] = "1.2.3.4";
    auto v = validate_entity(bad);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field, "dst_ip");
    EXPECT_EQ(v[0].message, "dst_ip not valid for file");
}

TEST(Model, ValidateEventTimeOrder) {
    auto p = test::proc("p", 1, "a");
    auto f = test::file("f", 1, "x");
    auto e = test::event("e", 1, "p", OpType::read, "f", 100);
    e.end_time = Timestamp{50};
    auto v = validate_event(e, &p, &f);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message, "time order");
}

TEST(Model, ValidateEventSubjectMustBeProcess) {
    auto f = test::file("f", 1, "x");
    auto e = test::event("e", 1, "f", OpType::read, "f", 100);
    auto v = validate_event(e, &f, &f);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].field, "subject");
    EXPECT_FALSE(validate_event(e, nullptr, &f).empty());
}

TEST(Model, ConnectTargetsNetworkOrProcess) {
    EXPECT_TRUE(op_allowed(OpType::connect, EntityKind::network));
    EXPECT_TRUE(op_allowed(OpType::connect, EntityKind::process));
    EXPECT_FALSE(op_allowed(OpType::connect, EntityKind::file));
}

TEST(Model, MatchValueExamples) {
    EXPECT_TRUE(match_value("%apache%", "apache2"));
    EXPECT_TRUE(match_value(".viminfo", ".viminfo"));
    EXPECT_FALSE(match_value("%apache%", "nginx"));
    EXPECT_TRUE(match_value("%", ""));
    EXPECT_TRUE(match_value("a%c", "abbbc"));
    EXPECT_FALSE(match_value("a%c", "abbbd"));
    EXPECT_TRUE(match_value("%backup1.dmp", "C:\\BACKUP1.DMP"));
    EXPECT_TRUE(match_value("CMD.EXE", "cmd.exe"));
    EXPECT_FALSE(match_value("cmd", "cmd.exe"));
}

TEST(Model, MatchValueWithoutWildcardIsCaseFoldedEquality) {
    std::mt19937_64 rng(7);
    const std::string alphabet = "aAbB.c";
    auto word = [&] {
        std::string s;
        for (std::size_t n = rng() % 4; n > 0; --n) s += alphabet[rng() % alphabet.size()];
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        std::string a = word(), b = word(), c = word();
        EXPECT_EQ(match_value(a, b), fold_case(a) == fold_case(b));
        EXPECT_TRUE(match_value(a, a));
        EXPECT_EQ(match_value(a, b), match_value(b, a));
        if (match_value(a, b) && match_value(b, c)) EXPECT_TRUE(match_value(a, c));
    }
}

TEST(Model, WildcardMatchesRegexOracle) {
    std::mt19937_64 rng(11);
    const std::string alphabet = "ab%";
    for (int i = 0; i < 3000; ++i) {
        std::string pat, val;
        for (std::size_t n = rng() % 6; n > 0; --n) pat += alphabet[rng() % 3];
        for (std::size_t n = rng() % 7; n > 0; --n) val += alphabet[rng() % 2];
        if (pat.find('%') == std::string::npos) continue;
        std::string rx;
        for (char ch : pat) rx += ch == '%' ? ".*" : std::string(1, ch);
        EXPECT_EQ(match_value(pat, val), std::regex_match(val, std::regex(rx))) << pat << " " << val;
    }
}

TEST(Model, AttributeAliases) {
    EXPECT_EQ(canonical_entity_attribute(EntityKind::network, "dstip"), "dst_ip");
    EXPECT_EQ(canonical_entity_attribute(EntityKind::network, "dstport"), "dst_port");
    EXPECT_EQ(canonical_entity_attribute(EntityKind::process, "agentid"), "agentid");
    EXPECT_FALSE(canonical_entity_attribute(EntityKind::file, "dst_ip"));
    EXPECT_EQ(canonical_event_attribute("amount"), "amount");
}

TEST(Model, EventCategoryFollowsObjectKind) {
    auto c = test::random_corpus(3, {.hosts = 2, .events = 300});
    std::map<std::string, EntityKind> kinds;
    for (const auto& e : c.entities) kinds[e.id] = e.kind;
    for (const auto& ev : c.events) {
        const Entity* obj = nullptr;
        for (const auto& e : c.entities)
            if (e.id == ev.object) obj = &e;
        ASSERT_NE(obj, nullptr);
        EXPECT_EQ(event_category(*obj), kinds[ev.object]);
    }
}
