#include <doctest.h>

#include <random>
#include <set>

#include "toxtrace/datetime.hpp"
#include "toxtrace/error.hpp"
#include "toxtrace/trends.hpp"

using namespace toxtrace;

namespace {

TweetRecord rec(std::string id, const char* stamp, std::string text = "") {
    TweetRecord r;
    r.id = std::move(id);
    r.author = "a";
    r.created_at = parse_rfc3339(stamp);
    r.text = std::move(text);
    r.hashtags = extract_hashtags(r.text);
    return r;
}

GraphEdge mention(std::string source, std::string target, std::string record_id) {
    return {std::move(source), std::move(target), Relation::mention, std::move(record_id)};
}

} // namespace

TEST_CASE("daily volumes group by UTC day and category") {
    Corpus c;
    c.records = {
        rec("t1", "2022-05-06T01:00:00Z"),
        rec("t2", "2022-05-06T23:59:59Z"),
        rec("t3", "2022-05-06T12:00:00Z"),
        rec("t4", "2022-05-07T00:00:00Z"), // first second of the next day
    };
    DailySeries s = daily_volume(c, {"D", "D", "O", "D"});
    REQUIRE(s.by_day.size() == 2);
    std::int64_t may6 = utc_day_of(parse_rfc3339("2022-05-06T00:00:00Z"));
    CHECK(s.by_day.at(may6).at("D") == 2);
    CHECK(s.by_day.at(may6).at("O") == 1);
    CHECK(s.by_day.at(may6 + 1).at("D") == 1);
    CHECK(s.total() == 4);

    DailySeries empty = daily_volume(Corpus{}, {});
    CHECK(empty.by_day.empty());
    CHECK(empty.total() == 0);
}

TEST_CASE("daily volumes demand one category per record") {
    Corpus c;
    c.records = {rec("t1", "2022-05-06T01:00:00Z")};
    CHECK_THROWS_WITH_AS(daily_volume(c, {}), "daily_volume: one category per record required",
                         Error);
    CHECK_THROWS_WITH_AS(daily_volume(c, {""}), "daily_volume: record 't1' has no category",
                         Error);
}

TEST_CASE("weekly composition turns counts into shares") {
    Corpus c;
    c.records = {
        rec("t1", "2022-05-06T01:00:00Z"), // 2022-W18
        rec("t2", "2022-05-07T01:00:00Z"), // 2022-W18
        rec("t3", "2022-05-09T01:00:00Z"), // monday of 2022-W19
        rec("t4", "2022-05-10T01:00:00Z"),
        rec("t5", "2022-05-11T01:00:00Z"),
        rec("t6", "2022-05-12T01:00:00Z"),
    };
    DailySeries s = daily_volume(c, {"D", "O", "D", "D", "D", "P"});
    CompositionTable table = composition(s);

    REQUIRE(table.weekly.size() == 2);
    CHECK(table.weekly.at("2022-W18").at("D") == doctest::Approx(0.5));
    CHECK(table.weekly.at("2022-W18").at("O") == doctest::Approx(0.5));
    CHECK(table.weekly.at("2022-W19").at("D") == doctest::Approx(0.75));
    CHECK(table.weekly.at("2022-W19").at("P") == doctest::Approx(0.25));
    CHECK(table.weekly.at("2022-W19").count("O") == 0); // absent, not zero

    CHECK(table.overall.at("D") == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(table.overall.at("O") == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(table.overall.at("P") == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    for (const auto& [week, shares] : table.weekly) {
        double sum = 0.0;
        for (const auto& [code, share] : shares) sum += share;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    double overall_sum = 0.0;
    for (const auto& [code, share] : table.overall) overall_sum += share;
    CHECK(overall_sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("composition reproduces a planted category mix") {
    // 1000 records: 467 D, 193 H, 239 O, 60 P, 41 R within a single week
    const std::vector<std::pair<std::string, int>> plan = {
        {"D", 467}, {"H", 193}, {"O", 239}, {"P", 60}, {"R", 41}};
    Corpus c;
    std::vector<std::string> categories;
    int i = 0;
    for (const auto& [code, count] : plan)
        for (int k = 0; k < count; ++k) {
            c.records.push_back(rec("t" + std::to_string(i++), "2022-05-06T01:00:00Z"));
            categories.push_back(code);
        }
    CompositionTable table = composition(daily_volume(c, categories));
    CHECK(table.overall.at("D") == doctest::Approx(0.467).epsilon(1e-12));
    CHECK(table.overall.at("H") == doctest::Approx(0.193).epsilon(1e-12));
    CHECK(table.overall.at("O") == doctest::Approx(0.239).epsilon(1e-12));
    CHECK(table.overall.at("P") == doctest::Approx(0.060).epsilon(1e-12));
    CHECK(table.overall.at("R") == doctest::Approx(0.041).epsilon(1e-12));
}

TEST_CASE("top days rank by count with earlier dates first on ties") {
    Corpus c;
    c.records = {
        rec("t1", "2022-05-06T01:00:00Z"), rec("t2", "2022-05-06T02:00:00Z"),
        rec("t3", "2022-05-08T01:00:00Z"), rec("t4", "2022-05-08T02:00:00Z"),
        rec("t5", "2022-05-07T01:00:00Z"),
    };
    DailySeries s = daily_volume(c, std::vector<std::string>(5, "D"));
    auto top = top_days(s, 2);
    REQUIRE(top.size() == 2);
    std::int64_t may6 = utc_day_of(parse_rfc3339("2022-05-06T00:00:00Z"));
    CHECK(top[0] == std::pair<std::int64_t, std::int64_t>{may6, 2}); // tie, earlier day
    CHECK(top[1] == std::pair<std::int64_t, std::int64_t>{may6 + 2, 2});
    CHECK(top_days(s, 100).size() == 3);
    CHECK(format_date(top[0].first) == "2022-05-06");
}

TEST_CASE("hashtag counts keep multiplicity and break ties by tag") {
    Corpus c;
    c.records = {
        rec("t1", "2022-05-06T01:00:00Z", "#Mpox update #mpox"),
        rec("t2", "2022-05-06T02:00:00Z", "#mpox and #who"),
        rec("t3", "2022-05-06T03:00:00Z", "#who plus #abc"),
    };
    auto counts = hashtag_counts(c, 2);
    REQUIRE(counts.size() == 2);
    CHECK(counts[0] == std::pair<std::string, std::int64_t>{"mpox", 3});
    CHECK(counts[1] == std::pair<std::string, std::int64_t>{"who", 2});

    auto all = hashtag_counts(c, 10);
    REQUIRE(all.size() == 3);
    CHECK(all[2] == std::pair<std::string, std::int64_t>{"abc", 1});

    std::int64_t total = 0;
    for (const auto& [tag, n] : all) total += n;
    std::int64_t expected = 0;
    for (const TweetRecord& r : c.records)
        expected += static_cast<std::int64_t>(extract_hashtags(r.text).size());
    CHECK(total == expected);

    CHECK(hashtag_counts(c, 0).empty());
    CHECK(hashtag_counts(Corpus{}, 5).empty());

    // equal counts sort alphabetically
    Corpus tie;
    tie.records = {rec("t1", "2022-05-06T01:00:00Z", "#zz #aa")};
    auto pairs = hashtag_counts(tie, 2);
    CHECK(pairs[0].first == "aa");
    CHECK(pairs[1].first == "zz");
}

TEST_CASE("mention targets tally distinct tweets per category") {
    std::vector<GraphEdge> edges = {
        mention("u1", "alice", "t1"),
        mention("u1", "alice", "t1"), // same tweet naming alice twice
        mention("u2", "alice", "t2"),
        mention("u2", "bob", "t2"),
        mention("u3", "alice", "t3"),
    };
    std::unordered_map<std::string, std::string> category = {
        {"t1", "D"}, {"t2", "D"}, {"t3", "P"}};
    auto tally = user_category_mentions(edges, category);
    REQUIRE(tally.size() == 2);
    CHECK(tally.at("alice").at("D") == 2); // t1 counted once
    CHECK(tally.at("alice").at("P") == 1);
    CHECK(tally.at("bob").at("D") == 1);
    CHECK(tally.at("bob").count("P") == 0);

    CHECK(user_category_mentions({}, {}).empty());

    std::unordered_map<std::string, std::string> missing = {{"t1", "D"}};
    CHECK_THROWS_AS(user_category_mentions(edges, missing), Error);
    std::unordered_map<std::string, std::string> blank = category;
    blank["t3"] = "";
    CHECK_THROWS_AS(user_category_mentions(edges, blank), Error);
}

TEST_CASE("mention tallies match a brute-force recount") {
    std::mt19937 rng(123);
    std::uniform_int_distribution<int> user(0, 5), tweet(0, 19), cat(0, 2);
    const char* codes[] = {"D", "H", "R"};
    std::unordered_map<std::string, std::string> category;
    for (int t = 0; t < 20; ++t) category["t" + std::to_string(t)] = codes[cat(rng)];

    std::vector<GraphEdge> edges;
    for (int i = 0; i < 120; ++i) {
        std::string id = "t" + std::to_string(tweet(rng));
        edges.push_back(mention("src", "u" + std::to_string(user(rng)), id));
    }
    auto tally = user_category_mentions(edges, category);

    std::map<std::string, std::map<std::string, std::set<std::string>>> seen;
    for (const GraphEdge& e : edges)
        seen[e.target][category.at(e.record_id)].insert(e.record_id);
    for (const auto& [target, by_code] : seen)
        for (const auto& [code, ids] : by_code)
            CHECK(tally.at(target).at(code) == static_cast<std::int64_t>(ids.size()));
    for (const auto& [target, by_code] : tally)
        for (const auto& [code, n] : by_code)
            CHECK(static_cast<std::int64_t>(seen.at(target).at(code).size()) == n);
}
