#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "geosugg/log_pipeline.hpp"
#include "test_util.hpp"

namespace geosugg {
namespace {

using namespace std::chrono_literals;
using testing::at_minute;
using testing::make_ontology;
using testing::rec;

LogParseResult parse_text(const std::string& body) {
    std::istringstream in(std::string(log_header) + "\n" + body);
    return parse_log(in);
}

TEST(TimestampTest, RoundTripAndRejects) {
    auto t = parse_timestamp("2006-03-01 07:17:12");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_timestamp(*t), "2006-03-01 07:17:12");
    EXPECT_FALSE(parse_timestamp("2006-02-30 00:00:00"));
    EXPECT_FALSE(parse_timestamp("2006-03-01 24:00:00"));
    EXPECT_FALSE(parse_timestamp("2006-03-01T07:17:12"));
    EXPECT_FALSE(parse_timestamp(""));
}

TEST(ParseLogTest, ClickRowsCollapse) {
    auto r = parse_text(
        "142\trentdirect.com\t2006-03-01 07:17:12\t\t\n"
        "142\trentdirect.com\t2006-03-01 07:17:12\t1\thttp://www.rentdirect.com\n");
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_TRUE(r.records[0].clicked);
    EXPECT_EQ(r.skipped_rows, 0u);
}

TEST(ParseLogTest, MissingTimeIsSkipped) {
    auto r = parse_text("142\tfoo\n142\tbar\t\t\t\n142\tbaz\t2006-03-01 07:17:12\n");
    EXPECT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.skipped_rows, 2u);
    EXPECT_FALSE(r.records[0].clicked);
}

TEST(ParseLogTest, HeaderOnly) {
    auto r = parse_text("");
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.skipped_rows, 0u);
}

TEST(ParseLogTest, BadHeaderAndMissingFile) {
    std::istringstream in("user\tquery\n");
    EXPECT_THROW(parse_log(in), parse_error);
    std::istringstream empty("");
    EXPECT_THROW(parse_log(empty), parse_error);
    EXPECT_THROW(parse_log(std::string("/nonexistent/log.tsv")), io_error);
}

TEST(ParseLogTest, FixtureLog) {
    auto r = parse_log(std::string(GEOSUGG_DATA_DIR "/fixture_log.tsv"));
    EXPECT_EQ(r.skipped_rows, 1u);
    EXPECT_GT(r.records.size(), 300u);
    EXPECT_TRUE(std::any_of(r.records.begin(), r.records.end(), [](const QueryRecord& q) { return q.clicked; }));
}

// ---------------------------------------------------------------------------

TEST(SplitSessionsTest, GapExamples) {
    auto one = split_sessions({rec("u", "a", 0), rec("u", "b", 10)}, 30min);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].queries.size(), 2u);
    EXPECT_EQ(one[0].session_id, "u#1");

    auto two = split_sessions({rec("u", "a", 0), rec("u", "b", 40)}, 30min);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[1].session_id, "u#2");

    // exactly at the threshold stays in the session
    EXPECT_EQ(split_sessions({rec("u", "a", 0), rec("u", "b", 30)}, 30min).size(), 1u);
    EXPECT_THROW(split_sessions({}, 0s), std::invalid_argument);
}

TEST(SplitSessionsTest, UsersNeverMix) {
    auto s = split_sessions({rec("a", "1", 0), rec("b", "2", 1), rec("a", "3", 2), rec("b", "4", 3)}, 30min);
    ASSERT_EQ(s.size(), 2u);
    for (const auto& sess : s)
        for (const auto& q : sess.queries) EXPECT_EQ(q.user_id, sess.user_id);
    EXPECT_EQ(s[0].user_id, "a");
}

TEST(SplitSessionsTest, UnsortedInputIsOrdered) {
    auto s = split_sessions({rec("u", "late", 20), rec("u", "early", 0)}, 30min);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].queries[0].query_text, "early");
}

std::vector<QueryRecord> random_log(std::mt19937_64& rng) {
    std::vector<QueryRecord> out;
    const std::size_t n = rng() % 200;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(rec("u" + std::to_string(rng() % 8), "q" + std::to_string(i), long(rng() % 2000)));
    return out;
}

TEST(SplitSessionsTest, GapMonotonicity) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        auto log = random_log(rng);
        std::size_t previous = SIZE_MAX;
        for (long g : {1, 5, 10, 30, 60, 240, 10000}) {
            const auto count = split_sessions(log, std::chrono::minutes(g)).size();
            EXPECT_LE(count, previous);
            previous = count;
        }
    }
}

TEST(SplitSessionsTest, RecordsPreservedPerUser) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        auto log = random_log(rng);
        auto sessions = split_sessions(log, 30min);
        std::vector<QueryRecord> flat;
        for (const auto& s : sessions) {
            for (std::size_t i = 1; i < s.queries.size(); ++i) {
                EXPECT_LE(s.queries[i - 1].timestamp, s.queries[i].timestamp);
                EXPECT_LE(s.queries[i].timestamp - s.queries[i - 1].timestamp, 30min);
            }
            flat.insert(flat.end(), s.queries.begin(), s.queries.end());
        }
        auto key = [](const QueryRecord& a, const QueryRecord& b) {
            return std::tie(a.user_id, a.timestamp, a.query_text) < std::tie(b.user_id, b.timestamp, b.query_text);
        };
        std::sort(flat.begin(), flat.end(), key);
        std::sort(log.begin(), log.end(), key);
        EXPECT_EQ(flat, log);
    }
}

// ---------------------------------------------------------------------------

ConceptMatcher small_matcher() {
    return ConceptMatcher::from_ontology(make_ontology("R", {{"Park", {"R"}, {}, {{"park"}}},
                                                             {"Beach", {"R"}, {}, {{"beach"}}},
                                                             {"Museum", {"R"}, {}, {{"museum"}}},
                                                             {"Lake", {"R"}, {}, {{"lake"}}},
                                                             {"Hotel", {"R"}, {}, {{"hotel"}}}}),
                                         {.index_labels = false});
}

TEST(ReduceDatasetTest, PerQueryConceptSets) {
    auto sessions = split_sessions({rec("u", "weather", 0), rec("u", "parks", 1), rec("u", "news", 2)}, 30min);
    auto ds = reduce_dataset(sessions, small_matcher());
    ASSERT_EQ(ds.sessions.size(), 1u);
    EXPECT_EQ(ds.sessions[0].concepts, (std::vector<ConceptSet>{{}, {"Park"}, {}}));
}

TEST(ReduceDatasetTest, UnmatchedSessionDropped) {
    auto sessions = split_sessions({rec("u", "weather", 0), rec("u", "news", 1)}, 30min);
    EXPECT_TRUE(reduce_dataset(sessions, small_matcher()).sessions.empty());
}

TEST(ReduceDatasetTest, HandTalliedFixture) {
    // 5 users, 12 queries, 8 sessions; 6 sessions from 4 users keep a match
    const std::string body =
        "1\tpark\t2006-03-01 10:00:00\t\t\n"
        "1\tbeach\t2006-03-01 10:10:00\t\t\n"
        "1\tweather\t2006-03-01 11:40:00\t\t\n"
        "2\tmuseum\t2006-03-01 10:00:00\t\t\n"
        "2\tnews\t2006-03-01 10:50:00\t\t\n"
        "2\tparks nearby\t2006-03-01 11:00:00\t2\thttp://example.org\n"
        "3\tcheap flights\t2006-03-01 10:00:00\t\t\n"
        "3\tlottery\t2006-03-01 10:05:00\t\t\n"
        "4\tlake\t2006-03-01 10:00:00\t\t\n"
        "4\tlake hotel\t2006-03-01 10:20:00\t\t\n"
        "4\thotel\t2006-03-01 11:10:00\t\t\n"
        "5\thotels\t2006-03-01 09:00:00\t\t\n";
    auto parsed = parse_text(body);
    auto sessions = split_sessions(parsed.records, 30min);
    auto ds = reduce_dataset(sessions, small_matcher());
    EXPECT_EQ(ds.source_stats, (SourceStats{12, 8, 5, 9, 6, 4}));
    std::vector<std::string> ids;
    for (const auto& s : ds.sessions) ids.push_back(s.session.session_id);
    EXPECT_EQ(ids, (std::vector<std::string>{"1#1", "2#1", "2#2", "4#1", "4#2", "5#1"}));

    // retained sessions are input sessions, unchanged
    for (const auto& s : ds.sessions)
        EXPECT_NE(std::find(sessions.begin(), sessions.end(), s.session), sessions.end());
}

TEST(ReduceDatasetTest, ThreadCountDoesNotMatter) {
    auto parsed = parse_log(std::string(GEOSUGG_DATA_DIR "/fixture_log.tsv"));
    auto sessions = split_sessions(parsed.records, 30min);
    auto m = ConceptMatcher::from_ontology(load_ontology(GEOSUGG_DATA_DIR "/fixture_ontology.json"));
    EXPECT_EQ(reduce_dataset(sessions, m, 1), reduce_dataset(sessions, m, 4));
}

// ---------------------------------------------------------------------------

TEST(LengthStatsTest, Examples) {
    auto st = length_stats({1, 1, 2, 4});
    EXPECT_EQ(st.count, 4u);
    EXPECT_EQ(st.min, 1u);
    EXPECT_EQ(st.max, 4u);
    EXPECT_DOUBLE_EQ(st.mean, 2.0);
    EXPECT_EQ(st.median, 1u);
    EXPECT_DOUBLE_EQ(st.stdev, std::sqrt(2.0));
    EXPECT_EQ(st.histogram, (std::map<std::size_t, std::size_t>{{1, 2}, {2, 1}, {4, 1}}));

    auto ones = length_stats({1, 1, 1});
    EXPECT_DOUBLE_EQ(ones.mean, 1.0);
    EXPECT_EQ(ones.median, 1u);
    EXPECT_DOUBLE_EQ(ones.stdev, 0.0);

    EXPECT_THROW(length_stats({}), pipeline_error);
    EXPECT_THROW(session_length_stats(ReducedDataset{}), pipeline_error);
}

}  // namespace
}  // namespace geosugg
