#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geosugg/concept_set.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/matching.hpp"
#include "geosugg/parallel.hpp"

namespace geosugg {

/// Log wall-clock time with seconds precision. No timezone is applied; the
/// value is the literal "YYYY-MM-DD HH:MM:SS" reading.
using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline std::optional<int> parse_fixed_int(std::string_view s) {
    int value = 0;
    if (s.empty()) return std::nullopt;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace detail

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    if (s.size() != 19 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    auto y = detail::parse_fixed_int(s.substr(0, 4));
    auto mo = detail::parse_fixed_int(s.substr(5, 2));
    auto d = detail::parse_fixed_int(s.substr(8, 2));
    auto h = detail::parse_fixed_int(s.substr(11, 2));
    auto mi = detail::parse_fixed_int(s.substr(14, 2));
    auto se = detail::parse_fixed_int(s.substr(17, 2));
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 59) return std::nullopt;
    return sys_days{ymd} + hours{*h} + minutes{*mi} + seconds{*se};
}

inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss<seconds> tod{t - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

struct QueryRecord {
    std::string user_id;
    std::string query_text;
    Timestamp timestamp;
    bool clicked = false;

    bool operator==(const QueryRecord&) const = default;
};

struct SearchSession {
    std::string session_id;
    std::string user_id;
    std::vector<QueryRecord> queries;

    bool operator==(const SearchSession&) const = default;
};

inline constexpr std::string_view log_header = "AnonID\tQuery\tQueryTime\tItemRank\tClickURL";

struct LogParseResult {
    std::vector<QueryRecord> records;
    std::size_t skipped_rows = 0;
};

/**
 * Reads an AOL-style TSV log. Rows repeating an (AnonID, Query, QueryTime)
 * triple are click-throughs of the same query and collapse into the first
 * record, setting `clicked`. Rows with a missing user, an unparseable time
 * or a wrong column count are skipped and counted.
 */
inline LogParseResult parse_log(std::istream& in) {
    LogParseResult result;
    std::string line;
    if (!std::getline(in, line)) throw parse_error("query log: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != log_header) throw parse_error("query log: unexpected header '" + line + "'");

    std::unordered_map<std::string, std::size_t> seen;
    std::vector<std::string_view> fields;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        fields.clear();
        std::string_view rest = line;
        while (true) {
            auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        if (fields.size() < 3 || fields.size() > 5 || fields[0].empty()) {
            ++result.skipped_rows;
            continue;
        }
        auto ts = parse_timestamp(fields[2]);
        if (!ts) {
            ++result.skipped_rows;
            continue;
        }
        const bool clicked = (fields.size() > 3 && !fields[3].empty()) || (fields.size() > 4 && !fields[4].empty());

        std::string key;
        key.reserve(fields[0].size() + fields[1].size() + fields[2].size() + 2);
        key.append(fields[0]).push_back('\t');
        key.append(fields[1]).push_back('\t');
        key.append(fields[2]);
        auto [it, inserted] = seen.try_emplace(std::move(key), result.records.size());
        if (inserted) {
            result.records.push_back(QueryRecord{std::string(fields[0]), std::string(fields[1]), *ts, clicked});
        } else if (clicked) {
            result.records[it->second].clicked = true;
        }
    }
    return result;
}

inline LogParseResult parse_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open query log '" + path + "'");
    return parse_log(in);
}

/// Groups records per user (users in order of first appearance), sorts each
/// user's records by time (stable), and starts a new session whenever the
/// gap to the previous query exceeds `gap`.
inline std::vector<SearchSession> split_sessions(const std::vector<QueryRecord>& records, std::chrono::seconds gap) {
    if (gap <= std::chrono::seconds::zero()) throw std::invalid_argument("split_sessions: gap must be positive");

    std::vector<std::string> user_order;
    std::unordered_map<std::string, std::vector<QueryRecord>> by_user;
    for (const auto& r : records) {
        auto [it, inserted] = by_user.try_emplace(r.user_id);
        if (inserted) user_order.push_back(r.user_id);
        it->second.push_back(r);
    }

    std::vector<SearchSession> sessions;
    for (const auto& user : user_order) {
        auto& recs = by_user[user];
        std::stable_sort(recs.begin(), recs.end(),
                         [](const QueryRecord& a, const QueryRecord& b) { return a.timestamp < b.timestamp; });
        std::size_t ordinal = 0;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (i == 0 || recs[i].timestamp - recs[i - 1].timestamp > gap) {
                ++ordinal;
                sessions.push_back(SearchSession{user + "#" + std::to_string(ordinal), user, {}});
            }
            sessions.back().queries.push_back(std::move(recs[i]));
        }
    }
    return sessions;
}

// ---------------------------------------------------------------------------

struct ReducedSession {
    SearchSession session;
    /// matched concepts, one set per query
    std::vector<ConceptSet> concepts;

    std::size_t length() const { return session.queries.size(); }

    /// concepts of queries [from, to) (0-based)
    ConceptSet concepts_between(std::size_t from, std::size_t to) const {
        ConceptSet out;
        for (std::size_t i = from; i < to && i < concepts.size(); ++i) out.insert(concepts[i].begin(), concepts[i].end());
        return out;
    }

    ConceptSet all_concepts() const { return concepts_between(0, concepts.size()); }

    bool operator==(const ReducedSession&) const = default;
};

struct SourceStats {
    std::size_t input_queries = 0;
    std::size_t input_sessions = 0;
    std::size_t input_users = 0;
    std::size_t queries = 0;
    std::size_t sessions = 0;
    std::size_t users = 0;

    bool operator==(const SourceStats&) const = default;
};

struct ReducedDataset {
    std::vector<ReducedSession> sessions;
    SourceStats source_stats;

    bool operator==(const ReducedDataset&) const = default;
};

/// Keeps the sessions in which at least one query matches a concept and
/// attaches the per-query concept sets. Output order follows input order.
inline ReducedDataset reduce_dataset(const std::vector<SearchSession>& sessions, const ConceptMatcher& matcher,
                                     unsigned threads = 1) {
    std::vector<std::vector<ConceptSet>> matched(sessions.size());
    parallel_for(sessions.size(), threads, [&](std::size_t i) {
        auto& out = matched[i];
        out.reserve(sessions[i].queries.size());
        for (const auto& q : sessions[i].queries) out.push_back(matcher.match_query(q.query_text));
    });

    ReducedDataset ds;
    std::set<std::string> input_users;
    std::set<std::string> users;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& s = sessions[i];
        ds.source_stats.input_queries += s.queries.size();
        ++ds.source_stats.input_sessions;
        input_users.insert(s.user_id);

        const bool any = std::any_of(matched[i].begin(), matched[i].end(), [](const ConceptSet& c) { return !c.empty(); });
        if (!any) continue;
        ds.source_stats.queries += s.queries.size();
        ++ds.source_stats.sessions;
        users.insert(s.user_id);
        ds.sessions.push_back(ReducedSession{s, std::move(matched[i])});
    }
    ds.source_stats.input_users = input_users.size();
    ds.source_stats.users = users.size();
    return ds;
}

// ---------------------------------------------------------------------------

struct LengthStats {
    std::size_t count = 0;
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    /// lower median (an observed length)
    std::size_t median = 0;
    /// sample standard deviation; 0 for a single session
    double stdev = 0.0;
    std::map<std::size_t, std::size_t> histogram;

    bool operator==(const LengthStats&) const = default;
};

inline LengthStats length_stats(std::vector<std::size_t> lengths) {
    if (lengths.empty()) throw pipeline_error("session length statistics need at least one session");
    std::sort(lengths.begin(), lengths.end());
    LengthStats st;
    st.count = lengths.size();
    st.min = lengths.front();
    st.max = lengths.back();
    st.median = lengths[(lengths.size() - 1) / 2];
    const double n = static_cast<double>(lengths.size());
    st.mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
    if (lengths.size() > 1) {
        double ss = 0.0;
        for (auto l : lengths) ss += (static_cast<double>(l) - st.mean) * (static_cast<double>(l) - st.mean);
        st.stdev = std::sqrt(ss / (n - 1.0));
    }
    for (auto l : lengths) ++st.histogram[l];
    return st;
}

inline LengthStats session_length_stats(const ReducedDataset& ds) {
    std::vector<std::size_t> lengths;
    lengths.reserve(ds.sessions.size());
    for (const auto& s : ds.sessions) lengths.push_back(s.length());
    return length_stats(std::move(lengths));
}

}  // namespace geosugg
