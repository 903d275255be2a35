#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geosugg/config.hpp"
#include "geosugg/cooccurrence.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/evaluation.hpp"
#include "geosugg/log_pipeline.hpp"
#include "geosugg/ontology.hpp"

namespace geosugg {

/// Writes through a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial artifact behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write '" + path + "'");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw io_error("failed writing '" + path + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw io_error("cannot move output into place at '" + path + "'");
    }
}

/// Fixed-precision rendering used in text and CSV outputs.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Reduced dataset: newline-delimited JSON. The first line carries
// {"provenance", "source_stats", "skipped_rows"}; each following line is
// {"session_id", "user", "queries": [{"text", "ts", "concepts", "clicked"}]}.

inline nlohmann::json to_json(const SourceStats& s) {
    return {{"input_queries", s.input_queries}, {"input_sessions", s.input_sessions},
            {"input_users", s.input_users},     {"queries", s.queries},
            {"sessions", s.sessions},           {"users", s.users}};
}

inline SourceStats source_stats_from_json(const nlohmann::json& j) {
    SourceStats s;
    s.input_queries = j.at("input_queries").get<std::size_t>();
    s.input_sessions = j.at("input_sessions").get<std::size_t>();
    s.input_users = j.at("input_users").get<std::size_t>();
    s.queries = j.at("queries").get<std::size_t>();
    s.sessions = j.at("sessions").get<std::size_t>();
    s.users = j.at("users").get<std::size_t>();
    return s;
}

inline nlohmann::json session_to_json(const ReducedSession& s) {
    nlohmann::json queries = nlohmann::json::array();
    for (std::size_t i = 0; i < s.session.queries.size(); ++i) {
        const auto& q = s.session.queries[i];
        queries.push_back({{"text", q.query_text},
                           {"ts", format_timestamp(q.timestamp)},
                           {"concepts", s.concepts[i]},
                           {"clicked", q.clicked}});
    }
    return {{"session_id", s.session.session_id}, {"user", s.session.user_id}, {"queries", std::move(queries)}};
}

inline ReducedSession session_from_json(const nlohmann::json& j) {
    ReducedSession s;
    s.session.session_id = j.at("session_id").get<std::string>();
    s.session.user_id = j.at("user").get<std::string>();
    for (const auto& qj : j.at("queries")) {
        auto ts = parse_timestamp(qj.at("ts").get<std::string>());
        if (!ts) throw parse_error("reduced dataset: bad timestamp in session '" + s.session.session_id + "'");
        s.session.queries.push_back(
            QueryRecord{s.session.user_id, qj.at("text").get<std::string>(), *ts, qj.value("clicked", false)});
        s.concepts.push_back(qj.at("concepts").get<ConceptSet>());
    }
    if (s.session.queries.empty())
        throw parse_error("reduced dataset: session '" + s.session.session_id + "' has no queries");
    return s;
}

struct ReducedFile {
    ReducedDataset dataset;
    nlohmann::json provenance;
    std::size_t skipped_rows = 0;
};

inline std::string write_reduced(const ReducedFile& f) {
    std::string out = nlohmann::json{{"provenance", f.provenance},
                                     {"source_stats", to_json(f.dataset.source_stats)},
                                     {"skipped_rows", f.skipped_rows}}
                          .dump();
    out.push_back('\n');
    for (const auto& s : f.dataset.sessions) {
        out += session_to_json(s).dump();
        out.push_back('\n');
    }
    return out;
}

inline ReducedFile read_reduced(std::istream& in, const std::string& where = "reduced dataset") {
    ReducedFile f;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            if (!header) {
                if (!j.contains("provenance")) throw parse_error(where + ": first line must carry provenance");
                f.provenance = j.at("provenance");
                f.dataset.source_stats = source_stats_from_json(j.at("source_stats"));
                f.skipped_rows = j.value("skipped_rows", std::size_t{0});
                header = true;
                continue;
            }
            f.dataset.sessions.push_back(session_from_json(j));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(where + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!header) throw parse_error(where + ": empty file");
    return f;
}

inline ReducedFile read_reduced_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open reduced dataset '" + path + "'");
    return read_reduced(in, path);
}

// ---------------------------------------------------------------------------
// Graph dump: "#provenance\t<json>" then "concept_a\tconcept_b\tweight" rows.

inline std::string write_graph_tsv(const CooccurrenceGraph& g, const nlohmann::json& provenance) {
    std::string out = "#provenance\t" + provenance.dump() + "\n";
    for (const auto& [e, w] : g.edges()) out += e.first + "\t" + e.second + "\t" + std::to_string(w) + "\n";
    return out;
}

struct GraphFile {
    CooccurrenceGraph graph;
    nlohmann::json provenance;
};

inline GraphFile read_graph_tsv(std::istream& in, const std::string& where = "graph") {
    GraphFile f;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#provenance\t", 0) == 0) {
            try {
                f.provenance = nlohmann::json::parse(line.substr(12));
            } catch (const nlohmann::json::exception& e) {
                throw parse_error(where + ":" + std::to_string(line_no) + ": " + e.what());
            }
            continue;
        }
        if (line[0] == '#') continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
            throw parse_error(where + ":" + std::to_string(line_no) + ": expected 3 tab-separated columns");
        const std::string a = line.substr(0, t1);
        const std::string b = line.substr(t1 + 1, t2 - t1 - 1);
        std::uint64_t w = 0;
        try {
            std::size_t used = 0;
            w = std::stoull(line.substr(t2 + 1), &used);
            if (used != line.size() - t2 - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw parse_error(where + ":" + std::to_string(line_no) + ": bad weight");
        }
        if (a.empty() || b.empty() || a == b || w == 0)
            throw parse_error(where + ":" + std::to_string(line_no) + ": invalid edge");
        f.graph.add(a, b, w);
    }
    return f;
}

inline GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open graph '" + path + "'");
    return read_graph_tsv(in, path);
}

// ---------------------------------------------------------------------------
// Clusters: {"provenance", "config", "clusters": [{"id", "members"}], "converged", "iterations"}

inline nlohmann::json clusters_to_json(const CopraResult& r, const CopraConfig& cfg, const nlohmann::json& provenance) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : r.clusters) clusters.push_back({{"id", c.id}, {"members", c.members}});
    return {{"provenance", provenance},
            {"config", {{"v", cfg.v}, {"max_iterations", cfg.max_iterations}, {"seed", cfg.seed}, {"self_vote", cfg.self_vote}}},
            {"clusters", std::move(clusters)},
            {"converged", r.converged},
            {"iterations", r.iterations}};
}

struct ClusterFile {
    std::vector<ConceptCluster> clusters;
    nlohmann::json provenance;
    bool converged = false;
    std::size_t iterations = 0;
};

inline ClusterFile clusters_from_json(const nlohmann::json& j) {
    ClusterFile f;
    try {
        f.provenance = j.value("provenance", nlohmann::json());
        f.converged = j.value("converged", false);
        f.iterations = j.value("iterations", std::size_t{0});
        for (const auto& c : j.at("clusters")) {
            ConceptCluster cl{c.at("id").get<std::size_t>(), c.at("members").get<ConceptSet>()};
            if (cl.members.empty()) throw parse_error("clusters: cluster " + std::to_string(cl.id) + " is empty");
            f.clusters.push_back(std::move(cl));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("clusters: ") + e.what());
    }
    return f;
}

inline ClusterFile read_clusters_file(const std::string& path) {
    return clusters_from_json(detail::parse_json_text(detail::read_file(path), path));
}

// ---------------------------------------------------------------------------
// Evaluation report

inline nlohmann::json to_json(const CountSummary& c) { return {{"min", c.min}, {"max", c.max}, {"mean", c.mean}}; }

inline nlohmann::json to_json(const LengthStats& s) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [len, n] : s.histogram) hist.push_back({{"length", len}, {"sessions", n}});
    return {{"count", s.count}, {"min", s.min},     {"max", s.max},           {"mean", s.mean},
            {"median", s.median}, {"stdev", s.stdev}, {"histogram", std::move(hist)}};
}

inline nlohmann::json to_json(const ClusterStats& s) {
    return {{"count", s.count}, {"min_size", s.min_size}, {"max_size", s.max_size},
            {"mean_size", s.mean_size}, {"overlap", s.overlap}};
}

inline nlohmann::json to_json(const StrategyMetrics& m) {
    return {{"recall", m.recall},
            {"precision", m.precision},
            {"precision_defined", m.precision_defined},
            {"f1", m.f1},
            {"mean_session_f1", m.mean_session_f1},
            {"richness", to_json(m.richness)},
            {"suggested_count", to_json(m.suggested_count)},
            {"sessions", m.sessions},
            {"precision_sessions", m.precision_sessions},
            {"excluded_empty_ground_truth", m.excluded_empty_ground_truth}};
}

inline nlohmann::json to_json(const std::vector<LengthF1>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) out.push_back({{"length", r.length}, {"mean_f1", r.mean_f1}, {"n", r.n}});
    return out;
}

inline nlohmann::json report_to_json(const EvaluationReport& r, const nlohmann::json& provenance) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json metrics = nlohmann::json::object();
        for (std::size_t s = 0; s < r.config.strategies.size(); ++s) {
            const auto& m = f.metrics[s];
            metrics[std::string(to_string(r.config.strategies[s]))] = m ? to_json(*m) : nlohmann::json(nullptr);
        }
        folds.push_back({{"fold", f.fold},
                         {"train_sessions", f.train_sessions},
                         {"test_sessions", f.test_sessions},
                         {"graph_nodes", f.graph_nodes},
                         {"graph_edges", f.graph_edges},
                         {"clusters", to_json(f.clusters)},
                         {"converged", f.converged},
                         {"iterations", f.iterations},
                         {"metrics", std::move(metrics)}});
    }
    nlohmann::json strategies = nlohmann::json::array();
    for (const auto& s : r.strategies) {
        strategies.push_back({{"strategy", to_string(s.strategy)},
                              {"folds_used", s.folds_used},
                              {"richness", to_json(s.richness)},
                              {"suggested_count", to_json(s.suggested_count)},
                              {"recall", s.recall},
                              {"precision", s.precision},
                              {"f1", s.f1},
                              {"mean_session_f1", s.mean_session_f1},
                              {"f1_by_length", to_json(s.f1_by_length)}});
    }
    return {{"provenance", provenance},
            {"dataset",
             {{"source_stats", to_json(r.source_stats)},
              {"session_length", to_json(r.length_stats)},
              {"eligible_sessions", r.eligible_sessions}}},
            {"strategies", std::move(strategies)},
            {"folds", std::move(folds)}};
}

/// One row per strategy and fold plus a "mean" summary row per strategy.
inline std::string report_to_csv(const EvaluationReport& r, const nlohmann::json& provenance) {
    std::ostringstream out;
    out << "# provenance " << provenance.dump() << "\n";
    out << "strategy,fold,sessions,richness_min,richness_max,richness_mean,suggested_min,suggested_max,"
           "suggested_mean,recall,precision,f1,mean_session_f1\n";
    auto row = [&](std::string_view strategy, const std::string& fold, std::size_t sessions, const CountSummary& rich,
                   const CountSummary& sugg, double recall, double precision, double f1, double msf1) {
        out << strategy << ',' << fold << ',' << sessions << ',' << rich.min << ',' << rich.max << ','
            << format_double(rich.mean) << ',' << sugg.min << ',' << sugg.max << ',' << format_double(sugg.mean) << ','
            << format_double(recall) << ',' << format_double(precision) << ',' << format_double(f1) << ','
            << format_double(msf1) << '\n';
    };
    for (std::size_t s = 0; s < r.strategies.size(); ++s) {
        const auto name = to_string(r.strategies[s].strategy);
        for (const auto& f : r.folds) {
            const auto& m = f.metrics[s];
            if (!m) continue;
            row(name, std::to_string(f.fold), m->sessions, m->richness, m->suggested_count, m->recall, m->precision,
                m->f1, m->mean_session_f1);
        }
        const auto& sum = r.strategies[s];
        std::size_t sessions = 0;
        for (const auto& f : r.folds)
            if (f.metrics[s]) sessions += f.metrics[s]->sessions;
        row(name, "mean", sessions, sum.richness, sum.suggested_count, sum.recall, sum.precision, sum.f1,
            sum.mean_session_f1);
    }
    return out.str();
}

inline std::string f1_by_length_csv(const std::vector<LengthF1>& rows) {
    std::string out = "length,mean_f1,n\n";
    for (const auto& r : rows) out += std::to_string(r.length) + "," + format_double(r.mean_f1) + "," + std::to_string(r.n) + "\n";
    return out;
}

}  // namespace geosugg
