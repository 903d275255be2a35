#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "geosugg/concept_set.hpp"
#include "geosugg/cooccurrence.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/log_pipeline.hpp"
#include "geosugg/matching.hpp"
#include "geosugg/parallel.hpp"
#include "geosugg/suggestion.hpp"

namespace geosugg {

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldPlan {
    std::size_t fold_count = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> assignments;
    /// dataset indices of the sessions in each fold
    std::vector<std::vector<std::size_t>> folds;
};

namespace detail {

/// Uniform draw in [0, bound) by rejection, so the sequence depends only on
/// the mt19937_64 output stream and not on the standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace detail

/// Sessions with at least two queries are eligible; they are shuffled with
/// a seeded Fisher-Yates pass and dealt round-robin into k folds.
inline FoldPlan make_folds(const ReducedDataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("make_folds: need at least 2 folds");
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < ds.sessions.size(); ++i)
        if (ds.sessions[i].length() >= 2) eligible.push_back(i);
    if (eligible.size() < k)
        throw pipeline_error("make_folds: " + std::to_string(eligible.size()) +
                             " eligible sessions (>= 2 queries) for " + std::to_string(k) + " folds");

    std::mt19937_64 rng(seed);
    for (std::size_t i = eligible.size() - 1; i > 0; --i)
        std::swap(eligible[i], eligible[detail::uniform_below(rng, i + 1)]);

    FoldPlan plan;
    plan.fold_count = k;
    plan.seed = seed;
    plan.folds.resize(k);
    for (std::size_t p = 0; p < eligible.size(); ++p) {
        const std::size_t fold = p % k;
        plan.folds[fold].push_back(eligible[p]);
        plan.assignments[ds.sessions[eligible[p]].session.session_id] = fold;
    }
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

// ---------------------------------------------------------------------------
// Per-session outcomes

struct SessionOutcome {
    std::string session_id;
    std::size_t length = 0;
    ConceptSet context;
    ConceptSet ground_truth;
    ConceptSet suggested;
    std::size_t hits = 0;
};

/// Context is the first query's concepts; ground truth is what the rest of
/// the session explored beyond that context.
inline SessionOutcome evaluate_session(const ReducedSession& s, const std::vector<ConceptCluster>& clusters,
                                       Strategy strategy) {
    if (s.length() < 2) throw std::invalid_argument("evaluate_session: session '" + s.session.session_id + "' has fewer than 2 queries");
    SessionOutcome o;
    o.session_id = s.session.session_id;
    o.length = s.length();
    o.context = s.concepts_between(0, 1);
    o.ground_truth = set_difference(s.concepts_between(1, s.length()), o.context);
    o.suggested = suggest(clusters, o.context, strategy).suggested;
    o.hits = intersection_size(o.suggested, o.ground_truth);
    return o;
}

inline SessionOutcome evaluate_session(const SearchSession& s, const std::vector<ConceptCluster>& clusters,
                                       const ConceptMatcher& matcher, Strategy strategy) {
    ReducedSession annotated{s, {}};
    for (const auto& q : s.queries) annotated.concepts.push_back(matcher.match_query(q.query_text));
    return evaluate_session(annotated, clusters, strategy);
}

inline double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

/// F1 of one session; 0 when nothing relevant was suggested.
inline double session_f1(const SessionOutcome& o) {
    if (o.hits == 0 || o.ground_truth.empty() || o.suggested.empty()) return 0.0;
    const double p = static_cast<double>(o.hits) / static_cast<double>(o.suggested.size());
    const double r = static_cast<double>(o.hits) / static_cast<double>(o.ground_truth.size());
    return harmonic_mean(p, r);
}

// ---------------------------------------------------------------------------
// Aggregation

/// How a session with no suggestions enters the precision mean.
enum class EmptySuggestionPrecision { exclude, zero, one };

struct CountSummary {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;

    bool operator==(const CountSummary&) const = default;
};

struct StrategyMetrics {
    double recall = 0.0;
    double precision = 0.0;
    /// false when no session contributed to the precision mean
    bool precision_defined = false;
    /// harmonic mean of `precision` and `recall`
    double f1 = 0.0;
    /// mean of per-session F1 values
    double mean_session_f1 = 0.0;
    /// relevant suggested concepts (hits) per session
    CountSummary richness;
    CountSummary suggested_count;
    std::size_t sessions = 0;
    std::size_t precision_sessions = 0;
    std::size_t excluded_empty_ground_truth = 0;
};

/**
 * Macro-averages one (strategy, fold) batch. Sessions whose ground truth is
 * empty are left out entirely; sessions without suggestions enter the
 * precision mean according to `policy`.
 */
inline StrategyMetrics aggregate(const std::vector<SessionOutcome>& outcomes,
                                 EmptySuggestionPrecision policy = EmptySuggestionPrecision::exclude) {
    StrategyMetrics m;
    double recall_sum = 0.0;
    double precision_sum = 0.0;
    double f1_sum = 0.0;
    std::size_t hits_total = 0;
    std::size_t suggested_total = 0;
    bool first = true;
    for (const auto& o : outcomes) {
        if (o.ground_truth.empty()) {
            ++m.excluded_empty_ground_truth;
            continue;
        }
        ++m.sessions;
        recall_sum += static_cast<double>(o.hits) / static_cast<double>(o.ground_truth.size());
        if (!o.suggested.empty()) {
            precision_sum += static_cast<double>(o.hits) / static_cast<double>(o.suggested.size());
            ++m.precision_sessions;
        } else if (policy == EmptySuggestionPrecision::zero) {
            ++m.precision_sessions;
        } else if (policy == EmptySuggestionPrecision::one) {
            precision_sum += 1.0;
            ++m.precision_sessions;
        }
        f1_sum += session_f1(o);

        const std::size_t sugg = o.suggested.size();
        if (first) {
            m.richness = {o.hits, o.hits, 0.0};
            m.suggested_count = {sugg, sugg, 0.0};
            first = false;
        }
        m.richness.min = std::min(m.richness.min, o.hits);
        m.richness.max = std::max(m.richness.max, o.hits);
        m.suggested_count.min = std::min(m.suggested_count.min, sugg);
        m.suggested_count.max = std::max(m.suggested_count.max, sugg);
        hits_total += o.hits;
        suggested_total += sugg;
    }
    if (m.sessions == 0) throw pipeline_error("aggregate: no session with a non-empty ground truth");

    const double n = static_cast<double>(m.sessions);
    m.recall = recall_sum / n;
    m.precision_defined = m.precision_sessions > 0;
    m.precision = m.precision_defined ? precision_sum / static_cast<double>(m.precision_sessions) : 0.0;
    m.f1 = harmonic_mean(m.precision, m.recall);
    m.mean_session_f1 = f1_sum / n;
    m.richness.mean = static_cast<double>(hits_total) / n;
    m.suggested_count.mean = static_cast<double>(suggested_total) / n;
    return m;
}

struct LengthF1 {
    std::size_t length = 0;
    double mean_f1 = 0.0;
    std::size_t n = 0;

    bool operator==(const LengthF1&) const = default;
};

/// Mean per-session F1 grouped by session length, ascending. Sessions with
/// an empty ground truth carry no F1 and are skipped.
inline std::vector<LengthF1> f1_by_length(const std::vector<SessionOutcome>& outcomes) {
    std::map<std::size_t, std::pair<double, std::size_t>> groups;
    for (const auto& o : outcomes) {
        if (o.ground_truth.empty()) continue;
        auto& [sum, count] = groups[o.length];
        sum += session_f1(o);
        ++count;
    }
    std::vector<LengthF1> rows;
    for (const auto& [len, acc] : groups)
        rows.push_back({len, acc.first / static_cast<double>(acc.second), acc.second});
    return rows;
}

// ---------------------------------------------------------------------------
// Cross-validated experiment

struct ExperimentConfig {
    std::uint64_t prune_min_weight = 2;
    CopraConfig copra;
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    std::vector<Strategy> strategies{all_strategies.begin(), all_strategies.end()};
    EmptySuggestionPrecision empty_precision = EmptySuggestionPrecision::exclude;
};

struct FoldResult {
    std::size_t fold = 0;
    std::size_t train_sessions = 0;
    std::size_t test_sessions = 0;
    std::size_t graph_nodes = 0;
    std::size_t graph_edges = 0;
    ClusterStats clusters;
    bool converged = true;
    std::size_t iterations = 0;
    /// one entry per configured strategy; empty when the fold had no
    /// session with a non-empty ground truth
    std::vector<std::optional<StrategyMetrics>> metrics;
};

struct StrategySummary {
    Strategy strategy = Strategy::slack;
    std::size_t folds_used = 0;
    double recall = 0.0;
    double precision = 0.0;
    /// from the fold-mean precision and recall
    double f1 = 0.0;
    double mean_session_f1 = 0.0;
    CountSummary richness;
    CountSummary suggested_count;
    std::vector<LengthF1> f1_by_length;
};

struct EvaluationReport {
    ExperimentConfig config;
    SourceStats source_stats;
    LengthStats length_stats;
    std::size_t eligible_sessions = 0;
    std::vector<FoldResult> folds;
    std::vector<StrategySummary> strategies;
};

/// Sessions outside the fold (including single-query sessions, which are
/// never tested) train the clusters; the fold's sessions are evaluated.
inline std::vector<ConceptCluster> train_clusters(const ReducedDataset& ds, const std::vector<std::size_t>& train,
                                                  const ExperimentConfig& cfg, FoldResult* info = nullptr) {
    std::vector<ConceptSet> sets;
    sets.reserve(train.size());
    for (auto i : train) sets.push_back(ds.sessions[i].all_concepts());
    auto graph = prune(build_graph(sets), cfg.prune_min_weight);
    if (info) {
        info->graph_nodes = graph.nodes().size();
        info->graph_edges = graph.edges().size();
    }
    if (graph.empty()) return {};
    auto result = copra_cluster(graph, cfg.copra);
    if (info) {
        info->converged = result.converged;
        info->iterations = result.iterations;
        info->clusters = cluster_stats(result.clusters);
    }
    return std::move(result.clusters);
}

inline EvaluationReport run_experiment(const ReducedDataset& ds, const ExperimentConfig& cfg, unsigned threads = 1) {
    if (cfg.strategies.empty()) throw std::invalid_argument("run_experiment: no strategy selected");
    const FoldPlan plan = make_folds(ds, cfg.folds, cfg.seed);

    EvaluationReport report;
    report.config = cfg;
    report.source_stats = ds.source_stats;
    report.length_stats = session_length_stats(ds);
    report.eligible_sessions = plan.assignments.size();
    report.folds.resize(plan.fold_count);

    // outcomes[fold][strategy]
    std::vector<std::vector<std::vector<SessionOutcome>>> outcomes(plan.fold_count);

    parallel_for(plan.fold_count, threads, [&](std::size_t f) {
        const auto& test = plan.folds[f];
        std::vector<std::size_t> train;
        train.reserve(ds.sessions.size() - test.size());
        for (std::size_t i = 0, t = 0; i < ds.sessions.size(); ++i) {
            if (t < test.size() && test[t] == i) {
                ++t;
                continue;
            }
            train.push_back(i);
        }

        FoldResult& fr = report.folds[f];
        fr.fold = f;
        fr.train_sessions = train.size();
        fr.test_sessions = test.size();
        const auto clusters = train_clusters(ds, train, cfg, &fr);

        outcomes[f].resize(cfg.strategies.size());
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
            auto& batch = outcomes[f][s];
            for (auto i : test) batch.push_back(evaluate_session(ds.sessions[i], clusters, cfg.strategies[s]));
            const bool any_truth = std::any_of(batch.begin(), batch.end(),
                                               [](const SessionOutcome& o) { return !o.ground_truth.empty(); });
            fr.metrics.push_back(any_truth ? std::optional(aggregate(batch, cfg.empty_precision)) : std::nullopt);
        }
    });

    for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
        StrategySummary sum;
        sum.strategy = cfg.strategies[s];
        std::size_t precision_folds = 0;
        std::vector<SessionOutcome> pooled;
        for (std::size_t f = 0; f < plan.fold_count; ++f) {
            pooled.insert(pooled.end(), outcomes[f][s].begin(), outcomes[f][s].end());
            const auto& m = report.folds[f].metrics[s];
            if (!m) continue;
            if (sum.folds_used == 0) {
                sum.richness = {m->richness.min, m->richness.max, 0.0};
                sum.suggested_count = {m->suggested_count.min, m->suggested_count.max, 0.0};
            }
            ++sum.folds_used;
            sum.recall += m->recall;
            sum.mean_session_f1 += m->mean_session_f1;
            if (m->precision_defined) {
                sum.precision += m->precision;
                ++precision_folds;
            }
            sum.richness.min = std::min(sum.richness.min, m->richness.min);
            sum.richness.max = std::max(sum.richness.max, m->richness.max);
            sum.richness.mean += m->richness.mean;
            sum.suggested_count.min = std::min(sum.suggested_count.min, m->suggested_count.min);
            sum.suggested_count.max = std::max(sum.suggested_count.max, m->suggested_count.max);
            sum.suggested_count.mean += m->suggested_count.mean;
        }
        if (sum.folds_used == 0)
            throw pipeline_error("evaluation: no fold has a session with a non-empty ground truth");
        const double k = static_cast<double>(sum.folds_used);
        sum.recall /= k;
        sum.mean_session_f1 /= k;
        sum.richness.mean /= k;
        sum.suggested_count.mean /= k;
        if (precision_folds > 0) sum.precision /= static_cast<double>(precision_folds);
        sum.f1 = harmonic_mean(sum.precision, sum.recall);
        sum.f1_by_length = f1_by_length(pooled);
        report.strategies.push_back(std::move(sum));
    }
    return report;
}

}  // namespace geosugg
