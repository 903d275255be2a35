#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "geosugg/cooccurrence.hpp"
#include "oracles.hpp"

namespace geosugg {
namespace {

using WeightedEdges = std::vector<std::tuple<std::size_t, std::size_t, double>>;

std::string node(std::size_t i) { return "c" + std::to_string(i); }

CooccurrenceGraph graph_of(const WeightedEdges& edges) {
    CooccurrenceGraph g;
    for (auto [a, b, w] : edges) g.add(node(a), node(b), static_cast<std::uint64_t>(w));
    return g;
}

std::vector<ConceptSet> cluster_sets(const CopraResult& r) {
    std::vector<ConceptSet> out;
    for (const auto& c : r.clusters) out.push_back(c.members);
    return out;
}

TEST(BuildGraphTest, HandCount) {
    auto g = build_graph(std::vector<ConceptSet>{{"A", "B"}, {"A", "B"}, {"A", "C"}});
    EXPECT_EQ(g.weight("A", "B"), 2u);
    EXPECT_EQ(g.weight("B", "A"), 2u);
    EXPECT_EQ(g.weight("A", "C"), 1u);
    EXPECT_EQ(g.weight("B", "C"), 0u);
    EXPECT_EQ(g.edges().size(), 2u);
}

TEST(BuildGraphTest, SingletonsAddNothing) {
    auto g = build_graph(std::vector<ConceptSet>{{"A"}, {"A"}, {}});
    EXPECT_TRUE(g.empty());
    EXPECT_EQ(g.weight("A", "A"), 0u);
    EXPECT_THROW(CooccurrenceGraph().add("A", "A"), std::invalid_argument);
}

TEST(BuildGraphTest, MatchesBruteForcePairCounts) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ConceptSet> sessions;
        for (int s = 0; s < 200; ++s) {
            ConceptSet cs;
            const std::size_t k = rng() % 5;
            for (std::size_t i = 0; i < k; ++i) cs.insert(node(rng() % 12));
            sessions.push_back(cs);
        }
        const auto expected = testing::brute_pair_counts(sessions);
        for (unsigned threads : {1u, 3u}) {
            auto g = build_graph(sessions, threads);
            ASSERT_EQ(g.edges().size(), expected.size());
            for (const auto& [pair, w] : expected) EXPECT_EQ(g.weight(pair.first, pair.second), w);
        }
    }
}

TEST(PruneTest, Examples) {
    CooccurrenceGraph g;
    g.add("A", "B", 2);
    g.add("A", "C", 1);
    EXPECT_EQ(prune(g, 1), g);
    auto p = prune(g, 2);
    EXPECT_EQ(p.edges().size(), 1u);
    EXPECT_EQ(p.weight("A", "B"), 2u);
    EXPECT_EQ(p.nodes(), (std::set<std::string>{"A", "B"}));
    EXPECT_TRUE(prune(g, 3).empty());
    EXPECT_THROW(prune(g, 0), std::invalid_argument);
}

TEST(PruneTest, Idempotent) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        CooccurrenceGraph g;
        for (int e = 0; e < 40; ++e) {
            auto a = rng() % 15, b = rng() % 15;
            if (a != b) g.add(node(a), node(b), 1 + rng() % 6);
        }
        for (std::uint64_t t = 1; t <= 5; ++t) EXPECT_EQ(prune(prune(g, t), t), prune(g, t));
    }
}

// ---------------------------------------------------------------------------

WeightedEdges clique(std::size_t first, std::size_t k) {
    WeightedEdges e;
    for (std::size_t i = first; i < first + k; ++i)
        for (std::size_t j = i + 1; j < first + k; ++j) e.emplace_back(i, j, 1.0);
    return e;
}

TEST(CopraTest, TwoTrianglesMatchModularityOptimum) {
    WeightedEdges edges = clique(0, 3);
    auto second = clique(3, 3);
    edges.insert(edges.end(), second.begin(), second.end());

    const auto best = testing::best_partitions(6, edges);
    ASSERT_EQ(best.size(), 1u);
    std::map<std::size_t, ConceptSet> expected_groups;
    for (std::size_t i = 0; i < 6; ++i) expected_groups[best[0][i]].insert(node(i));
    std::vector<ConceptSet> expected;
    for (auto& [_, s] : expected_groups) expected.push_back(s);

    auto r = copra_cluster(graph_of(edges), CopraConfig{.v = 1});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(cluster_sets(r), expected);
}

TEST(CopraTest, SingleEdge) {
    CooccurrenceGraph g;
    g.add("A", "B");
    auto r = copra_cluster(g, CopraConfig{.v = 1});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(cluster_sets(r), (std::vector<ConceptSet>{{"A", "B"}}));
}

TEST(CopraTest, BridgedTrianglesWithOverlap) {
    WeightedEdges edges = clique(0, 3);
    auto second = clique(3, 3);
    edges.insert(edges.end(), second.begin(), second.end());
    edges.emplace_back(2, 3, 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto r = copra_cluster(graph_of(edges), CopraConfig{.v = 2, .seed = seed});
        std::map<std::string, int> membership;
        for (const auto& c : r.clusters)
            for (const auto& m : c.members) ++membership[m];
        ASSERT_EQ(membership.size(), 6u);
        for (const auto& [_, k] : membership) {
            EXPECT_GE(k, 1);
            EXPECT_LE(k, 2);
        }
    }
}

TEST(CopraTest, CoefficientsSumToOneEachIteration) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        CooccurrenceGraph g;
        for (int e = 0; e < 60; ++e) {
            auto a = rng() % 25, b = rng() % 25;
            if (a != b) g.add(node(a), node(b), 1 + rng() % 4);
        }
        if (g.empty()) continue;
        const std::size_t v = 1 + rng() % 3;
        std::size_t calls = 0;
        auto r = copra_cluster(g, CopraConfig{.v = v, .seed = rng()}, 1, [&](std::size_t, const std::vector<LabelSet>& labels) {
            ++calls;
            for (const auto& ls : labels) {
                double sum = 0.0;
                for (const auto& l : ls) sum += l.coefficient;
                EXPECT_NEAR(sum, 1.0, 1e-9);
                EXPECT_GE(ls.size(), 1u);
                EXPECT_LE(ls.size(), v);
            }
        });
        EXPECT_EQ(calls, r.iterations);
        std::map<std::string, std::size_t> membership;
        for (const auto& c : r.clusters)
            for (const auto& m : c.members) ++membership[m];
        EXPECT_EQ(membership.size(), g.nodes().size());
        for (const auto& [_, k] : membership) EXPECT_LE(k, v);
    }
}

TEST(CopraTest, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(77);
    CooccurrenceGraph g;
    for (int e = 0; e < 200; ++e) {
        auto a = rng() % 60, b = rng() % 60;
        if (a != b) g.add(node(a), node(b), 1 + rng() % 3);
    }
    const CopraConfig cfg{.v = 2, .seed = 42};
    const auto base = copra_cluster(g, cfg, 1);
    for (unsigned threads : {1u, 2u, 4u}) {
        const auto r = copra_cluster(g, cfg, threads);
        EXPECT_EQ(r.clusters, base.clusters);
        EXPECT_EQ(r.iterations, base.iterations);
    }
}

TEST(CopraTest, ClustersNumberedInMemberOrder) {
    WeightedEdges edges = clique(0, 4);
    auto second = clique(4, 4);
    edges.insert(edges.end(), second.begin(), second.end());
    auto r = copra_cluster(graph_of(edges), CopraConfig{.v = 1});
    ASSERT_EQ(r.clusters.size(), 2u);
    EXPECT_EQ(r.clusters[0].id, 0u);
    EXPECT_EQ(r.clusters[1].id, 1u);
    EXPECT_LT(r.clusters[0].members, r.clusters[1].members);
}

TEST(CopraTest, EmptyGraphAndBadConfig) {
    EXPECT_THROW(copra_cluster(CooccurrenceGraph{}, {}), pipeline_error);
    CooccurrenceGraph g;
    g.add("A", "B");
    EXPECT_THROW(copra_cluster(g, CopraConfig{.v = 0}), std::invalid_argument);
    EXPECT_THROW(copra_cluster(g, CopraConfig{.max_iterations = 0}), std::invalid_argument);
}

TEST(CopraTest, SubsetsAbsorbed) {
    auto out = detail::absorb_subsets({{"A", "B"}, {"A"}, {"A", "B"}, {"C"}});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].members, (ConceptSet{"A", "B"}));
    EXPECT_EQ(out[1].members, (ConceptSet{"C"}));
}

TEST(ClusterStatsTest, Examples) {
    EXPECT_EQ(cluster_stats({}), ClusterStats{});
    auto st = cluster_stats({{0, {"A", "B"}}, {1, {"B", "C"}}});
    EXPECT_EQ(st.count, 2u);
    EXPECT_DOUBLE_EQ(st.mean_size, 2.0);
    EXPECT_EQ(st.overlap, 1u);
    EXPECT_EQ(st.min_size, 2u);
    EXPECT_EQ(st.max_size, 2u);
}

}  // namespace
}  // namespace geosugg
