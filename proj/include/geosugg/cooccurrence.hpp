#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geosugg/concept_set.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/log_pipeline.hpp"
#include "geosugg/parallel.hpp"

namespace geosugg {

/// Undirected weighted graph over concept ids. Pairs are stored with the
/// smaller id first; weights are session co-occurrence counts (>= 1).
class CooccurrenceGraph {
public:
    using Edge = std::pair<std::string, std::string>;

    void add(const std::string& a, const std::string& b, std::uint64_t weight = 1) {
        if (a == b) throw std::invalid_argument("co-occurrence graph: self-loop on '" + a + "'");
        if (weight == 0) throw std::invalid_argument("co-occurrence graph: zero weight");
        nodes_.insert(a);
        nodes_.insert(b);
        edges_[canonical(a, b)] += weight;
    }

    std::uint64_t weight(const std::string& a, const std::string& b) const {
        if (a == b) return 0;
        auto it = edges_.find(canonical(a, b));
        return it == edges_.end() ? 0 : it->second;
    }

    const std::set<std::string>& nodes() const { return nodes_; }
    const std::map<Edge, std::uint64_t>& edges() const { return edges_; }
    bool empty() const { return nodes_.empty(); }

    void merge(const CooccurrenceGraph& other) {
        for (const auto& [e, w] : other.edges_) add(e.first, e.second, w);
    }

    bool operator==(const CooccurrenceGraph&) const = default;

private:
    static Edge canonical(const std::string& a, const std::string& b) {
        return a < b ? Edge{a, b} : Edge{b, a};
    }

    std::set<std::string> nodes_;
    std::map<Edge, std::uint64_t> edges_;
};

/// Each session contributes +1 to every unordered pair of distinct concepts
/// it references anywhere. Only concepts that end up on an edge are nodes.
inline CooccurrenceGraph build_graph(const std::vector<ConceptSet>& session_concepts, unsigned threads = 1) {
    const std::size_t workers = std::max(1u, threads);
    const std::size_t chunk = (session_concepts.size() + workers - 1) / workers;
    std::vector<CooccurrenceGraph> partial(workers);
    parallel_for(workers, threads, [&](std::size_t w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(session_concepts.size(), begin + chunk);
        for (std::size_t s = begin; s < end; ++s) {
            const auto& cs = session_concepts[s];
            for (auto a = cs.begin(); a != cs.end(); ++a)
                for (auto b = std::next(a); b != cs.end(); ++b) partial[w].add(*a, *b);
        }
    });
    CooccurrenceGraph g;
    for (const auto& p : partial) g.merge(p);
    return g;
}

inline CooccurrenceGraph build_graph(const ReducedDataset& ds, unsigned threads = 1) {
    std::vector<ConceptSet> sets;
    sets.reserve(ds.sessions.size());
    for (const auto& s : ds.sessions) sets.push_back(s.all_concepts());
    return build_graph(sets, threads);
}

/// Removes edges lighter than `min_weight` and the nodes they leave isolated.
inline CooccurrenceGraph prune(const CooccurrenceGraph& g, std::uint64_t min_weight) {
    if (min_weight < 1) throw std::invalid_argument("prune: min_weight must be >= 1");
    CooccurrenceGraph out;
    for (const auto& [e, w] : g.edges())
        if (w >= min_weight) out.add(e.first, e.second, w);
    return out;
}

// ---------------------------------------------------------------------------
// COPRA: label propagation with belonging coefficients.

struct CopraConfig {
    /// maximum number of communities a vertex may belong to
    std::size_t v = 2;
    std::size_t max_iterations = 100;
    std::uint64_t seed = 42;
    /// Count the vertex's own previous labels in its update, weighted like
    /// one average incident edge. Without it, synchronous updates swap
    /// labels across an edge forever.
    bool self_vote = true;
};

struct CommunityLabel {
    std::uint32_t community;
    double coefficient;

    bool operator==(const CommunityLabel&) const = default;
};

/// Labels of one vertex, sorted by community id; coefficients sum to 1.
using LabelSet = std::vector<CommunityLabel>;

struct ConceptCluster {
    std::size_t id = 0;
    ConceptSet members;

    bool operator==(const ConceptCluster&) const = default;
};

struct CopraResult {
    std::vector<ConceptCluster> clusters;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Called after every iteration with the iteration number (1-based) and the
/// label sets indexed like graph.nodes().
using CopraObserver = std::function<void(std::size_t, const std::vector<LabelSet>&)>;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Tie-break draw that depends only on (seed, iteration, vertex).
inline std::uint64_t tie_draw(std::uint64_t seed, std::uint64_t iteration, std::uint64_t vertex) {
    return splitmix64(splitmix64(splitmix64(seed) ^ iteration) ^ vertex);
}

/// Drops clusters contained in another cluster (including duplicates),
/// then numbers the rest in lexicographic member order.
inline std::vector<ConceptCluster> absorb_subsets(std::vector<ConceptSet> sets) {
    std::sort(sets.begin(), sets.end(), [](const ConceptSet& a, const ConceptSet& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    std::vector<ConceptSet> kept;
    for (auto& s : sets) {
        const bool contained = std::any_of(kept.begin(), kept.end(), [&](const ConceptSet& k) { return is_subset(s, k); });
        if (!contained) kept.push_back(std::move(s));
    }
    std::sort(kept.begin(), kept.end());
    std::vector<ConceptCluster> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) out.push_back(ConceptCluster{i, std::move(kept[i])});
    return out;
}

}  // namespace detail

/**
 * Overlapping community detection by synchronous label propagation.
 *
 * Every vertex starts as its own community with coefficient 1. In each
 * iteration a vertex's new coefficients are the edge-weighted average of
 * its neighbours' previous ones; pairs below 1/v are removed, and if none
 * survive one maximal pair is kept (ties drawn from seed, iteration and
 * vertex). Remaining coefficients are renormalized. Propagation stops once
 * no vertex changes its community set and no tie had to be drawn, or after
 * max_iterations.
 *
 * Vertex updates read only the previous iteration, so the result is the
 * same for every thread count.
 */
inline CopraResult copra_cluster(const CooccurrenceGraph& g, const CopraConfig& cfg, unsigned threads = 1,
                                 const CopraObserver& observer = {}) {
    if (g.empty()) throw pipeline_error("empty graph: nothing to cluster");
    if (cfg.v < 1) throw std::invalid_argument("copra: v must be >= 1");
    if (cfg.max_iterations < 1) throw std::invalid_argument("copra: max_iterations must be >= 1");

    const std::vector<std::string> names(g.nodes().begin(), g.nodes().end());
    const std::size_t n = names.size();
    std::map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(names[i], static_cast<std::uint32_t>(i));

    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency(n);
    for (const auto& [e, w] : g.edges()) {
        const auto a = index.at(e.first);
        const auto b = index.at(e.second);
        adjacency[a].emplace_back(b, static_cast<double>(w));
        adjacency[b].emplace_back(a, static_cast<double>(w));
    }
    for (auto& adj : adjacency) std::sort(adj.begin(), adj.end());

    std::vector<LabelSet> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = {{static_cast<std::uint32_t>(i), 1.0}};

    const double threshold = 1.0 / static_cast<double>(cfg.v);
    constexpr double eps = 1e-12;

    CopraResult result;
    std::vector<LabelSet> next(n);
    std::vector<char> drew_tie(n);
    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        parallel_for(n, threads, [&](std::size_t x) {
            const auto& adj = adjacency[x];
            drew_tie[x] = 0;
            if (adj.empty()) {
                next[x] = labels[x];
                return;
            }
            std::map<std::uint32_t, double> acc;
            double total = 0.0;
            for (const auto& [y, w] : adj) {
                total += w;
                for (const auto& l : labels[y]) acc[l.community] += w * l.coefficient;
            }
            if (cfg.self_vote) {
                const double self_weight = total / static_cast<double>(adj.size());
                total += self_weight;
                for (const auto& l : labels[x]) acc[l.community] += self_weight * l.coefficient;
            }

            LabelSet updated;
            double best = 0.0;
            for (auto& [c, sum] : acc) {
                sum /= total;
                best = std::max(best, sum);
                if (sum >= threshold - eps) updated.push_back({c, sum});
            }
            if (updated.empty()) {
                std::vector<std::uint32_t> maxima;
                for (const auto& [c, b] : acc)
                    if (b >= best - eps) maxima.push_back(c);
                std::size_t pick = 0;
                if (maxima.size() > 1) {
                    pick = detail::tie_draw(cfg.seed, iter, x) % maxima.size();
                    drew_tie[x] = 1;
                }
                updated.push_back({maxima[pick], 1.0});
            } else {
                double kept = 0.0;
                for (const auto& l : updated) kept += l.coefficient;
                for (auto& l : updated) l.coefficient /= kept;
            }
            next[x] = std::move(updated);
        });

        bool stable = true;
        for (std::size_t x = 0; x < n && stable; ++x) {
            if (drew_tie[x] || next[x].size() != labels[x].size()) {
                stable = false;
                break;
            }
            for (std::size_t k = 0; k < next[x].size(); ++k)
                if (next[x][k].community != labels[x][k].community) stable = false;
        }
        labels.swap(next);
        result.iterations = iter;
        if (observer) observer(iter, labels);
        if (stable) {
            result.converged = true;
            break;
        }
    }

    std::map<std::uint32_t, ConceptSet> communities;
    for (std::size_t x = 0; x < n; ++x)
        for (const auto& l : labels[x]) communities[l.community].insert(names[x]);
    std::vector<ConceptSet> sets;
    sets.reserve(communities.size());
    for (auto& [_, members] : communities) sets.push_back(std::move(members));
    result.clusters = detail::absorb_subsets(std::move(sets));
    return result;
}

// ---------------------------------------------------------------------------

struct ClusterStats {
    std::size_t count = 0;
    std::size_t min_size = 0;
    std::size_t max_size = 0;
    double mean_size = 0.0;
    /// concepts that belong to more than one cluster
    std::size_t overlap = 0;

    bool operator==(const ClusterStats&) const = default;
};

inline ClusterStats cluster_stats(const std::vector<ConceptCluster>& clusters) {
    ClusterStats st;
    if (clusters.empty()) return st;
    st.count = clusters.size();
    st.min_size = clusters.front().members.size();
    std::size_t total = 0;
    std::map<std::string, std::size_t> membership;
    for (const auto& c : clusters) {
        st.min_size = std::min(st.min_size, c.members.size());
        st.max_size = std::max(st.max_size, c.members.size());
        total += c.members.size();
        for (const auto& m : c.members) ++membership[m];
    }
    st.mean_size = static_cast<double>(total) / static_cast<double>(clusters.size());
    for (const auto& [_, k] : membership)
        if (k > 1) ++st.overlap;
    return st;
}

}  // namespace geosugg
