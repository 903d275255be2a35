#pragma once

// Brute-force reference computations used to check the library. Nothing in
// here calls into the code paths being verified.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "test_util.hpp"

namespace geosugg::testing {

struct BruteMetrics {
    std::size_t class_count = 0;
    std::size_t relations = 0;
    std::size_t longest_path = 0;
    double mean_degree = 0.0;
};

/// Walks every root-to-leaf path explicitly.
inline BruteMetrics brute_metrics(const RandomDag& d) {
    BruteMetrics m;
    m.class_count = d.n - 1;
    m.relations = d.edges.size();

    std::vector<std::vector<std::size_t>> kids(d.n);
    for (auto [c, p] : d.edges) kids[p].push_back(c);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        if (kids[node].empty()) m.longest_path = std::max(m.longest_path, depth);
        for (auto k : kids[node]) stack.emplace_back(k, depth + 1);
    }

    if (d.n > 1) {
        std::size_t sum = 0;
        for (std::size_t v = 1; v < d.n; ++v)
            for (auto [c, p] : d.edges) sum += (c == v) + (p == v);
        m.mean_degree = static_cast<double>(sum) / static_cast<double>(d.n - 1);
    }
    return m;
}

/// Weight of each pair = number of sessions whose concept set holds both.
inline std::map<std::pair<std::string, std::string>, std::uint64_t> brute_pair_counts(
    const std::vector<std::set<std::string>>& sessions) {
    std::set<std::string> all;
    for (const auto& s : sessions) all.insert(s.begin(), s.end());
    std::map<std::pair<std::string, std::string>, std::uint64_t> out;
    for (const auto& a : all) {
        for (const auto& b : all) {
            if (!(a < b)) continue;
            std::uint64_t n = 0;
            for (const auto& s : sessions) n += s.count(a) && s.count(b);
            if (n) out[{a, b}] = n;
        }
    }
    return out;
}

/// Newman modularity of a hard partition of a weighted undirected graph.
inline double modularity(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                         const std::vector<std::size_t>& community) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (auto [u, v, w] : edges) {
        a[u][v] += w;
        a[v][u] += w;
    }
    std::vector<double> k(n, 0.0);
    double two_m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += a[i][j];
            two_m += a[i][j];
        }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (community[i] == community[j]) q += a[i][j] - k[i] * k[j] / two_m;
    return q / two_m;
}

/// All set partitions of n items as restricted growth strings; returns the
/// partitions reaching the maximum modularity.
inline std::vector<std::vector<std::size_t>> best_partitions(
    std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    std::vector<std::vector<std::size_t>> best;
    double best_q = -1e300;
    std::vector<std::size_t> rgs(n, 0);
    auto visit = [&](auto&& self, std::size_t i, std::size_t max_label) -> void {
        if (i == n) {
            const double q = modularity(n, edges, rgs);
            if (q > best_q + 1e-12) {
                best_q = q;
                best = {rgs};
            } else if (q > best_q - 1e-12) {
                best.push_back(rgs);
            }
            return;
        }
        for (std::size_t label = 0; label <= max_label + 1; ++label) {
            rgs[i] = label;
            self(self, i + 1, std::max(max_label, label));
        }
    };
    if (n == 0) return best;
    rgs[0] = 0;
    visit(visit, 1, 0);
    return best;
}

}  // namespace geosugg::testing
