#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geosugg/concept_set.hpp"
#include "geosugg/cooccurrence.hpp"

namespace geosugg {

enum class Strategy { slack, slack_selective, strict };

inline constexpr std::array<Strategy, 3> all_strategies = {Strategy::slack, Strategy::slack_selective,
                                                          Strategy::strict};

inline std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::slack: return "slack";
        case Strategy::slack_selective: return "slack-selective";
        case Strategy::strict: return "strict";
    }
    return "unknown";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
    for (auto s : all_strategies)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

struct SuggestionResult {
    std::vector<std::size_t> selected_clusters;
    ConceptSet suggested;
    ConceptSet context;
};

/**
 * Selects clusters against the observed context and suggests their members
 * not already in the context.
 *
 *   slack            every cluster sharing at least one concept with the context
 *   slack-selective  the one cluster with the largest overlap; lowest id wins ties
 *   strict           every cluster containing the whole context
 *
 * An empty context selects nothing.
 */
inline SuggestionResult suggest(const std::vector<ConceptCluster>& clusters, const ConceptSet& context,
                                Strategy strategy) {
    SuggestionResult r;
    r.context = context;
    if (context.empty()) return r;

    switch (strategy) {
        case Strategy::slack:
            for (const auto& cl : clusters)
                if (intersection_size(cl.members, context) > 0) r.selected_clusters.push_back(cl.id);
            break;
        case Strategy::slack_selective: {
            const ConceptCluster* best = nullptr;
            std::size_t best_degree = 0;
            for (const auto& cl : clusters) {
                const std::size_t degree = intersection_size(cl.members, context);
                if (degree == 0) continue;
                if (!best || degree > best_degree || (degree == best_degree && cl.id < best->id)) {
                    best = &cl;
                    best_degree = degree;
                }
            }
            if (best) r.selected_clusters.push_back(best->id);
            break;
        }
        case Strategy::strict:
            for (const auto& cl : clusters)
                if (is_subset(context, cl.members)) r.selected_clusters.push_back(cl.id);
            break;
    }

    for (std::size_t id : r.selected_clusters) {
        for (const auto& cl : clusters) {
            if (cl.id != id) continue;
            for (const auto& m : cl.members)
                if (!context.count(m)) r.suggested.insert(m);
        }
    }
    return r;
}

}  // namespace geosugg
