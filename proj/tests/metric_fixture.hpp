#pragma once

// Twenty hand-specified session outcomes with exact expected metrics,
// worked out with rational arithmetic.

#include <string>
#include <tuple>
#include <vector>

#include "geosugg/evaluation.hpp"

namespace geosugg::testing {

/// (|ground truth|, |suggested|, hits) per session
inline const std::vector<std::tuple<int, int, int>> metric_rows = {
    {2, 2, 1}, {3, 1, 1}, {1, 3, 1}, {4, 2, 0}, {2, 0, 0}, {0, 2, 0}, {5, 5, 3}, {1, 1, 1}, {3, 4, 2}, {2, 3, 2},
    {0, 0, 0}, {6, 2, 2}, {3, 0, 0}, {1, 4, 0}, {2, 5, 2}, {4, 4, 4}, {3, 3, 1}, {0, 5, 0}, {5, 1, 0}, {2, 2, 2}};

inline std::vector<SessionOutcome> metric_outcomes() {
    std::vector<SessionOutcome> out;
    int i = 0;
    for (auto [g, s, h] : metric_rows) {
        SessionOutcome o;
        o.session_id = "s" + std::to_string(++i);
        o.length = 2;
        o.context = {"ctx"};
        for (int k = 0; k < g; ++k) o.ground_truth.insert(o.session_id + "_g" + std::to_string(k));
        for (int k = 0; k < h; ++k) o.suggested.insert(o.session_id + "_g" + std::to_string(k));
        for (int k = h; k < s; ++k) o.suggested.insert(o.session_id + "_x" + std::to_string(k));
        o.hits = static_cast<std::size_t>(h);
        out.push_back(o);
    }
    return out;
}

struct ExpectedMetrics {
    double recall, precision, f1;
};

inline constexpr std::size_t metric_included = 17;
inline constexpr std::size_t metric_precision_sessions = 15;
inline constexpr ExpectedMetrics metric_exclude{263.0 / 510.0, 5.0 / 9.0, 2630.0 / 4917.0};
inline constexpr ExpectedMetrics metric_zero{263.0 / 510.0, 25.0 / 51.0, 13150.0 / 26163.0};
inline constexpr ExpectedMetrics metric_one{263.0 / 510.0, 31.0 / 51.0, 16306.0 / 29223.0};
inline constexpr double metric_mean_session_f1 = 827.0 / 1785.0;
inline constexpr double metric_richness_mean = 22.0 / 17.0;
inline constexpr double metric_suggested_mean = 42.0 / 17.0;

}  // namespace geosugg::testing
