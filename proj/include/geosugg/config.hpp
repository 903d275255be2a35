#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geosugg/errors.hpp"
#include "geosugg/evaluation.hpp"
#include "geosugg/ontology.hpp"
#include "geosugg/suggestion.hpp"

namespace geosugg {

/// Settings shared by every CLI stage. Precedence, lowest first: defaults,
/// config file, GEOSUGG_* environment variables, command-line flags.
struct PipelineConfig {
    std::string ontology_path;
    std::string log_path;
    std::string lexicon_path;
    std::int64_t gap_minutes = 30;
    std::int64_t prune_min_weight = 2;
    std::int64_t copra_v = 2;
    std::int64_t copra_max_iterations = 100;
    std::uint64_t seed = 42;
    std::int64_t folds = 10;
    std::set<std::string> excluded_facets{"administrative"};
    std::string strategy = "all";
    std::string empty_precision = "exclude";
    std::string out;
    /// empty selects the stage default (text for ont-metrics, json otherwise)
    std::string format;
    std::int64_t threads = 1;

    bool operator==(const PipelineConfig&) const = default;

    /// Throws validation_error naming the first field outside its range.
    void validate() const {
        auto need = [](bool ok, const std::string& what) {
            if (!ok) throw validation_error("config: " + what);
        };
        need(gap_minutes > 0, "gap_minutes must be > 0");
        need(prune_min_weight >= 1, "prune_min_weight must be >= 1");
        need(copra_v >= 1, "copra_v must be >= 1");
        need(copra_max_iterations >= 1, "copra_max_iterations must be >= 1");
        need(folds >= 2, "folds must be >= 2");
        need(threads >= 1 && threads <= 1024, "threads must be in 1..1024");
        need(strategy == "all" || parse_strategy(strategy).has_value(),
             "strategy must be one of slack, slack-selective, strict, all");
        need(empty_precision == "exclude" || empty_precision == "zero" || empty_precision == "one",
             "empty_precision must be exclude, zero or one");
        need(format.empty() || format == "json" || format == "csv" || format == "text", "format must be json, csv or text");
    }

    std::vector<Strategy> strategies() const {
        if (strategy == "all") return {all_strategies.begin(), all_strategies.end()};
        return {*parse_strategy(strategy)};
    }

    EmptySuggestionPrecision empty_precision_policy() const {
        if (empty_precision == "zero") return EmptySuggestionPrecision::zero;
        if (empty_precision == "one") return EmptySuggestionPrecision::one;
        return EmptySuggestionPrecision::exclude;
    }

    ExperimentConfig experiment() const {
        ExperimentConfig e;
        e.prune_min_weight = static_cast<std::uint64_t>(prune_min_weight);
        e.copra.v = static_cast<std::size_t>(copra_v);
        e.copra.max_iterations = static_cast<std::size_t>(copra_max_iterations);
        e.copra.seed = seed;
        e.folds = static_cast<std::size_t>(folds);
        e.seed = seed;
        e.strategies = strategies();
        e.empty_precision = empty_precision_policy();
        return e;
    }

    /// Sets one field from its textual form; keys use the snake_case names.
    void set(std::string_view key, const std::string& value) {
        auto as_int = [&](std::int64_t& field) {
            try {
                std::size_t used = 0;
                field = std::stoll(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw parse_error("config: '" + std::string(key) + "' expects an integer, got '" + value + "'");
            }
        };
        if (key == "ontology" || key == "ontology_path") ontology_path = value;
        else if (key == "log" || key == "log_path") log_path = value;
        else if (key == "lexicon" || key == "lexicon_path") lexicon_path = value;
        else if (key == "gap_minutes") as_int(gap_minutes);
        else if (key == "prune_min_weight") as_int(prune_min_weight);
        else if (key == "copra_v") as_int(copra_v);
        else if (key == "copra_max_iterations" || key == "copra_max_iter") as_int(copra_max_iterations);
        else if (key == "seed") {
            std::int64_t s = 0;
            as_int(s);
            seed = static_cast<std::uint64_t>(s);
        } else if (key == "folds") as_int(folds);
        else if (key == "excluded_facets" || key == "exclude_facet") {
            excluded_facets.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto b = item.find_first_not_of(" \t");
                auto e = item.find_last_not_of(" \t");
                if (b != std::string::npos) excluded_facets.insert(item.substr(b, e - b + 1));
            }
        } else if (key == "strategy") strategy = value;
        else if (key == "empty_precision") empty_precision = value;
        else if (key == "out") out = value;
        else if (key == "format") format = value;
        else if (key == "threads") as_int(threads);
        else throw parse_error("config: unknown key '" + std::string(key) + "'");
    }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
    return {{"ontology_path", c.ontology_path},
            {"log_path", c.log_path},
            {"lexicon_path", c.lexicon_path},
            {"gap_minutes", c.gap_minutes},
            {"prune_min_weight", c.prune_min_weight},
            {"copra_v", c.copra_v},
            {"copra_max_iterations", c.copra_max_iterations},
            {"seed", c.seed},
            {"folds", c.folds},
            {"excluded_facets", c.excluded_facets},
            {"strategy", c.strategy},
            {"empty_precision", c.empty_precision},
            {"out", c.out},
            {"format", c.format},
            {"threads", c.threads}};
}

/// Applies a JSON object or a flat "key = value" document onto `cfg`.
inline void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& where) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto j = detail::parse_json_text(text, where);
        for (const auto& [key, value] : j.items()) {
            if (value.is_string()) {
                cfg.set(key, value.get<std::string>());
            } else if (value.is_number_integer()) {
                cfg.set(key, value.dump());
            } else if (value.is_array() && (key == "excluded_facets" || key == "exclude_facet")) {
                cfg.excluded_facets.clear();
                for (const auto& f : value) cfg.excluded_facets.insert(f.get<std::string>());
            } else {
                throw parse_error(where + ": unsupported value for '" + key + "'");
            }
        }
        return;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(where + ":" + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto l = s.find_first_not_of(" \t\r");
            const auto r = s.find_last_not_of(" \t\r");
            return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

inline void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    apply_config_text(cfg, detail::read_file(path), path);
}

inline constexpr const char* config_keys[] = {"ontology_path", "log_path", "lexicon_path", "gap_minutes",
                                              "prune_min_weight", "copra_v", "copra_max_iterations", "seed",
                                              "folds", "excluded_facets", "strategy", "empty_precision",
                                              "out", "format", "threads"};

/// GEOSUGG_<KEY> (upper-case key) overrides the matching field.
inline void apply_environment(PipelineConfig& cfg) {
    for (const char* key : config_keys) {
        std::string name = "GEOSUGG_";
        for (const char* p = key; *p; ++p) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(*p))));
        if (const char* value = std::getenv(name.c_str())) cfg.set(key, value);
    }
}

// ---------------------------------------------------------------------------
// Provenance embedded in every artifact.

inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline constexpr int stage_version = 1;

/// {"stage", "stage_version", "config", "config_hash", "seed"?, "upstream"?}
inline nlohmann::json make_provenance(std::string_view stage, nlohmann::json params,
                                      const nlohmann::json& upstream = nullptr) {
    nlohmann::json p;
    p["stage"] = stage;
    p["stage_version"] = stage_version;
    if (params.contains("seed")) p["seed"] = params["seed"];
    p["config_hash"] = fnv1a_hex(params.dump());
    p["config"] = std::move(params);
    if (!upstream.is_null()) p["upstream"] = upstream;
    return p;
}

inline nlohmann::json reduce_params(const PipelineConfig& c) {
    return {{"ontology_path", c.ontology_path},
            {"lexicon_path", c.lexicon_path},
            {"log_path", c.log_path},
            {"gap_minutes", c.gap_minutes},
            {"excluded_facets", c.excluded_facets},
            {"normalizer", normalizer_id},
            {"index_labels", true}};
}

inline nlohmann::json graph_params(const PipelineConfig& c) { return {{"prune_min_weight", c.prune_min_weight}}; }

inline nlohmann::json cluster_params(const PipelineConfig& c) {
    return {{"copra_v", c.copra_v},
            {"copra_max_iterations", c.copra_max_iterations},
            {"seed", c.seed},
            {"self_vote", CopraConfig{}.self_vote}};
}

inline nlohmann::json eval_params(const PipelineConfig& c) {
    nlohmann::json strategies = nlohmann::json::array();
    for (auto s : c.strategies()) strategies.push_back(to_string(s));
    return {{"prune_min_weight", c.prune_min_weight},
            {"copra_v", c.copra_v},
            {"copra_max_iterations", c.copra_max_iterations},
            {"seed", c.seed},
            {"folds", c.folds},
            {"strategies", strategies},
            {"empty_precision", c.empty_precision}};
}

}  // namespace geosugg
