#pragma once

#include <chrono>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "geosugg/config.hpp"
#include "geosugg/cooccurrence.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/evaluation.hpp"
#include "geosugg/io.hpp"
#include "geosugg/log_pipeline.hpp"
#include "geosugg/matching.hpp"
#include "geosugg/ontology.hpp"

namespace geosugg {

/// Runs `fn`, prefixing any library error with "[stage] " while keeping its
/// type, so callers can still map error kinds to exit codes.
template <typename Fn>
decltype(auto) with_stage(const std::string& stage, Fn&& fn) {
    const std::string prefix = "[" + stage + "] ";
    try {
        return std::forward<Fn>(fn)();
    } catch (const io_error& e) {
        throw io_error(prefix + e.what());
    } catch (const parse_error& e) {
        throw parse_error(prefix + e.what());
    } catch (const validation_error& e) {
        throw validation_error(prefix + e.what());
    } catch (const pipeline_error& e) {
        throw pipeline_error(prefix + e.what());
    } catch (const std::invalid_argument& e) {
        throw validation_error(prefix + e.what());
    }
}

/// Ontology after lexicon merge and facet exclusion.
inline Ontology load_active_ontology(const PipelineConfig& cfg) {
    auto ont = with_stage("ontology", [&] { return load_ontology(cfg.ontology_path); });
    if (!cfg.lexicon_path.empty())
        ont = with_stage("lexicon", [&] { return apply_lexicon_file(ont, cfg.lexicon_path); });
    return with_stage("subset", [&] { return subset_by_facet(ont, cfg.excluded_facets); });
}

inline ConceptMatcher load_matcher(const PipelineConfig& cfg) {
    const auto ont = load_active_ontology(cfg);
    return with_stage("lemma index", [&] { return ConceptMatcher::from_ontology(ont); });
}

/// Parses, sessionizes and reduces the log named in `cfg`.
inline ReducedFile run_reduce(const PipelineConfig& cfg) {
    cfg.validate();
    const auto matcher = load_matcher(cfg);
    auto parsed = with_stage("parse log", [&] { return parse_log(cfg.log_path); });
    auto sessions = with_stage("sessionize", [&] {
        return split_sessions(parsed.records, std::chrono::minutes(cfg.gap_minutes));
    });
    ReducedFile f;
    f.dataset = with_stage("reduce", [&] {
        return reduce_dataset(sessions, matcher, static_cast<unsigned>(cfg.threads));
    });
    f.skipped_rows = parsed.skipped_rows;
    f.provenance = make_provenance("reduce", reduce_params(cfg));
    return f;
}

struct ExperimentOutput {
    EvaluationReport report;
    nlohmann::json provenance;
};

/// Cross-validated evaluation over an already reduced dataset.
inline ExperimentOutput run_experiment(const ReducedFile& reduced, const PipelineConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    out.report = with_stage("evaluate", [&] {
        return run_experiment(reduced.dataset, cfg.experiment(), static_cast<unsigned>(cfg.threads));
    });
    out.provenance = make_provenance("eval", eval_params(cfg), reduced.provenance);
    return out;
}

/// Full pipeline from the raw log and ontology file.
inline ExperimentOutput run_experiment(const std::string& log_path, const std::string& ontology_path,
                                       PipelineConfig cfg) {
    cfg.log_path = log_path;
    cfg.ontology_path = ontology_path;
    return run_experiment(run_reduce(cfg), cfg);
}

}  // namespace geosugg
