// geosugg: command-line front end for the session-based concept suggestion
// pipeline. Every stage can run on its own from the previous stage's file.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "geosugg/geosugg.hpp"

namespace {

using geosugg::PipelineConfig;

struct Flags {
    std::string config_file;
    std::optional<std::string> ontology, log, lexicon, strategy, out, format, empty_precision;
    std::optional<std::int64_t> gap_minutes, prune_min_weight, copra_v, copra_max_iter, folds, threads;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> exclude_facets;
    CLI::Option* exclude_opt = nullptr;

    // stage inputs
    std::string reduced, graph, clusters, query, f1_prefix;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "Config file (JSON or key = value)");
    cmd->add_option("--ontology", f.ontology, "Ontology JSON file");
    cmd->add_option("--log", f.log, "Query log TSV");
    cmd->add_option("--lexicon", f.lexicon, "Extra synonym lexicon JSON");
    cmd->add_option("--gap-minutes", f.gap_minutes, "Session gap threshold in minutes");
    cmd->add_option("--prune-min-weight", f.prune_min_weight, "Drop co-occurrence edges below this weight");
    cmd->add_option("--copra-v", f.copra_v, "Max communities per concept");
    cmd->add_option("--copra-max-iter", f.copra_max_iter, "COPRA iteration cap");
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--folds", f.folds, "Cross-validation folds");
    cmd->add_option("--strategy", f.strategy, "slack | slack-selective | strict | all");
    f.exclude_opt = cmd->add_option("--exclude-facet", f.exclude_facets, "Facet to exclude (repeatable)");
    cmd->add_option("--out", f.out, "Output file (default: stdout)");
    cmd->add_option("--format", f.format, "json | csv | text");
    cmd->add_option("--threads", f.threads, "Worker thread cap");
    cmd->add_option("--empty-precision", f.empty_precision, "exclude | zero | one");
}

PipelineConfig resolve(const Flags& f) {
    PipelineConfig cfg;
    if (!f.config_file.empty()) geosugg::apply_config_file(cfg, f.config_file);
    geosugg::apply_environment(cfg);
    if (f.ontology) cfg.ontology_path = *f.ontology;
    if (f.log) cfg.log_path = *f.log;
    if (f.lexicon) cfg.lexicon_path = *f.lexicon;
    if (f.gap_minutes) cfg.gap_minutes = *f.gap_minutes;
    if (f.prune_min_weight) cfg.prune_min_weight = *f.prune_min_weight;
    if (f.copra_v) cfg.copra_v = *f.copra_v;
    if (f.copra_max_iter) cfg.copra_max_iterations = *f.copra_max_iter;
    if (f.seed) cfg.seed = *f.seed;
    if (f.folds) cfg.folds = *f.folds;
    if (f.strategy) cfg.strategy = *f.strategy;
    if (f.exclude_opt && f.exclude_opt->count() > 0)
        cfg.excluded_facets = {f.exclude_facets.begin(), f.exclude_facets.end()};
    if (f.out) cfg.out = *f.out;
    if (f.format) cfg.format = *f.format;
    if (f.threads) cfg.threads = *f.threads;
    if (f.empty_precision) cfg.empty_precision = *f.empty_precision;
    cfg.validate();
    return cfg;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw geosugg::io_error(std::string("missing required input ") + flag);
}

void emit(const PipelineConfig& cfg, const std::string& content) {
    if (cfg.out.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        geosugg::write_file_atomic(cfg.out, content);
    }
}

void log_line(const std::string& msg) { std::cerr << "geosugg: " << msg << "\n"; }

// ---------------------------------------------------------------------------

nlohmann::json metrics_json(const geosugg::OntologyMetrics& m) {
    return {{"class_count", m.class_count},
            {"subclass_relation_count", m.subclass_relation_count},
            {"longest_root_to_leaf_path", m.longest_root_to_leaf_path},
            {"mean_node_degree", m.mean_node_degree}};
}

void cmd_ont_metrics(const PipelineConfig& cfg) {
    require(cfg.ontology_path, "--ontology");
    auto full = geosugg::with_stage("ontology", [&] { return geosugg::load_ontology(cfg.ontology_path); });
    if (!cfg.lexicon_path.empty())
        full = geosugg::with_stage("lexicon", [&] { return geosugg::apply_lexicon_file(full, cfg.lexicon_path); });
    const auto subset = geosugg::subset_by_facet(full, cfg.excluded_facets);
    const auto total_m = geosugg::compute_metrics(full);
    const auto subset_m = geosugg::compute_metrics(subset);
    const auto index = geosugg::build_lemma_index(subset);
    for (const auto& id : index.unannotated) log_line("warning: class '" + id + "' has no annotations");

    std::string out;
    if (cfg.format == "json") {
        out = nlohmann::json{{"ontology_path", cfg.ontology_path},
                             {"excluded_facets", cfg.excluded_facets},
                             {"total", metrics_json(total_m)},
                             {"subset", metrics_json(subset_m)},
                             {"unannotated_classes", index.unannotated.size()}}
                  .dump(2) +
              "\n";
    } else if (cfg.format == "csv") {
        out = "metric,total,subset\n";
        out += "class_count," + std::to_string(total_m.class_count) + "," + std::to_string(subset_m.class_count) + "\n";
        out += "subclass_relation_count," + std::to_string(total_m.subclass_relation_count) + "," +
               std::to_string(subset_m.subclass_relation_count) + "\n";
        out += "longest_root_to_leaf_path," + std::to_string(total_m.longest_root_to_leaf_path) + "," +
               std::to_string(subset_m.longest_root_to_leaf_path) + "\n";
        out += "mean_node_degree," + geosugg::format_double(total_m.mean_node_degree) + "," +
               geosugg::format_double(subset_m.mean_node_degree) + "\n";
    } else {
        char buf[256];
        out += "metric                        total      subset\n";
        std::snprintf(buf, sizeof buf, "%-26s %8zu %11zu\n", "classes", total_m.class_count, subset_m.class_count);
        out += buf;
        std::snprintf(buf, sizeof buf, "%-26s %8zu %11zu\n", "subclass relations", total_m.subclass_relation_count,
                      subset_m.subclass_relation_count);
        out += buf;
        std::snprintf(buf, sizeof buf, "%-26s %8zu %11zu\n", "longest path to leaves",
                      total_m.longest_root_to_leaf_path, subset_m.longest_root_to_leaf_path);
        out += buf;
        std::snprintf(buf, sizeof buf, "%-26s %8.3f %11.3f\n", "mean node degree", total_m.mean_node_degree,
                      subset_m.mean_node_degree);
        out += buf;
    }
    emit(cfg, out);
}

void cmd_reduce(const PipelineConfig& cfg) {
    require(cfg.ontology_path, "--ontology");
    require(cfg.log_path, "--log");
    const auto reduced = geosugg::run_reduce(cfg);
    const auto& st = reduced.dataset.source_stats;
    log_line("reduce: kept " + std::to_string(st.sessions) + " of " + std::to_string(st.input_sessions) +
             " sessions (" + std::to_string(reduced.skipped_rows) + " malformed rows skipped)");
    emit(cfg, geosugg::write_reduced(reduced));
}

void cmd_stats(const PipelineConfig& cfg, const Flags& f) {
    require(f.reduced, "--reduced");
    const auto reduced = geosugg::with_stage("read reduced", [&] { return geosugg::read_reduced_file(f.reduced); });
    const auto lengths = geosugg::with_stage("stats", [&] { return geosugg::session_length_stats(reduced.dataset); });
    const auto& st = reduced.dataset.source_stats;
    std::string out;
    if (cfg.format == "text") {
        std::ostringstream os;
        os << "queries   " << st.queries << "\nsessions  " << st.sessions << "\nusers     " << st.users
           << "\nlength min " << lengths.min << " max " << lengths.max << " mean " << geosugg::format_double(lengths.mean)
           << " median " << lengths.median << " stdev " << geosugg::format_double(lengths.stdev) << "\n";
        out = os.str();
    } else {
        out = nlohmann::json{{"provenance", reduced.provenance},
                             {"source_stats", geosugg::to_json(st)},
                             {"session_length", geosugg::to_json(lengths)}}
                  .dump(2) +
              "\n";
    }
    emit(cfg, out);
}

void cmd_graph(const PipelineConfig& cfg, const Flags& f) {
    require(f.reduced, "--reduced");
    const auto reduced = geosugg::with_stage("read reduced", [&] { return geosugg::read_reduced_file(f.reduced); });
    const auto graph = geosugg::with_stage("graph", [&] {
        return geosugg::prune(geosugg::build_graph(reduced.dataset, static_cast<unsigned>(cfg.threads)),
                              static_cast<std::uint64_t>(cfg.prune_min_weight));
    });
    log_line("graph: " + std::to_string(graph.nodes().size()) + " nodes, " + std::to_string(graph.edges().size()) +
             " edges after pruning");
    emit(cfg, geosugg::write_graph_tsv(graph, geosugg::make_provenance("graph", geosugg::graph_params(cfg),
                                                                       reduced.provenance)));
}

void cmd_cluster(const PipelineConfig& cfg, const Flags& f) {
    require(f.graph, "--graph");
    const auto gf = geosugg::with_stage("read graph", [&] { return geosugg::read_graph_file(f.graph); });
    const auto copra = cfg.experiment().copra;
    const auto result = geosugg::with_stage("cluster", [&] {
        return geosugg::copra_cluster(gf.graph, copra, static_cast<unsigned>(cfg.threads));
    });
    const auto st = geosugg::cluster_stats(result.clusters);
    log_line("cluster: " + std::to_string(st.count) + " clusters after " + std::to_string(result.iterations) +
             " iterations" + (result.converged ? "" : " (not converged)"));
    const auto prov = geosugg::make_provenance("cluster", geosugg::cluster_params(cfg), gf.provenance);
    emit(cfg, geosugg::clusters_to_json(result, copra, prov).dump(2) + "\n");
}

void cmd_eval(const PipelineConfig& cfg, const Flags& f) {
    geosugg::ReducedFile reduced;
    if (!f.reduced.empty()) {
        reduced = geosugg::with_stage("read reduced", [&] { return geosugg::read_reduced_file(f.reduced); });
    } else {
        require(cfg.ontology_path, "--ontology");
        require(cfg.log_path, "--log");
        reduced = geosugg::run_reduce(cfg);
    }
    const auto result = geosugg::run_experiment(reduced, cfg);
    for (const auto& s : result.report.strategies) {
        log_line("eval: " + std::string(geosugg::to_string(s.strategy)) + " R=" + geosugg::format_double(s.recall) +
                 " P=" + geosugg::format_double(s.precision) + " F1=" + geosugg::format_double(s.f1));
    }
    if (!f.f1_prefix.empty()) {
        for (const auto& s : result.report.strategies)
            geosugg::write_file_atomic(f.f1_prefix + std::string(geosugg::to_string(s.strategy)) + ".csv",
                                       geosugg::f1_by_length_csv(s.f1_by_length));
    }
    if (cfg.format == "csv")
        emit(cfg, geosugg::report_to_csv(result.report, result.provenance));
    else
        emit(cfg, geosugg::report_to_json(result.report, result.provenance).dump(2) + "\n");
}

void cmd_suggest(const PipelineConfig& cfg, const Flags& f) {
    require(cfg.ontology_path, "--ontology");
    require(f.clusters, "--clusters");
    const auto matcher = geosugg::load_matcher(cfg);
    const auto cf = geosugg::with_stage("read clusters", [&] { return geosugg::read_clusters_file(f.clusters); });
    const auto context = matcher.match_query(f.query);

    nlohmann::json suggestions = nlohmann::json::object();
    for (auto s : cfg.strategies()) {
        const auto r = geosugg::suggest(cf.clusters, context, s);
        suggestions[std::string(geosugg::to_string(s))] = {{"selected_clusters", r.selected_clusters},
                                                           {"suggested", r.suggested}};
    }
    nlohmann::json out{{"provenance", geosugg::make_provenance("suggest", geosugg::reduce_params(cfg), cf.provenance)},
                       {"query", f.query},
                       {"context", context},
                       {"suggestions", std::move(suggestions)}};
    emit(cfg, out.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Session-based concept suggestion over annotated ontologies"};
    app.require_subcommand(1);
    Flags f;

    auto* ont = app.add_subcommand("ont-metrics", "Structural metrics of an ontology and its facet subset");
    auto* reduce = app.add_subcommand("reduce", "Sessionize the log and keep sessions that reference concepts");
    auto* stats = app.add_subcommand("stats", "Size and session-length statistics of a reduced dataset");
    auto* graph = app.add_subcommand("graph", "Build and prune the concept co-occurrence graph");
    auto* cluster = app.add_subcommand("cluster", "Detect overlapping concept clusters with COPRA");
    auto* eval = app.add_subcommand("eval", "Cross-validated evaluation of the suggestion strategies");
    auto* sugg = app.add_subcommand("suggest", "Suggest concepts for one query");
    for (auto* cmd : {ont, reduce, stats, graph, cluster, eval, sugg}) add_common(cmd, f);

    stats->add_option("--reduced", f.reduced, "Reduced dataset (NDJSON)")->required();
    graph->add_option("--reduced", f.reduced, "Reduced dataset (NDJSON)")->required();
    cluster->add_option("--graph", f.graph, "Graph TSV")->required();
    eval->add_option("--reduced", f.reduced, "Reduced dataset; skips parsing the raw log");
    eval->add_option("--f1-by-length", f.f1_prefix, "Write <prefix><strategy>.csv tables of F1 by session length");
    sugg->add_option("--clusters", f.clusters, "Cluster JSON")->required();
    sugg->add_option("--query", f.query, "Query text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    PipelineConfig cfg;
    try {
        cfg = resolve(f);
    } catch (const std::exception& e) {
        std::cerr << "geosugg: usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (ont->parsed()) {
            if (cfg.format.empty()) cfg.format = "text";
            cmd_ont_metrics(cfg);
        } else {
            if (cfg.format.empty()) cfg.format = "json";
            if (reduce->parsed()) cmd_reduce(cfg);
            else if (stats->parsed()) cmd_stats(cfg, f);
            else if (graph->parsed()) cmd_graph(cfg, f);
            else if (cluster->parsed()) cmd_cluster(cfg, f);
            else if (eval->parsed()) cmd_eval(cfg, f);
            else if (sugg->parsed()) cmd_suggest(cfg, f);
        }
    } catch (const geosugg::io_error& e) {
        std::cerr << "geosugg: error: " << e.what() << "\n";
        return 2;
    } catch (const geosugg::parse_error& e) {
        std::cerr << "geosugg: error: " << e.what() << "\n";
        return 1;
    } catch (const geosugg::validation_error& e) {
        std::cerr << "geosugg: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "geosugg: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
