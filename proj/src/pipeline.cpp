#include "toxtrace/pipeline.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "toxtrace/csv.hpp"
#include "toxtrace/datetime.hpp"
#include "toxtrace/graph.hpp"
#include "toxtrace/report.hpp"
#include "toxtrace/trends.hpp"
#include "toxtrace/util.hpp"

namespace fs = std::filesystem;

namespace toxtrace {

std::string_view stage_name(Stage s) {
    switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::score: return "score";
    case Stage::filter: return "filter";
    case Stage::topics: return "topics";
    case Stage::categorize: return "categorize";
    case Stage::network: return "network";
    case Stage::trends: return "trends";
    case Stage::manifest: return "manifest";
    }
    return "unknown";
}

namespace {

template <typename Fn>
void run_stage(Stage stage, std::ostream& log, Fn&& fn) {
    log << "[" << stage_name(stage) << "] ";
    try {
        fn();
    } catch (const Error& e) {
        log << "failed: " << e.what() << "\n";
        throw StageError(stage, e);
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    return in;
}

struct RelationReports {
    Relation relation;
    InteractionGraph graph;
    NetworkStats stats;
    CentralityTable table;
    CommunityPartition partition;
    std::vector<std::pair<RankMetric, std::vector<RankedUser>>> rankings;
};

} // namespace

RunSummary run_all(const RunConfig& config, std::ostream& log) {
    config.validate();
    const ReportMeta meta{config.hash(), config.seed};
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorKind::io,
                    "cannot create output directory '" + config.output_dir + "'");

    RunSummary summary;
    Corpus corpus;

    run_stage(Stage::ingest, log, [&] {
        auto in = open_input(config.input);
        corpus = parse_records(in, &log);
        auto out = open_output(dir / "corpus.jsonl");
        write_report_header(out, meta);
        serialize_corpus(corpus, out);
        summary.records = corpus.records.size();
        summary.duplicates = corpus.dropped_duplicates;
        summary.invalid = corpus.dropped_invalid;
        log << summary.records << " records kept, " << summary.duplicates
            << " duplicates, " << summary.invalid << " invalid\n";
    });

    std::unordered_map<std::string, ToxicityScore> scores;
    run_stage(Stage::score, log, [&] {
        auto scorer = make_scorer(config.provider, config.toxicity);
        std::vector<ToxicityScore> scored = score_corpus(corpus, *scorer);
        ScoreCache cache;
        for (const ToxicityScore& s : scored) cache.put(s);
        auto out = open_output(dir / "scores.jsonl");
        write_report_header(out, meta);
        cache.save(out);
        scores = cache.all();
        log << scored.size() << " records scored via " << provider_name(scorer->provider())
            << "\n";
    });

    Corpus toxic;
    run_stage(Stage::filter, log, [&] {
        toxic = filter_toxic(corpus, scores, config.toxicity.threshold);
        auto out = open_output(dir / "toxic.jsonl");
        write_report_header(out, meta);
        serialize_corpus(toxic, out);
        summary.toxic = toxic.records.size();
        log << summary.toxic << " records at or above threshold "
            << format_double(config.toxicity.threshold) << "\n";
    });

    TopicModel model;
    run_stage(Stage::topics, log, [&] {
        std::vector<std::string> cleaned;
        cleaned.reserve(toxic.records.size());
        for (const TweetRecord& rec : toxic.records)
            cleaned.push_back(clean_for_embedding(rec.text));
        TopicConfig tc = config.topics;
        tc.seed = config.stage_seed("topics");
        HashEmbedder embedder;
        PcaReducer reducer;
        model = fit_topics(cleaned, tc, embedder, reducer, config.threads);
        for (int topic : model.assignments)
            if (topic < 0) ++summary.unclustered;
        log << config.topics.k << " topics fitted, " << summary.unclustered
            << " records left unclustered\n";
    });

    std::vector<std::string> categories;
    run_stage(Stage::categorize, log, [&] {
        auto map_in = open_input(config.category_map);
        CategoryMap category_map = CategoryMap::from_json(map_in);
        model.category_map = category_map.topic_to_category;
        categories = apply_categories(model, category_map);

        auto topics_out = open_output(dir / "topics.csv");
        write_topics_csv(topics_out, model, meta);
        auto viz_out = open_output(dir / "viz_2d.csv");
        write_viz_csv(viz_out, toxic, model, categories, meta);
        auto assign_out = open_output(dir / "assignments.csv");
        write_assignments_csv(assign_out, toxic, model, categories, meta);
        log << model.category_map.size() << " topics categorized\n";
    });

    std::vector<RelationReports> relation_reports;
    std::vector<GraphEdge> all_edges;
    run_stage(Stage::network, log, [&] {
        DedupResult deduped = dedup_for_network(toxic);

        std::unordered_map<std::string, UserProfile> profiles;
        if (!config.profiles.empty()) {
            auto in = open_input(config.profiles);
            profiles = load_profiles(in);
        }
        harvest_profiles(corpus, profiles);

        for (Relation relation : config.relations) {
            RelationReports r;
            r.relation = relation;
            r.graph = InteractionGraph::build(deduped.corpus, relation);
            r.stats = summarize(r.graph);
            r.table = centrality(r.graph, config.threads);
            if (r.graph.undirected_edge_count() > 0) r.partition = cnm_communities(r.graph);
            for (RankMetric metric : {RankMetric::in_degree, RankMetric::betweenness})
                r.rankings.emplace_back(
                    metric, rank_users(r.table, metric, config.top_users, r.partition,
                                       profiles));
            all_edges.insert(all_edges.end(), r.graph.edges().begin(),
                             r.graph.edges().end());
            relation_reports.push_back(std::move(r));
        }

        auto edges_out = open_output(dir / "edges.csv");
        write_edges_csv(edges_out, all_edges, meta);

        std::vector<std::pair<Relation, NetworkStats>> stats_rows;
        for (const RelationReports& r : relation_reports)
            stats_rows.emplace_back(r.relation, r.stats);
        auto stats_out = open_output(dir / "network_stats.csv");
        write_stats_csv(stats_out, stats_rows, meta);

        auto centrality_out = open_output(dir / "centrality.csv");
        write_report_header(centrality_out, meta);
        write_centrality_header(centrality_out, true);
        for (const RelationReports& r : relation_reports)
            write_centrality_rows(centrality_out, r.table, r.partition, profiles, r.relation);

        auto communities_out = open_output(dir / "communities.csv");
        write_report_header(communities_out, meta);
        write_communities_header(communities_out, true);
        for (const RelationReports& r : relation_reports)
            write_communities_rows(communities_out, r.partition, r.relation);

        auto top_out = open_output(dir / "top_users.csv");
        write_report_header(top_out, meta);
        write_top_users_header(top_out, true);
        for (const RelationReports& r : relation_reports)
            for (const auto& [metric, rows] : r.rankings)
                write_top_users_rows(top_out, metric, rows, r.relation);

        log << relation_reports.size() << " relation graphs built, "
            << all_edges.size() << " edges total\n";
    });

    run_stage(Stage::trends, log, [&] {
        std::unordered_map<std::string, std::string> category_of_record;
        Corpus categorized;
        std::vector<std::string> categorized_labels;
        for (std::size_t i = 0; i < toxic.records.size(); ++i) {
            if (categories[i].empty()) continue; // unclustered records carry no category
            category_of_record[toxic.records[i].id] = categories[i];
            categorized.records.push_back(toxic.records[i]);
            categorized_labels.push_back(categories[i]);
        }

        DailySeries series = daily_volume(categorized, categorized_labels);
        auto daily_out = open_output(dir / "daily_volume.csv");
        write_daily_csv(daily_out, series, meta);

        CompositionTable composition_table = composition(series);
        auto weekly_out = open_output(dir / "weekly_shares.csv");
        write_weekly_csv(weekly_out, composition_table, meta);

        auto hashtags = hashtag_counts(toxic, config.top_hashtags);
        auto hashtags_out = open_output(dir / "hashtags.csv");
        write_hashtags_csv(hashtags_out, hashtags, meta);

        std::vector<GraphEdge> categorized_edges;
        for (const GraphEdge& e : all_edges)
            if (category_of_record.count(e.record_id)) categorized_edges.push_back(e);
        auto tally = user_category_mentions(categorized_edges, category_of_record);
        auto users_out = open_output(dir / "user_categories.csv");
        write_user_categories_csv(users_out, tally, meta);

        log << series.total() << " categorized records across " << series.by_day.size()
            << " days\n";
    });

    summary.reports = {"topics.csv",        "viz_2d.csv",        "edges.csv",
                       "centrality.csv",    "communities.csv",   "daily_volume.csv",
                       "weekly_shares.csv", "hashtags.csv",      "user_categories.csv"};

    run_stage(Stage::manifest, log, [&] {
        nlohmann::json manifest = {
            {"tool_version", std::string(kToolVersion)},
            {"config", config.to_json()},
            {"output_dir", config.output_dir},
            {"config_hash", meta.config_hash},
            {"seed", config.seed},
            {"generated_at", format_rfc3339_utc(static_cast<std::int64_t>(std::time(nullptr)))},
            {"counts",
             {{"records", summary.records},
              {"duplicates", summary.duplicates},
              {"invalid", summary.invalid},
              {"toxic", summary.toxic},
              {"unclustered", summary.unclustered}}},
            {"reports", summary.reports},
            {"artifacts",
             {"corpus.jsonl", "scores.jsonl", "toxic.jsonl", "assignments.csv",
              "network_stats.csv", "top_users.csv"}},
        };
        auto out = open_output(dir / "manifest.json");
        out << manifest.dump(2) << "\n";
        log << "run manifest written\n";
    });

    return summary;
}

} // namespace toxtrace
