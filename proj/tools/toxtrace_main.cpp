// toxtrace: batch toxicity analytics over tweet JSONL dumps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "toxtrace/config.hpp"
#include "toxtrace/corpus.hpp"
#include "toxtrace/csv.hpp"
#include "toxtrace/error.hpp"
#include "toxtrace/graph.hpp"
#include "toxtrace/pipeline.hpp"
#include "toxtrace/report.hpp"
#include "toxtrace/topics.hpp"
#include "toxtrace/toxicity.hpp"
#include "toxtrace/trends.hpp"
#include "toxtrace/util.hpp"

namespace fs = std::filesystem;
using namespace toxtrace;

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    return out;
}

Corpus load_corpus(const std::string& path) {
    auto in = open_input(path);
    return parse_records(in, &std::cerr);
}

ScoreCache load_scores(const std::string& path) {
    auto in = open_input(path);
    return ScoreCache::load(in);
}

// record_id -> category, read back from an assignments.csv export
std::unordered_map<std::string, std::string> load_assignments(const std::string& path) {
    auto in = open_input(path);
    std::unordered_map<std::string, std::string> out;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = csv::parse_line(line);
        if (!saw_header) {
            saw_header = true;
            if (!fields.empty() && fields[0] == "record_id") continue;
        }
        if (fields.size() < 3)
            throw Error(ErrorKind::input,
                        "assignments file '" + path + "': expected record_id,topic_id,category");
        out[fields[0]] = fields[2];
    }
    if (!saw_header)
        throw Error(ErrorKind::input, "assignments file '" + path + "' is empty");
    return out;
}

struct IngestOpts {
    std::string input, output;
};

int cmd_ingest(const IngestOpts& opts, const ReportMeta& meta) {
    auto in = open_input(opts.input);
    Corpus corpus = parse_records(in, &std::cerr);
    if (opts.output.empty()) {
        write_report_header(std::cout, meta);
        serialize_corpus(corpus, std::cout);
        std::cerr << corpus.records.size() << " kept, " << corpus.dropped_duplicates
                  << " duplicates, " << corpus.dropped_invalid << " invalid\n";
    } else {
        auto out = open_output(opts.output);
        write_report_header(out, meta);
        serialize_corpus(corpus, out);
        std::cout << corpus.records.size() << " kept, " << corpus.dropped_duplicates
                  << " duplicates, " << corpus.dropped_invalid << " invalid\n";
    }
    return 0;
}

struct ScoreOpts {
    std::string input, output, cache;
};

int cmd_score(const ScoreOpts& opts, ScoreProvider provider, const ToxicityConfig& tox,
              const ReportMeta& meta) {
    Corpus corpus = load_corpus(opts.input);

    ScoreCache cache;
    if (!opts.cache.empty() && fs::exists(opts.cache)) cache = load_scores(opts.cache);

    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        if (!cache.contains(corpus.records[i].id)) missing.push_back(i);

    if (!missing.empty()) {
        auto scorer = make_scorer(provider, tox);
        std::vector<std::string> texts;
        texts.reserve(missing.size());
        for (std::size_t i : missing) texts.push_back(corpus.records[i].text);
        std::vector<double> values = scorer->score(texts);
        for (std::size_t k = 0; k < missing.size(); ++k)
            cache.put({corpus.records[missing[k]].id, values[k], scorer->provider()});
    }

    ScoreCache output; // only this corpus' records, not stale cache entries
    for (const TweetRecord& rec : corpus.records) output.put(cache.all().at(rec.id));
    auto out = open_output(opts.output);
    write_report_header(out, meta);
    output.save(out);
    std::cerr << corpus.records.size() - missing.size() << " cached, " << missing.size()
              << " scored\n";
    return 0;
}

struct FilterOpts {
    std::string input, scores, output;
    double threshold = 0.7;
};

int cmd_filter(const FilterOpts& opts, const ReportMeta& meta) {
    if (opts.threshold < 0.0 || opts.threshold > 1.0)
        throw Error(ErrorKind::config, "threshold must be in [0, 1]");
    Corpus corpus = load_corpus(opts.input);
    ScoreCache cache = load_scores(opts.scores);
    Corpus toxic = filter_toxic(corpus, cache.all(), opts.threshold);
    auto out = open_output(opts.output);
    write_report_header(out, meta);
    serialize_corpus(toxic, out);
    std::cerr << toxic.records.size() << " of " << corpus.records.size()
              << " records at or above " << format_double(opts.threshold) << "\n";
    return 0;
}

struct TopicsOpts {
    std::string input, output_dir, category_map;
    int threads = 1;
};

int cmd_topics(const TopicsOpts& opts, const TopicConfig& tc_in, std::uint64_t seed,
               const ReportMeta& meta) {
    Corpus corpus = load_corpus(opts.input);
    std::vector<std::string> cleaned;
    cleaned.reserve(corpus.records.size());
    for (const TweetRecord& rec : corpus.records)
        cleaned.push_back(clean_for_embedding(rec.text));

    TopicConfig tc = tc_in;
    tc.seed = derive_seed(seed, "topics");
    HashEmbedder embedder;
    PcaReducer reducer;
    TopicModel model = fit_topics(cleaned, tc, embedder, reducer, opts.threads);

    std::vector<std::string> categories(corpus.records.size());
    if (!opts.category_map.empty()) {
        auto map_in = open_input(opts.category_map);
        CategoryMap category_map = CategoryMap::from_json(map_in);
        model.category_map = category_map.topic_to_category;
        categories = apply_categories(model, category_map);
    }

    const fs::path dir(opts.output_dir);
    auto topics_out = open_output(dir / "topics.csv");
    write_topics_csv(topics_out, model, meta);
    auto viz_out = open_output(dir / "viz_2d.csv");
    write_viz_csv(viz_out, corpus, model, categories, meta);
    auto assign_out = open_output(dir / "assignments.csv");
    write_assignments_csv(assign_out, corpus, model, categories, meta);
    std::cerr << tc.k << " topics over " << corpus.records.size() << " records\n";
    return 0;
}

struct NetworkOpts {
    std::string input, output_dir, relation = "mention", profiles;
    std::size_t top = 30;
    int threads = 1;
    bool directed_geodesics = false;
};

int cmd_network(const NetworkOpts& opts, const ReportMeta& meta) {
    Relation relation = relation_from_name(opts.relation);
    Corpus corpus = load_corpus(opts.input);
    DedupResult deduped = dedup_for_network(corpus);

    std::unordered_map<std::string, UserProfile> profiles;
    if (!opts.profiles.empty()) {
        auto in = open_input(opts.profiles);
        profiles = load_profiles(in);
    }
    harvest_profiles(corpus, profiles);

    InteractionGraph graph = InteractionGraph::build(deduped.corpus, relation);
    NetworkStats stats = summarize(graph, opts.directed_geodesics
                                              ? GeodesicView::directed
                                              : GeodesicView::undirected);
    CentralityTable table = centrality(graph, opts.threads);
    CommunityPartition partition;
    if (graph.undirected_edge_count() > 0) partition = cnm_communities(graph);

    const fs::path dir(opts.output_dir);
    auto stats_out = open_output(dir / "stats.csv");
    write_stats_csv(stats_out, stats, meta);
    auto edges_out = open_output(dir / "edges.csv");
    write_edges_csv(edges_out, graph.edges(), meta);
    auto centrality_out = open_output(dir / "centrality.csv");
    write_centrality_csv(centrality_out, table, partition, profiles, meta);
    auto communities_out = open_output(dir / "communities.csv");
    write_communities_csv(communities_out, partition, meta);

    std::vector<std::pair<RankMetric, std::vector<RankedUser>>> blocks;
    for (RankMetric metric : {RankMetric::in_degree, RankMetric::betweenness})
        blocks.emplace_back(metric,
                            rank_users(table, metric, opts.top, partition, profiles));
    auto top_out = open_output(dir / "top_users.csv");
    write_top_users_csv(top_out, blocks, meta);

    std::cerr << relation_name(relation) << " graph: " << stats.vertices << " vertices, "
              << stats.total_edges << " edges (" << deduped.removed
              << " duplicate records removed)\n";
    return 0;
}

struct TrendsOpts {
    std::string input, assignments, output_dir;
    std::vector<std::string> relations = {"mention", "retweet"};
    std::size_t top_hashtags = 20;
};

int cmd_trends(const TrendsOpts& opts, const ReportMeta& meta) {
    Corpus corpus = load_corpus(opts.input);
    std::unordered_map<std::string, std::string> assigned = load_assignments(opts.assignments);

    Corpus categorized;
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::string> category_of_record;
    for (const TweetRecord& rec : corpus.records) {
        auto it = assigned.find(rec.id);
        if (it == assigned.end())
            throw Error(ErrorKind::input,
                        "record '" + rec.id + "' missing from assignments file");
        if (it->second.empty()) continue; // unclustered
        categorized.records.push_back(rec);
        labels.push_back(it->second);
        category_of_record[rec.id] = it->second;
    }

    const fs::path dir(opts.output_dir);
    DailySeries series = daily_volume(categorized, labels);
    auto daily_out = open_output(dir / "daily_volume.csv");
    write_daily_csv(daily_out, series, meta);

    auto weekly_out = open_output(dir / "weekly_shares.csv");
    write_weekly_csv(weekly_out, composition(series), meta);

    auto hashtags_out = open_output(dir / "hashtags.csv");
    write_hashtags_csv(hashtags_out, hashtag_counts(corpus, opts.top_hashtags), meta);

    DedupResult deduped = dedup_for_network(corpus);
    std::vector<GraphEdge> edges;
    for (const std::string& name : opts.relations) {
        InteractionGraph graph = InteractionGraph::build(deduped.corpus,
                                                         relation_from_name(name));
        for (const GraphEdge& e : graph.edges())
            if (category_of_record.count(e.record_id)) edges.push_back(e);
    }
    auto users_out = open_output(dir / "user_categories.csv");
    write_user_categories_csv(users_out, user_category_mentions(edges, category_of_record),
                              meta);

    std::cerr << series.total() << " categorized records across " << series.by_day.size()
              << " days\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch toxicity analytics over tweet JSONL dumps"};
    app.set_version_flag("--version", std::string("toxtrace ") + std::string(kToolVersion));
    app.require_subcommand(1);

    int exit_code = 0;

    // Shared knobs. Each command hashes its effective configuration into the
    // report headers, so defaults matter.
    RunConfig base;

    IngestOpts ingest_opts;
    auto* ingest = app.add_subcommand("ingest", "Parse, validate, and normalize raw JSONL");
    ingest->add_option("-i,--input", ingest_opts.input, "Raw JSONL file")->required();
    ingest->add_option("-o,--output", ingest_opts.output,
                       "Normalized corpus path (stdout if omitted)");
    ingest->callback([&] {
        RunConfig c = base;
        c.input = ingest_opts.input;
        exit_code = cmd_ingest(ingest_opts, {c.hash(), c.seed});
    });

    ScoreOpts score_opts;
    std::string score_provider = "stub";
    ToxicityConfig score_tox;
    auto* score = app.add_subcommand("score", "Attach toxicity scores to a corpus");
    score->add_option("-i,--input", score_opts.input, "Corpus JSONL")->required();
    score->add_option("-o,--output", score_opts.output, "Scores JSONL")->required();
    score->add_option("--cache", score_opts.cache, "Existing scores to reuse");
    score->add_option("--provider", score_provider, "stub or remote")
        ->check(CLI::IsMember({"stub", "remote"}));
    score->add_option("--endpoint", score_tox.endpoint, "Remote API endpoint URL");
    score->add_option("--rps", score_tox.requests_per_second, "Remote request pacing");
    score->add_option("--retries", score_tox.max_retries, "Remote retry budget");
    score->callback([&] {
        RunConfig c = base;
        c.input = score_opts.input;
        c.provider = score_provider == "remote" ? ScoreProvider::remote : ScoreProvider::stub;
        c.toxicity = score_tox;
        c.validate(false);
        exit_code = cmd_score(score_opts, c.provider, c.toxicity, {c.hash(), c.seed});
    });

    FilterOpts filter_opts;
    auto* filter = app.add_subcommand("filter", "Keep records at or above the threshold");
    filter->add_option("-i,--input", filter_opts.input, "Corpus JSONL")->required();
    filter->add_option("-s,--scores", filter_opts.scores, "Scores JSONL")->required();
    filter->add_option("-o,--output", filter_opts.output, "Toxic corpus path")->required();
    filter->add_option("-t,--threshold", filter_opts.threshold,
                       "Inclusive toxicity threshold");
    filter->callback([&] {
        RunConfig c = base;
        c.input = filter_opts.input;
        c.toxicity.threshold = filter_opts.threshold;
        exit_code = cmd_filter(filter_opts, {c.hash(), c.seed});
    });

    TopicsOpts topics_opts;
    TopicConfig topics_config;
    std::uint64_t topics_seed = 0;
    auto* topics = app.add_subcommand("topics", "Embed, cluster, and extract topic keywords");
    topics->add_option("-i,--input", topics_opts.input, "Corpus JSONL")->required();
    topics->add_option("-o,--output", topics_opts.output_dir, "Report directory")->required();
    topics->add_option("-k,--clusters", topics_config.k, "Cluster count");
    topics->add_option("--reduce-dim", topics_config.reduce_dim, "Clustering dimensions");
    topics->add_option("--viz-dim", topics_config.viz_dim, "Visualization dimensions");
    topics->add_option("--max-iterations", topics_config.max_iterations, "K-Means cap");
    topics->add_option("--keywords", topics_config.keywords_per_topic, "Keywords per topic");
    topics->add_option("--seed", topics_seed, "Run seed");
    topics->add_option("--category-map", topics_opts.category_map,
                       "JSON topic-to-category map");
    topics->add_option("--threads", topics_opts.threads, "Worker thread cap");
    topics->callback([&] {
        RunConfig c = base;
        c.input = topics_opts.input;
        c.topics = topics_config;
        c.seed = topics_seed;
        c.threads = topics_opts.threads;
        c.category_map = topics_opts.category_map;
        if (c.topics.k == 0) throw Error(ErrorKind::config, "topics.k must be positive");
        if (c.threads < 1) throw Error(ErrorKind::config, "threads must be at least 1");
        exit_code = cmd_topics(topics_opts, c.topics, c.seed, {c.hash(), c.seed});
    });

    NetworkOpts network_opts;
    auto* network = app.add_subcommand("network", "Interaction graph statistics and rankings");
    network->add_option("-i,--input", network_opts.input, "Corpus JSONL")->required();
    network->add_option("-o,--output", network_opts.output_dir, "Report directory")
        ->required();
    network->add_option("-r,--relation", network_opts.relation, "mention or retweet");
    network->add_option("--top", network_opts.top, "Rows in the top-user tables");
    network->add_option("--profiles", network_opts.profiles, "Profiles JSONL");
    network->add_option("--threads", network_opts.threads, "Worker thread cap");
    network->add_flag("--directed-geodesics", network_opts.directed_geodesics,
                      "Geodesic stats on the directed view");
    network->callback([&] {
        RunConfig c = base;
        c.input = network_opts.input;
        c.profiles = network_opts.profiles;
        c.top_users = network_opts.top;
        c.threads = network_opts.threads;
        if (c.threads < 1) throw Error(ErrorKind::config, "threads must be at least 1");
        exit_code = cmd_network(network_opts, {c.hash(), c.seed});
    });

    TrendsOpts trends_opts;
    auto* trends = app.add_subcommand("trends", "Temporal and compositional reports");
    trends->add_option("-i,--input", trends_opts.input, "Corpus JSONL")->required();
    trends->add_option("-a,--assignments", trends_opts.assignments,
                       "assignments.csv from the topics step")
        ->required();
    trends->add_option("-o,--output", trends_opts.output_dir, "Report directory")->required();
    trends->add_option("--relations", trends_opts.relations,
                       "Relations feeding user_categories.csv");
    trends->add_option("--top-hashtags", trends_opts.top_hashtags, "Rows in hashtags.csv");
    trends->callback([&] {
        RunConfig c = base;
        c.input = trends_opts.input;
        c.top_hashtags = trends_opts.top_hashtags;
        exit_code = cmd_trends(trends_opts, {c.hash(), c.seed});
    });

    std::string config_path;
    RunConfig overrides;
    std::vector<std::string> override_relations;
    std::string override_provider;
    auto* run = app.add_subcommand("run-all", "Full pipeline from one config file");
    run->add_option("-c,--config", config_path, "JSON run configuration")->required();
    auto* o_input = run->add_option("-i,--input", overrides.input, "Override input path");
    auto* o_output = run->add_option("-o,--output", overrides.output_dir,
                                     "Override output directory");
    auto* o_seed = run->add_option("--seed", overrides.seed, "Override run seed");
    auto* o_threads = run->add_option("--threads", overrides.threads, "Worker thread cap");
    auto* o_provider = run->add_option("--provider", override_provider, "stub or remote")
                           ->check(CLI::IsMember({"stub", "remote"}));
    auto* o_threshold = run->add_option("--threshold", overrides.toxicity.threshold,
                                        "Toxicity threshold");
    auto* o_k = run->add_option("-k,--clusters", overrides.topics.k, "Cluster count");
    auto* o_relations = run->add_option("--relations", override_relations,
                                        "Relations to analyze");
    run->callback([&] {
        RunConfig c = RunConfig::from_file(config_path);
        if (*o_input) c.input = overrides.input;
        if (*o_output) c.output_dir = overrides.output_dir;
        if (*o_seed) c.seed = overrides.seed;
        if (*o_threads) c.threads = overrides.threads;
        if (*o_provider)
            c.provider = override_provider == "remote" ? ScoreProvider::remote
                                                       : ScoreProvider::stub;
        if (*o_threshold) c.toxicity.threshold = overrides.toxicity.threshold;
        if (*o_k) c.topics.k = overrides.topics.k;
        if (*o_relations) {
            c.relations.clear();
            for (const std::string& name : override_relations)
                c.relations.push_back(relation_from_name(name));
        }
        RunSummary summary = run_all(c, std::cerr);
        std::cout << "run complete: " << summary.records << " records, " << summary.toxic
                  << " toxic, " << summary.reports.size() << " reports in " << c.output_dir
                  << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_user_error() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
