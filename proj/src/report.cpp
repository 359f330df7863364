#include "toxtrace/report.hpp"

#include <algorithm>
#include <ostream>

#include "toxtrace/csv.hpp"
#include "toxtrace/datetime.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

namespace {

std::string str(std::int64_t v) { return std::to_string(v); }
std::string str(std::size_t v) { return std::to_string(v); }

std::vector<std::string> with_relation(std::optional<Relation> relation,
                                       std::vector<std::string> fields) {
    if (relation)
        fields.insert(fields.begin(), std::string(relation_name(*relation)));
    return fields;
}

} // namespace

void write_report_header(std::ostream& out, const ReportMeta& meta) {
    out << "# toxtrace " << kToolVersion << " config=" << meta.config_hash
        << " seed=" << meta.seed << "\n";
}

void write_topics_csv(std::ostream& out, const TopicModel& model, const ReportMeta& meta) {
    write_report_header(out, meta);
    std::size_t width = 0;
    for (const auto& kw : model.keywords) width = std::max(width, kw.size());

    std::vector<std::string> header = {"topic_id", "size", "category"};
    for (std::size_t i = 1; i <= width; ++i) header.push_back("keyword_" + str(i));
    csv::write_row(out, header);

    std::vector<std::int64_t> sizes(model.keywords.size(), 0);
    for (int topic : model.assignments)
        if (topic >= 0 && static_cast<std::size_t>(topic) < sizes.size()) ++sizes[topic];

    for (std::size_t t = 0; t < model.keywords.size(); ++t) {
        std::vector<std::string> row = {str(static_cast<std::int64_t>(t)), str(sizes[t])};
        auto it = model.category_map.find(static_cast<int>(t));
        row.push_back(it == model.category_map.end() ? "" : it->second);
        for (std::size_t i = 0; i < width; ++i)
            row.push_back(i < model.keywords[t].size() ? model.keywords[t][i] : "");
        csv::write_row(out, row);
    }
}

void write_viz_csv(std::ostream& out, const Corpus& corpus, const TopicModel& model,
                   const std::vector<std::string>& categories, const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"record_id", "x", "y", "topic_id", "category"});
    for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        if (model.assignments[i] < 0) continue;
        double x = model.viz.cols > 0 ? model.viz.at(i, 0) : 0.0;
        double y = model.viz.cols > 1 ? model.viz.at(i, 1) : 0.0;
        csv::write_row(out, {corpus.records[i].id, format_double(x), format_double(y),
                             str(static_cast<std::int64_t>(model.assignments[i])),
                             i < categories.size() ? categories[i] : ""});
    }
}

void write_assignments_csv(std::ostream& out, const Corpus& corpus, const TopicModel& model,
                           const std::vector<std::string>& categories,
                           const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"record_id", "topic_id", "category"});
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        csv::write_row(out, {corpus.records[i].id,
                             str(static_cast<std::int64_t>(model.assignments[i])),
                             i < categories.size() ? categories[i] : ""});
}

void write_edges_csv(std::ostream& out, const std::vector<GraphEdge>& edges,
                     const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"source", "target", "relation", "record_id"});
    for (const GraphEdge& e : edges)
        csv::write_row(out, {e.source, e.target, std::string(relation_name(e.relation)),
                             e.record_id});
}

namespace {

std::vector<std::string> stats_fields(const NetworkStats& s) {
    return {str(s.vertices),
            str(s.total_edges),
            str(s.duplicated_edges),
            str(s.unique_edges),
            str(s.self_loops),
            str(s.connected_components),
            str(s.max_geodesic),
            format_fixed(s.avg_geodesic, 4)};
}

const std::vector<std::string> kStatsHeader = {
    "vertices",   "total_edges",          "duplicated_edges", "unique_edges",
    "self_loops", "connected_components", "max_geodesic",     "avg_geodesic"};

} // namespace

void write_stats_csv(std::ostream& out, const NetworkStats& stats, const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, kStatsHeader);
    csv::write_row(out, stats_fields(stats));
}

void write_stats_csv(std::ostream& out,
                     const std::vector<std::pair<Relation, NetworkStats>>& rows,
                     const ReportMeta& meta) {
    write_report_header(out, meta);
    std::vector<std::string> header = kStatsHeader;
    header.insert(header.begin(), "relation");
    csv::write_row(out, header);
    for (const auto& [relation, stats] : rows)
        csv::write_row(out, with_relation(relation, stats_fields(stats)));
}

void write_centrality_header(std::ostream& out, bool with_relation_col) {
    std::vector<std::string> header = {"vertex",      "in_degree", "out_degree",
                                       "betweenness", "cluster",   "account_type"};
    if (with_relation_col) header.insert(header.begin(), "relation");
    csv::write_row(out, header);
}

void write_centrality_rows(std::ostream& out, const CentralityTable& table,
                           const CommunityPartition& partition,
                           const std::unordered_map<std::string, UserProfile>& profiles,
                           std::optional<Relation> relation) {
    for (std::size_t v = 0; v < table.usernames.size(); ++v) {
        UserProfile profile;
        if (auto it = profiles.find(table.usernames[v]); it != profiles.end())
            profile = it->second;
        csv::write_row(
            out, with_relation(relation,
                               {table.usernames[v], str(table.in_degree[v]),
                                str(table.out_degree[v]), format_double(table.betweenness[v]),
                                partition.label_of(table.usernames[v]),
                                std::string(account_type_name(classify_account(profile)))}));
    }
}

void write_centrality_csv(std::ostream& out, const CentralityTable& table,
                          const CommunityPartition& partition,
                          const std::unordered_map<std::string, UserProfile>& profiles,
                          const ReportMeta& meta, std::optional<Relation> relation) {
    write_report_header(out, meta);
    write_centrality_header(out, relation.has_value());
    write_centrality_rows(out, table, partition, profiles, relation);
}

void write_communities_header(std::ostream& out, bool with_relation_col) {
    std::vector<std::string> header = {"vertex", "community", "label"};
    if (with_relation_col) header.insert(header.begin(), "relation");
    csv::write_row(out, header);
}

void write_communities_rows(std::ostream& out, const CommunityPartition& partition,
                            std::optional<Relation> relation) {
    std::vector<std::string> vertices;
    vertices.reserve(partition.assignment.size());
    for (const auto& [vertex, community] : partition.assignment) vertices.push_back(vertex);
    std::sort(vertices.begin(), vertices.end());
    for (const std::string& vertex : vertices) {
        auto community = static_cast<std::size_t>(partition.assignment.at(vertex));
        csv::write_row(out,
                       with_relation(relation, {vertex, str(community),
                                                partition.labels[community]}));
    }
}

void write_communities_csv(std::ostream& out, const CommunityPartition& partition,
                           const ReportMeta& meta, std::optional<Relation> relation) {
    write_report_header(out, meta);
    write_communities_header(out, relation.has_value());
    write_communities_rows(out, partition, relation);
}

void write_top_users_header(std::ostream& out, bool with_relation_col) {
    std::vector<std::string> header = {"metric",  "rank",     "username",
                                       "value",   "cluster",  "verified",
                                       "account_type"};
    if (with_relation_col) header.insert(header.begin(), "relation");
    csv::write_row(out, header);
}

void write_top_users_rows(std::ostream& out, RankMetric metric,
                          const std::vector<RankedUser>& rows,
                          std::optional<Relation> relation) {
    std::string metric_name = metric == RankMetric::in_degree ? "in_degree" : "betweenness";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const RankedUser& r = rows[i];
        csv::write_row(out, with_relation(relation,
                                          {metric_name, str(i + 1), r.username,
                                           format_double(r.value), r.cluster,
                                           r.verified ? "true" : "false",
                                           std::string(account_type_name(r.type))}));
    }
}

void write_top_users_csv(std::ostream& out,
                         const std::vector<std::pair<RankMetric, std::vector<RankedUser>>>& blocks,
                         const ReportMeta& meta, std::optional<Relation> relation) {
    write_report_header(out, meta);
    write_top_users_header(out, relation.has_value());
    for (const auto& [metric, rows] : blocks) write_top_users_rows(out, metric, rows, relation);
}

void write_daily_csv(std::ostream& out, const DailySeries& series, const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"date", "category", "count"});
    for (const auto& [day, counts] : series.by_day)
        for (const auto& [code, count] : counts)
            csv::write_row(out, {format_date(day), code, str(count)});
}

void write_weekly_csv(std::ostream& out, const CompositionTable& table,
                      const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"iso_week", "category", "share"});
    for (const auto& [week, shares] : table.weekly)
        for (const auto& [code, share] : shares)
            csv::write_row(out, {week, code, format_double(share)});
    for (const auto& [code, share] : table.overall)
        csv::write_row(out, {"overall", code, format_double(share)});
}

void write_hashtags_csv(std::ostream& out,
                        const std::vector<std::pair<std::string, std::int64_t>>& rows,
                        const ReportMeta& meta) {
    write_report_header(out, meta);
    csv::write_row(out, {"tag", "count"});
    for (const auto& [tag, count] : rows) csv::write_row(out, {tag, str(count)});
}

void write_user_categories_csv(
    std::ostream& out,
    const std::map<std::string, std::map<std::string, std::int64_t>>& tally,
    const ReportMeta& meta) {
    write_report_header(out, meta);
    static const std::vector<std::string> codes = {"D", "H", "O", "P", "R"};
    csv::write_row(out, {"username", "D", "H", "O", "P", "R"});
    for (const auto& [username, counts] : tally) {
        std::vector<std::string> row = {username};
        for (const std::string& code : codes) {
            auto it = counts.find(code);
            row.push_back(str(it == counts.end() ? 0 : it->second));
        }
        csv::write_row(out, row);
    }
}

} // namespace toxtrace
