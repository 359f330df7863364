#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toxtrace/corpus.hpp"
#include "toxtrace/graph.hpp"
#include "toxtrace/topics.hpp"
#include "toxtrace/trends.hpp"

namespace toxtrace {

struct ReportMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
};

// "# toxtrace <version> config=<hash> seed=<seed>". Every CSV and JSON Lines
// output starts with this line; all readers here skip '#' lines.
void write_report_header(std::ostream& out, const ReportMeta& meta);

// topic_id,size,category,keyword_1..keyword_n
void write_topics_csv(std::ostream& out, const TopicModel& model, const ReportMeta& meta);

// record_id,x,y,topic_id,category; records with topic -1 are omitted
void write_viz_csv(std::ostream& out, const Corpus& corpus, const TopicModel& model,
                   const std::vector<std::string>& categories, const ReportMeta& meta);

// record_id,topic_id,category; covers every record, including topic -1
void write_assignments_csv(std::ostream& out, const Corpus& corpus, const TopicModel& model,
                           const std::vector<std::string>& categories,
                           const ReportMeta& meta);

// source,target,relation,record_id
void write_edges_csv(std::ostream& out, const std::vector<GraphEdge>& edges,
                     const ReportMeta& meta);

// vertices,total_edges,duplicated_edges,unique_edges,self_loops,
// connected_components,max_geodesic,avg_geodesic; avg printed with 4 decimals.
// With relation labels a leading relation column is prepended.
void write_stats_csv(std::ostream& out, const NetworkStats& stats, const ReportMeta& meta);
void write_stats_csv(std::ostream& out,
                     const std::vector<std::pair<Relation, NetworkStats>>& rows,
                     const ReportMeta& meta);

// vertex,in_degree,out_degree,betweenness,cluster,account_type
// The *_rows variants emit data rows only, so several relations can share
// one file under a single header (leading relation column).
void write_centrality_header(std::ostream& out, bool with_relation);
void write_centrality_rows(std::ostream& out, const CentralityTable& table,
                           const CommunityPartition& partition,
                           const std::unordered_map<std::string, UserProfile>& profiles,
                           std::optional<Relation> relation);
void write_centrality_csv(std::ostream& out, const CentralityTable& table,
                          const CommunityPartition& partition,
                          const std::unordered_map<std::string, UserProfile>& profiles,
                          const ReportMeta& meta,
                          std::optional<Relation> relation = std::nullopt);

// vertex,community,label
void write_communities_header(std::ostream& out, bool with_relation);
void write_communities_rows(std::ostream& out, const CommunityPartition& partition,
                            std::optional<Relation> relation);
void write_communities_csv(std::ostream& out, const CommunityPartition& partition,
                           const ReportMeta& meta,
                           std::optional<Relation> relation = std::nullopt);

// metric,rank,username,value,cluster,verified,account_type
void write_top_users_header(std::ostream& out, bool with_relation);
void write_top_users_rows(std::ostream& out, RankMetric metric,
                          const std::vector<RankedUser>& rows,
                          std::optional<Relation> relation);
void write_top_users_csv(std::ostream& out,
                         const std::vector<std::pair<RankMetric, std::vector<RankedUser>>>& blocks,
                         const ReportMeta& meta,
                         std::optional<Relation> relation = std::nullopt);

// date,category,count
void write_daily_csv(std::ostream& out, const DailySeries& series, const ReportMeta& meta);

// iso_week,category,share; overall shares appended with iso_week = "overall"
void write_weekly_csv(std::ostream& out, const CompositionTable& table,
                      const ReportMeta& meta);

// tag,count
void write_hashtags_csv(std::ostream& out,
                        const std::vector<std::pair<std::string, std::int64_t>>& rows,
                        const ReportMeta& meta);

// username,D,H,O,P,R
void write_user_categories_csv(
    std::ostream& out,
    const std::map<std::string, std::map<std::string, std::int64_t>>& tally,
    const ReportMeta& meta);

} // namespace toxtrace
