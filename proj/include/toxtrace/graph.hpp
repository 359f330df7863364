#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxtrace/corpus.hpp"

namespace toxtrace {

struct GraphEdge {
    std::string source;
    std::string target;
    Relation relation = Relation::mention;
    std::string record_id;
};

// Directed multigraph of user interactions. Immutable once built; centrality
// runs on the directed unique-edge view (self-loops excluded), components and
// communities on the undirected simple view.
class InteractionGraph {
public:
    static InteractionGraph build(const Corpus& corpus, Relation relation);
    static InteractionGraph from_edges(std::vector<GraphEdge> edges);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    std::optional<std::size_t> vertex_id(std::string_view name) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t total_edges() const { return edges_.size(); }
    std::size_t unique_edges() const { return unique_edge_count_; }
    std::size_t self_loops() const { return self_loop_count_; }

    // unique directed edges, self-loops excluded, adjacency sorted by id
    const std::vector<std::vector<std::size_t>>& out_neighbors() const { return out_; }
    const std::vector<std::vector<std::size_t>>& in_neighbors() const { return in_; }

    // undirected simple view (unique endpoint pairs, self-loops dropped)
    const std::vector<std::vector<std::size_t>>& undirected_neighbors() const {
        return undirected_;
    }
    std::size_t undirected_edge_count() const { return undirected_edge_count_; }

private:
    std::vector<std::string> vertices_; // sorted
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<std::size_t>> out_, in_, undirected_;
    std::size_t unique_edge_count_ = 0;
    std::size_t self_loop_count_ = 0;
    std::size_t undirected_edge_count_ = 0;
};

enum class GeodesicView { undirected, directed };

struct NetworkStats {
    std::size_t vertices = 0;
    std::size_t total_edges = 0;
    std::size_t duplicated_edges = 0;
    std::size_t unique_edges = 0;
    std::size_t self_loops = 0;
    std::size_t connected_components = 0;
    std::size_t max_geodesic = 0;
    double avg_geodesic = 0.0; // mean over connected pairs only
};

NetworkStats summarize(const InteractionGraph& graph,
                       GeodesicView view = GeodesicView::undirected);

struct CentralityTable {
    std::vector<std::string> usernames; // graph vertex order
    std::vector<std::int64_t> in_degree;
    std::vector<std::int64_t> out_degree;
    std::vector<double> betweenness;
};

// In/out degree over unique edges, self-loops excluded.
CentralityTable degree_centrality(const InteractionGraph& graph);

// Unnormalized betweenness over ordered pairs s != t != v on the directed
// unique-edge view (Brandes dependency accumulation).
CentralityTable betweenness_centrality(const InteractionGraph& graph, int threads = 1);

CentralityTable centrality(const InteractionGraph& graph, int threads = 1);

// Per-pair shortest-path structure on the directed unique-edge view.
// Quadratic storage; intended for inspection of small graphs.
struct GeodesicProfile {
    std::size_t n = 0;
    std::vector<std::int64_t> dist;       // n*n, -1 when unreachable
    std::vector<double> path_count;       // n*n, sigma_st
    std::int64_t distance(std::size_t s, std::size_t t) const { return dist[s * n + t]; }
    double sigma(std::size_t s, std::size_t t) const { return path_count[s * n + t]; }
    // number of s->t shortest paths through v (0 when v is s or t)
    double sigma_through(std::size_t s, std::size_t t, std::size_t v) const;
};

GeodesicProfile geodesic_profile(const InteractionGraph& graph);

struct CommunityPartition {
    std::unordered_map<std::string, int> assignment; // vertex -> community id
    std::vector<std::string> labels; // community id -> "G1".."Gm" (size-ordered)
    double modularity = 0.0;

    const std::string& label_of(const std::string& vertex) const;
};

// Q = sum_i (e_ii - a_i^2) on the undirected simple view.
double modularity_of(const InteractionGraph& graph,
                     const std::unordered_map<std::string, int>& assignment);

// Greedy agglomeration (Clauset-Newman-Moore): repeatedly merge the community
// pair with the largest modularity gain until no gain is positive. Ties break
// on the lexicographically smallest (min member, max member) pair.
// Throws Error(input) when the undirected simple view has no edges.
CommunityPartition cnm_communities(const InteractionGraph& graph);

enum class AccountType {
    org_media,
    org_government,
    ind_politician,
    ind_journalist,
    ind_impact,
    ind_other,
};

std::string_view account_type_name(AccountType t);
AccountType account_type_from_name(std::string_view name); // throws Error(config)

struct UserProfile {
    std::string username;
    bool verified = false;
    std::int64_t followers = 0;
    std::optional<AccountType> manual_type; // org_* / ind_politician / ind_journalist
};

// Manual annotation wins; otherwise followers > 50,000 is high-impact.
AccountType classify_account(const UserProfile& profile);

// JSON Lines: {"username":..., "verified":..., "followers":..., "manual_type":...}
std::unordered_map<std::string, UserProfile> load_profiles(std::istream& in);

// Fills in profiles for corpus authors that carry verified/followers fields
// and have no explicit entry. Later records win (sorted corpus order).
void harvest_profiles(const Corpus& corpus,
                      std::unordered_map<std::string, UserProfile>& profiles);

enum class RankMetric { in_degree, betweenness };

struct RankedUser {
    std::string username;
    double value = 0.0;
    std::string cluster;
    bool verified = false;
    AccountType type = AccountType::ind_other;
};

std::vector<RankedUser> rank_users(const CentralityTable& table, RankMetric metric,
                                   std::size_t k, const CommunityPartition& partition,
                                   const std::unordered_map<std::string, UserProfile>& profiles);

} // namespace toxtrace
