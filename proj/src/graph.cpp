#include "toxtrace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <queue>
#include <set>
#include <thread>

#include <json.hpp>

#include "toxtrace/error.hpp"
#include "toxtrace/util.hpp"

namespace toxtrace {

InteractionGraph InteractionGraph::build(const Corpus& corpus, Relation relation) {
    std::vector<GraphEdge> edges;
    for (const TweetRecord& rec : corpus.records) {
        if (relation == Relation::retweet) {
            if (rec.retweet_of)
                edges.push_back({rec.author, *rec.retweet_of, relation, rec.id});
        } else {
            // In a retweet the prefix mention is the retweet edge; later
            // mentions in the body still count as mentions.
            std::size_t skip_from = rec.retweet_of ? 1 : 0;
            for (std::size_t i = skip_from; i < rec.mentions.size(); ++i)
                edges.push_back({rec.author, rec.mentions[i], relation, rec.id});
        }
    }
    return from_edges(std::move(edges));
}

InteractionGraph InteractionGraph::from_edges(std::vector<GraphEdge> edges) {
    InteractionGraph g;
    g.edges_ = std::move(edges);

    std::set<std::string> names;
    for (const GraphEdge& e : g.edges_) {
        names.insert(e.source);
        names.insert(e.target);
    }
    g.vertices_.assign(names.begin(), names.end());
    for (std::size_t i = 0; i < g.vertices_.size(); ++i) g.index_[g.vertices_[i]] = i;

    std::set<std::pair<std::size_t, std::size_t>> unique_pairs;
    for (const GraphEdge& e : g.edges_) {
        std::size_t s = g.index_[e.source];
        std::size_t t = g.index_[e.target];
        unique_pairs.emplace(s, t);
        if (s == t) ++g.self_loop_count_;
    }
    g.unique_edge_count_ = unique_pairs.size();

    const std::size_t n = g.vertices_.size();
    g.out_.assign(n, {});
    g.in_.assign(n, {});
    std::set<std::pair<std::size_t, std::size_t>> undirected_pairs;
    for (const auto& [s, t] : unique_pairs) {
        if (s == t) continue;
        g.out_[s].push_back(t);
        g.in_[t].push_back(s);
        undirected_pairs.emplace(std::min(s, t), std::max(s, t));
    }
    g.undirected_edge_count_ = undirected_pairs.size();
    g.undirected_.assign(n, {});
    for (const auto& [a, b] : undirected_pairs) {
        g.undirected_[a].push_back(b);
        g.undirected_[b].push_back(a);
    }
    for (auto& adj : g.undirected_) std::sort(adj.begin(), adj.end());
    // out_/in_ are already sorted: unique_pairs iterates in order
    return g;
}

std::optional<std::size_t> InteractionGraph::vertex_id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

// single-source BFS; returns distances (-1 unreachable)
void bfs(const std::vector<std::vector<std::size_t>>& adj, std::size_t source,
         std::vector<std::int64_t>& dist) {
    dist.assign(adj.size(), -1);
    dist[source] = 0;
    std::deque<std::size_t> queue{source};
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w : adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
}

} // namespace

NetworkStats summarize(const InteractionGraph& graph, GeodesicView view) {
    NetworkStats stats;
    stats.vertices = graph.vertex_count();
    stats.total_edges = graph.total_edges();
    stats.unique_edges = graph.unique_edges();
    stats.duplicated_edges = stats.total_edges - stats.unique_edges;
    stats.self_loops = graph.self_loops();
    if (stats.vertices == 0) return stats;

    const auto& undirected = graph.undirected_neighbors();
    std::vector<bool> seen(stats.vertices, false);
    for (std::size_t v = 0; v < stats.vertices; ++v) {
        if (seen[v]) continue;
        ++stats.connected_components;
        std::deque<std::size_t> queue{v};
        seen[v] = true;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t w : undirected[u]) {
                if (!seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    const auto& adj =
        view == GeodesicView::undirected ? undirected : graph.out_neighbors();
    std::int64_t max_dist = 0;
    double sum = 0.0;
    std::size_t pairs = 0;
    std::vector<std::int64_t> dist;
    for (std::size_t s = 0; s < stats.vertices; ++s) {
        bfs(adj, s, dist);
        for (std::size_t t = 0; t < stats.vertices; ++t) {
            if (t == s || dist[t] < 0) continue;
            if (view == GeodesicView::undirected && t < s) continue; // unordered pairs once
            sum += static_cast<double>(dist[t]);
            ++pairs;
            max_dist = std::max(max_dist, dist[t]);
        }
    }
    stats.max_geodesic = static_cast<std::size_t>(max_dist);
    stats.avg_geodesic = pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
    return stats;
}

CentralityTable degree_centrality(const InteractionGraph& graph) {
    CentralityTable table;
    table.usernames = graph.vertices();
    const std::size_t n = graph.vertex_count();
    table.in_degree.assign(n, 0);
    table.out_degree.assign(n, 0);
    table.betweenness.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        table.out_degree[v] = static_cast<std::int64_t>(graph.out_neighbors()[v].size());
        table.in_degree[v] = static_cast<std::int64_t>(graph.in_neighbors()[v].size());
    }
    return table;
}

namespace {

// Brandes dependency accumulation from one source.
void accumulate_from_source(const std::vector<std::vector<std::size_t>>& out,
                            std::size_t source, std::vector<double>& acc,
                            std::vector<std::int64_t>& dist, std::vector<double>& sigma,
                            std::vector<double>& delta,
                            std::vector<std::vector<std::size_t>>& preds,
                            std::vector<std::size_t>& order) {
    const std::size_t n = out.size();
    dist.assign(n, -1);
    sigma.assign(n, 0.0);
    delta.assign(n, 0.0);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[source] = 0;
    sigma[source] = 1.0;
    std::deque<std::size_t> queue{source};
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (std::size_t w : out[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if (dist[w] == dist[v] + 1) {
                sigma[w] += sigma[v];
                preds[w].push_back(v);
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::size_t w = *it;
        for (std::size_t v : preds[w])
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        if (w != source) acc[w] += delta[w];
    }
}

} // namespace

CentralityTable betweenness_centrality(const InteractionGraph& graph, int threads) {
    CentralityTable table;
    table.usernames = graph.vertices();
    const std::size_t n = graph.vertex_count();
    table.in_degree.assign(n, 0);
    table.out_degree.assign(n, 0);
    table.betweenness.assign(n, 0.0);
    if (n == 0) return table;

    const auto& out = graph.out_neighbors();
    std::size_t nthreads = threads <= 1 ? 1 : std::min<std::size_t>(threads, n);
    std::vector<std::vector<double>> partial(nthreads, std::vector<double>(n, 0.0));

    auto worker = [&](std::size_t tid) {
        std::vector<std::int64_t> dist;
        std::vector<double> sigma, delta;
        std::vector<std::vector<std::size_t>> preds(n);
        std::vector<std::size_t> order;
        order.reserve(n);
        for (std::size_t s = tid; s < n; s += nthreads)
            accumulate_from_source(out, s, partial[tid], dist, sigma, delta, preds, order);
    };
    if (nthreads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (std::size_t t = 0; t < nthreads; ++t)
        for (std::size_t v = 0; v < n; ++v) table.betweenness[v] += partial[t][v];
    return table;
}

CentralityTable centrality(const InteractionGraph& graph, int threads) {
    CentralityTable table = degree_centrality(graph);
    table.betweenness = betweenness_centrality(graph, threads).betweenness;
    return table;
}

double GeodesicProfile::sigma_through(std::size_t s, std::size_t t, std::size_t v) const {
    if (v == s || v == t) return 0.0;
    std::int64_t d_st = distance(s, t);
    if (d_st < 0) return 0.0;
    std::int64_t d_sv = distance(s, v);
    std::int64_t d_vt = distance(v, t);
    if (d_sv < 0 || d_vt < 0 || d_sv + d_vt != d_st) return 0.0;
    return sigma(s, v) * sigma(v, t);
}

GeodesicProfile geodesic_profile(const InteractionGraph& graph) {
    GeodesicProfile profile;
    profile.n = graph.vertex_count();
    profile.dist.assign(profile.n * profile.n, -1);
    profile.path_count.assign(profile.n * profile.n, 0.0);
    const auto& out = graph.out_neighbors();
    for (std::size_t s = 0; s < profile.n; ++s) {
        auto* dist = &profile.dist[s * profile.n];
        auto* sigma = &profile.path_count[s * profile.n];
        dist[s] = 0;
        sigma[s] = 1.0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t w : out[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
            }
        }
    }
    return profile;
}

const std::string& CommunityPartition::label_of(const std::string& vertex) const {
    static const std::string empty;
    auto it = assignment.find(vertex);
    if (it == assignment.end()) return empty;
    return labels[static_cast<std::size_t>(it->second)];
}

double modularity_of(const InteractionGraph& graph,
                     const std::unordered_map<std::string, int>& assignment) {
    const double m = static_cast<double>(graph.undirected_edge_count());
    if (m == 0.0)
        throw Error(ErrorKind::input, "modularity undefined: graph has no edges");

    std::unordered_map<int, double> internal, degree_sum;
    const auto& undirected = graph.undirected_neighbors();
    const auto& names = graph.vertices();
    auto community_of = [&](std::size_t v) {
        auto it = assignment.find(names[v]);
        if (it == assignment.end())
            throw Error(ErrorKind::input, "vertex '" + names[v] + "' missing from partition");
        return it->second;
    };
    for (std::size_t v = 0; v < names.size(); ++v) {
        int cv = community_of(v);
        degree_sum[cv] += static_cast<double>(undirected[v].size());
        for (std::size_t w : undirected[v]) {
            if (w < v) continue; // each undirected edge once
            if (cv == community_of(w)) internal[cv] += 1.0;
        }
    }
    double q = 0.0;
    std::set<int> cids;
    for (const auto& [name, cid] : assignment) cids.insert(cid);
    for (int cid : cids) {
        double e_ii = internal.count(cid) ? internal[cid] / m : 0.0;
        double a_i = degree_sum.count(cid) ? degree_sum[cid] / (2.0 * m) : 0.0;
        q += e_ii - a_i * a_i;
    }
    return q;
}

namespace {

struct MergeCandidate {
    double dq;
    std::size_t rep_min, rep_max; // tie-break: smallest (min,max) member pair
    std::size_t ci, cj;
    std::uint64_t version;
};

struct CandidateOrder {
    bool operator()(const MergeCandidate& a, const MergeCandidate& b) const {
        if (a.dq != b.dq) return a.dq < b.dq; // max-heap on gain
        if (a.rep_min != b.rep_min) return a.rep_min > b.rep_min;
        return a.rep_max > b.rep_max;
    }
};

} // namespace

CommunityPartition cnm_communities(const InteractionGraph& graph) {
    const std::size_t n = graph.vertex_count();
    const double m = static_cast<double>(graph.undirected_edge_count());
    if (m == 0.0)
        throw Error(ErrorKind::input,
                    "modularity undefined: graph has no edges after dropping self-loops");

    // singleton communities over the undirected simple view
    std::vector<bool> alive(n, true);
    std::vector<double> a(n, 0.0);
    std::vector<std::map<std::size_t, double>> e(n); // e[i][j]: fraction of edges between
    std::vector<std::vector<std::size_t>> members(n);
    std::vector<std::size_t> rep(n);
    const auto& undirected = graph.undirected_neighbors();
    for (std::size_t v = 0; v < n; ++v) {
        members[v] = {v};
        rep[v] = v; // vertex ids are sorted by name
        a[v] = static_cast<double>(undirected[v].size()) / (2.0 * m);
        for (std::size_t w : undirected[v]) e[v][w] = 1.0 / m;
    }

    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> pair_version;
    std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, CandidateOrder> heap;
    std::uint64_t version_counter = 0;

    auto push_candidate = [&](std::size_t i, std::size_t j) {
        std::size_t ci = std::min(i, j), cj = std::max(i, j);
        double dq = e[ci].at(cj) - 2.0 * a[ci] * a[cj];
        std::uint64_t ver = ++version_counter;
        pair_version[{ci, cj}] = ver;
        heap.push({dq, std::min(rep[ci], rep[cj]), std::max(rep[ci], rep[cj]), ci, cj, ver});
    };

    for (std::size_t v = 0; v < n; ++v)
        for (const auto& [w, frac] : e[v])
            if (v < w) push_candidate(v, w);

    while (!heap.empty()) {
        MergeCandidate top = heap.top();
        if (top.dq <= 0.0) break; // no merge improves Q
        heap.pop();
        if (!alive[top.ci] || !alive[top.cj]) continue;
        auto it = pair_version.find({top.ci, top.cj});
        if (it == pair_version.end() || it->second != top.version) continue; // stale

        // absorb cj into ci
        std::size_t ci = top.ci, cj = top.cj;
        alive[cj] = false;
        pair_version.erase({ci, cj});
        e[ci].erase(cj);
        a[ci] += a[cj];
        rep[ci] = std::min(rep[ci], rep[cj]);
        if (members[ci].size() < members[cj].size()) members[ci].swap(members[cj]);
        members[ci].insert(members[ci].end(), members[cj].begin(), members[cj].end());
        members[cj].clear();

        for (const auto& [k, frac] : e[cj]) {
            if (k == ci) continue;
            e[k].erase(cj);
            pair_version.erase({std::min(cj, k), std::max(cj, k)});
            e[ci][k] += frac;
            e[k][ci] = e[ci][k];
        }
        e[cj].clear();
        for (const auto& [k, frac] : e[ci]) push_candidate(ci, k);
    }

    // order communities by size desc, then smallest member
    std::vector<std::size_t> community_ids;
    for (std::size_t c = 0; c < n; ++c)
        if (alive[c]) community_ids.push_back(c);
    std::sort(community_ids.begin(), community_ids.end(),
              [&](std::size_t x, std::size_t y) {
                  if (members[x].size() != members[y].size())
                      return members[x].size() > members[y].size();
                  return rep[x] < rep[y];
              });

    CommunityPartition partition;
    partition.labels.reserve(community_ids.size());
    const auto& names = graph.vertices();
    for (std::size_t idx = 0; idx < community_ids.size(); ++idx) {
        partition.labels.push_back("G" + std::to_string(idx + 1));
        for (std::size_t v : members[community_ids[idx]])
            partition.assignment[names[v]] = static_cast<int>(idx);
    }
    partition.modularity = modularity_of(graph, partition.assignment);
    return partition;
}

std::string_view account_type_name(AccountType t) {
    switch (t) {
    case AccountType::org_media: return "org_media";
    case AccountType::org_government: return "org_government";
    case AccountType::ind_politician: return "ind_politician";
    case AccountType::ind_journalist: return "ind_journalist";
    case AccountType::ind_impact: return "ind_impact";
    case AccountType::ind_other: return "ind_other";
    }
    return "ind_other";
}

AccountType account_type_from_name(std::string_view name) {
    for (AccountType t : {AccountType::org_media, AccountType::org_government,
                          AccountType::ind_politician, AccountType::ind_journalist,
                          AccountType::ind_impact, AccountType::ind_other})
        if (account_type_name(t) == name) return t;
    throw Error(ErrorKind::config, "unknown account type '" + std::string(name) + "'");
}

AccountType classify_account(const UserProfile& profile) {
    if (profile.manual_type) return *profile.manual_type;
    return profile.followers > 50000 ? AccountType::ind_impact : AccountType::ind_other;
}

std::unordered_map<std::string, UserProfile> load_profiles(std::istream& in) {
    std::unordered_map<std::string, UserProfile> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("username") ||
            !j["username"].is_string())
            throw Error(ErrorKind::config,
                        "profiles line " + std::to_string(line_no) + ": invalid entry");
        UserProfile p;
        p.username = j["username"].get<std::string>();
        if (auto it = j.find("verified"); it != j.end() && it->is_boolean())
            p.verified = it->get<bool>();
        if (auto it = j.find("followers"); it != j.end() && it->is_number())
            p.followers = it->get<std::int64_t>();
        if (p.followers < 0)
            throw Error(ErrorKind::config,
                        "profiles line " + std::to_string(line_no) + ": negative followers");
        if (auto it = j.find("manual_type"); it != j.end() && !it->is_null()) {
            if (!it->is_string())
                throw Error(ErrorKind::config, "profiles line " + std::to_string(line_no) +
                                                   ": manual_type must be a string");
            AccountType t = account_type_from_name(it->get<std::string>());
            if (t == AccountType::ind_impact || t == AccountType::ind_other)
                throw Error(ErrorKind::config,
                            "profiles line " + std::to_string(line_no) +
                                ": manual_type must be an org_* or ind_politician/"
                                "ind_journalist value");
            p.manual_type = t;
        }
        out[p.username] = std::move(p);
    }
    return out;
}

void harvest_profiles(const Corpus& corpus,
                      std::unordered_map<std::string, UserProfile>& profiles) {
    std::unordered_map<std::string, UserProfile> harvested;
    for (const TweetRecord& rec : corpus.records) {
        if (!rec.verified && !rec.followers) continue;
        if (profiles.count(rec.author)) continue; // explicit profile entries win
        UserProfile& p = harvested[rec.author];
        p.username = rec.author;
        // corpus is time-ordered, so the newest record wins
        if (rec.verified) p.verified = *rec.verified;
        if (rec.followers) p.followers = *rec.followers;
    }
    for (auto& [name, p] : harvested) profiles.emplace(name, std::move(p));
}

std::vector<RankedUser> rank_users(const CentralityTable& table, RankMetric metric,
                                   std::size_t k, const CommunityPartition& partition,
                                   const std::unordered_map<std::string, UserProfile>& profiles) {
    std::vector<std::size_t> order(table.usernames.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto value_of = [&](std::size_t i) {
        return metric == RankMetric::in_degree ? static_cast<double>(table.in_degree[i])
                                               : table.betweenness[i];
    };
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        double vx = value_of(x), vy = value_of(y);
        if (vx != vy) return vx > vy;
        return table.usernames[x] < table.usernames[y];
    });
    if (order.size() > k) order.resize(k);

    std::vector<RankedUser> rows;
    rows.reserve(order.size());
    for (std::size_t i : order) {
        RankedUser row;
        row.username = table.usernames[i];
        row.value = value_of(i);
        row.cluster = partition.label_of(row.username);
        UserProfile profile;
        if (auto it = profiles.find(row.username); it != profiles.end()) profile = it->second;
        else profile.username = row.username;
        row.verified = profile.verified;
        row.type = classify_account(profile);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace toxtrace
