#include <algorithm>
#include <numeric>
#include <vector>

#include "cfml/graph.hpp"
#include "cfml/rng.hpp"

namespace cfml {

namespace {

// Weighted undirected graph used during aggregation; self-loop weight kept
// separately and counted twice in the weighted degree.
struct LevelGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj; // no self entries
    std::vector<double> loop;
    std::vector<double> degree; // weighted degree incl. 2*loop
    double total = 0.0;         // 2m = sum of degrees
};

LevelGraph from_bipartite(const BipartiteGraph& g) {
    LevelGraph lg;
    lg.n = g.order();
    lg.adj.resize(std::size_t(lg.n));
    lg.loop.assign(std::size_t(lg.n), 0.0);
    lg.degree.assign(std::size_t(lg.n), 0.0);
    for (const auto& e : g.edges) {
        lg.adj[std::size_t(e.user_node)].emplace_back(e.item_node, e.weight);
        lg.adj[std::size_t(e.item_node)].emplace_back(e.user_node, e.weight);
        lg.degree[std::size_t(e.user_node)] += e.weight;
        lg.degree[std::size_t(e.item_node)] += e.weight;
    }
    lg.total = std::accumulate(lg.degree.begin(), lg.degree.end(), 0.0);
    return lg;
}

// One pass of local moving; returns true if the partition changed.
bool move_nodes(const LevelGraph& g, std::vector<int>& community, Rng& rng) {
    std::vector<double> tot(std::size_t(g.n), 0.0); // total degree per community
    for (int v = 0; v < g.n; ++v) tot[std::size_t(community[std::size_t(v)])] += g.degree[std::size_t(v)];

    std::vector<int> order(std::size_t(g.n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> weight_to(std::size_t(g.n), 0.0);
    std::vector<int> touched;
    bool any_move = false;
    bool improved = true;
    int pass = 0;
    while (improved && pass++ < 100) {
        improved = false;
        for (int v : order) {
            const int old_c = community[std::size_t(v)];
            const double kv = g.degree[std::size_t(v)];

            touched.clear();
            for (const auto& [u, w] : g.adj[std::size_t(v)]) {
                const int c = community[std::size_t(u)];
                if (weight_to[std::size_t(c)] == 0.0) touched.push_back(c);
                weight_to[std::size_t(c)] += w;
            }

            tot[std::size_t(old_c)] -= kv;
            // gain of joining c (up to constants): k_{v,c} - tot_c * k_v / 2m
            double best_gain = weight_to[std::size_t(old_c)] - tot[std::size_t(old_c)] * kv / g.total;
            int best_c = old_c;
            for (int c : touched) {
                if (c == old_c) continue;
                const double gain = weight_to[std::size_t(c)] - tot[std::size_t(c)] * kv / g.total;
                if (gain > best_gain + 1e-12 || (gain > best_gain - 1e-12 && c < best_c)) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            tot[std::size_t(best_c)] += kv;
            if (best_c != old_c) {
                community[std::size_t(v)] = best_c;
                improved = true;
                any_move = true;
            }

            for (int c : touched) weight_to[std::size_t(c)] = 0.0;
        }
    }
    return any_move;
}

void renumber(std::vector<int>& community, int& count) {
    std::vector<int> remap(community.size(), -1);
    count = 0;
    for (int& c : community) {
        if (remap[std::size_t(c)] < 0) remap[std::size_t(c)] = count++;
        c = remap[std::size_t(c)];
    }
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& community, int count) {
    LevelGraph out;
    out.n = count;
    out.adj.resize(std::size_t(count));
    out.loop.assign(std::size_t(count), 0.0);
    out.degree.assign(std::size_t(count), 0.0);

    std::vector<double> weight_to(std::size_t(count), 0.0);
    std::vector<std::vector<std::pair<int, double>>> grouped(std::size_t(count));
    for (int v = 0; v < g.n; ++v)
        grouped[std::size_t(community[std::size_t(v)])].emplace_back(v, 0.0);

    for (int c = 0; c < count; ++c) {
        std::vector<int> touched;
        for (const auto& [v, unused] : grouped[std::size_t(c)]) {
            out.loop[std::size_t(c)] += g.loop[std::size_t(v)];
            for (const auto& [u, w] : g.adj[std::size_t(v)]) {
                const int cu = community[std::size_t(u)];
                if (cu == c) {
                    out.loop[std::size_t(c)] += 0.5 * w; // each intra edge seen twice
                } else {
                    if (weight_to[std::size_t(cu)] == 0.0) touched.push_back(cu);
                    weight_to[std::size_t(cu)] += w;
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int cu : touched) {
            out.adj[std::size_t(c)].emplace_back(cu, weight_to[std::size_t(cu)]);
            weight_to[std::size_t(cu)] = 0.0;
        }
    }
    for (int c = 0; c < count; ++c) {
        double d = 2.0 * out.loop[std::size_t(c)];
        for (const auto& [u, w] : out.adj[std::size_t(c)]) d += w;
        out.degree[std::size_t(c)] = d;
    }
    out.total = std::accumulate(out.degree.begin(), out.degree.end(), 0.0);
    return out;
}

NodePartition partition_from_assignment(std::vector<int> assignment) {
    // group ids renumbered by smallest member node
    int count = 0;
    std::vector<int> remap(assignment.size(), -1);
    for (int& c : assignment) {
        if (c >= int(remap.size())) remap.resize(std::size_t(c + 1), -1);
        if (remap[std::size_t(c)] < 0) remap[std::size_t(c)] = count++;
        c = remap[std::size_t(c)];
    }
    NodePartition part;
    part.assignment = std::move(assignment);
    part.groups.resize(std::size_t(count));
    for (std::size_t v = 0; v < part.assignment.size(); ++v)
        part.groups[std::size_t(part.assignment[v])].push_back(int(v));
    return part;
}

} // namespace

NodePartition communities(const BipartiteGraph& g, std::uint64_t seed) {
    const int n = g.order();
    std::vector<int> node_to_comm(std::size_t(n));
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);
    if (g.size() == 0) return partition_from_assignment(std::move(node_to_comm));

    Rng rng(mix_seed(seed, {hash64("louvain")}));
    LevelGraph level = from_bipartite(g);
    std::vector<int> level_comm(std::size_t(level.n));
    std::iota(level_comm.begin(), level_comm.end(), 0);

    for (int depth = 0; depth < 64; ++depth) {
        const bool moved = move_nodes(level, level_comm, rng);
        if (!moved) break;
        int count = 0;
        renumber(level_comm, count);
        for (int v = 0; v < n; ++v)
            node_to_comm[std::size_t(v)] = level_comm[std::size_t(node_to_comm[std::size_t(v)])];
        if (count == level.n) break; // nothing merged
        level = aggregate(level, level_comm, count);
        level_comm.assign(std::size_t(count), 0);
        std::iota(level_comm.begin(), level_comm.end(), 0);
    }
    return partition_from_assignment(std::move(node_to_comm));
}

} // namespace cfml
