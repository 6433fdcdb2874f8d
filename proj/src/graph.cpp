#include "cfml/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>

#include "cfml/errors.hpp"

namespace cfml {

BipartiteGraph build_bipartite(const RatingDataset& ds) {
    BipartiteGraph g;
    g.n_users = int(ds.nusers());
    g.n_items = int(ds.nitems());
    g.adj.resize(std::size_t(g.order()));
    g.edges.reserve(ds.nratings());
    for (const auto& r : ds.ratings()) {
        const int u = r.user;
        const int v = g.n_users + r.item;
        g.edges.push_back({u, v, r.value});
        g.adj[std::size_t(u)].emplace_back(v, r.value);
        g.adj[std::size_t(v)].emplace_back(u, r.value);
    }
    // sorted adjacency gives deterministic traversal and O(log d) weight lookup
    for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
    return g;
}

void save_edge_list(const BipartiteGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "source,target,weight\n";
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
        out << e.user_node << ',' << e.item_node << ',' << buf << '\n';
    }
}

std::vector<int> bfs_distances(const BipartiteGraph& g, int start) {
    std::vector<int> dist(std::size_t(g.order()), -1);
    std::deque<int> queue;
    dist[std::size_t(start)] = 0;
    queue.push_back(start);
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (const auto& [y, w] : g.adj[std::size_t(x)]) {
            if (dist[std::size_t(y)] < 0) {
                dist[std::size_t(y)] = dist[std::size_t(x)] + 1;
                queue.push_back(y);
            }
        }
    }
    return dist;
}

namespace {

// Exact girth for simple graphs: BFS from every node; a non-tree edge (x,y)
// seen from root r witnesses a cycle of length dist[x]+dist[y]+1, and the
// minimum over all roots is the girth.
int girth_of(const BipartiteGraph& g) {
    const int n = g.order();
    int best = std::numeric_limits<int>::max();
    std::vector<int> dist(std::size_t(n)), parent(std::size_t(n));
    std::deque<int> queue;
    for (int root = 0; root < n; ++root) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        dist[std::size_t(root)] = 0;
        queue.clear();
        queue.push_back(root);
        while (!queue.empty()) {
            const int x = queue.front();
            queue.pop_front();
            if (2 * dist[std::size_t(x)] >= best) continue;
            for (const auto& [y, w] : g.adj[std::size_t(x)]) {
                if (dist[std::size_t(y)] < 0) {
                    dist[std::size_t(y)] = dist[std::size_t(x)] + 1;
                    parent[std::size_t(y)] = x;
                    queue.push_back(y);
                } else if (y != parent[std::size_t(x)]) {
                    best = std::min(best, dist[std::size_t(x)] + dist[std::size_t(y)] + 1);
                }
            }
        }
    }
    return best == std::numeric_limits<int>::max() ? 0 : best;
}

} // namespace

GraphLevelFeatures graph_level(const BipartiteGraph& g) {
    GraphLevelFeatures out;
    if (g.order() == 0) return out;
    out.order = double(g.order());
    out.size = double(g.size());
    const double possible = double(g.n_users) * double(g.n_items);
    out.edge_density = possible > 0.0 ? double(g.size()) / possible : 0.0;
    out.girth = double(girth_of(g));

    const NodePartition comps = components(g);
    const std::vector<int>* largest = nullptr;
    for (const auto& group : comps.groups)
        if (!largest || group.size() > largest->size()) largest = &group;
    if (largest) {
        int radius = std::numeric_limits<int>::max();
        for (int v : *largest) {
            const auto dist = bfs_distances(g, v);
            int ecc = 0;
            for (int u : *largest) ecc = std::max(ecc, dist[std::size_t(u)]);
            radius = std::min(radius, ecc);
        }
        out.radius = double(radius);
    }
    return out;
}

NodePartition components(const BipartiteGraph& g) {
    const int n = g.order();
    NodePartition part;
    part.assignment.assign(std::size_t(n), -1);
    std::deque<int> queue;
    for (int start = 0; start < n; ++start) {
        if (part.assignment[std::size_t(start)] >= 0) continue;
        const int id = int(part.groups.size());
        part.groups.emplace_back();
        part.assignment[std::size_t(start)] = id;
        queue.push_back(start);
        while (!queue.empty()) {
            const int x = queue.front();
            queue.pop_front();
            part.groups[std::size_t(id)].push_back(x);
            for (const auto& [y, w] : g.adj[std::size_t(x)]) {
                if (part.assignment[std::size_t(y)] < 0) {
                    part.assignment[std::size_t(y)] = id;
                    queue.push_back(y);
                }
            }
        }
        std::sort(part.groups[std::size_t(id)].begin(), part.groups[std::size_t(id)].end());
    }
    return part;
}

BipartiteGraph induced_subgraph(const BipartiteGraph& g, const std::vector<int>& nodes) {
    std::vector<int> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<int> remap(std::size_t(g.order()), -1);
    BipartiteGraph sub;
    for (int v : sorted)
        if (g.is_user_node(v)) remap[std::size_t(v)] = sub.n_users++;
    for (int v : sorted)
        if (!g.is_user_node(v)) remap[std::size_t(v)] = sub.n_users + sub.n_items++;
    sub.adj.resize(std::size_t(sub.order()));

    for (const auto& e : g.edges) {
        const int u = remap[std::size_t(e.user_node)];
        const int v = remap[std::size_t(e.item_node)];
        if (u < 0 || v < 0) continue;
        sub.edges.push_back({u, v, e.weight});
        sub.adj[std::size_t(u)].emplace_back(v, e.weight);
        sub.adj[std::size_t(v)].emplace_back(u, e.weight);
    }
    for (auto& nbrs : sub.adj) std::sort(nbrs.begin(), nbrs.end());
    return sub;
}

} // namespace cfml
