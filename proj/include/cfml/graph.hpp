#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfml/dataset.hpp"

namespace cfml {

/// Weighted bipartite graph over user and item nodes.
/// User nodes are 0..|U|-1, item nodes |U|..|U|+|I|-1. Undirected;
/// every edge carries the originating rating value as weight.
struct BipartiteGraph {
    struct Edge {
        int user_node;
        int item_node;
        double weight;
    };

    int n_users = 0;
    int n_items = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<int, double>>> adj; // neighbor, weight

    int order() const { return n_users + n_items; }
    std::size_t size() const { return edges.size(); }
    bool is_user_node(int node) const { return node < n_users; }
    int degree(int node) const { return int(adj[std::size_t(node)].size()); }
};

BipartiteGraph build_bipartite(const RatingDataset& ds);

// Unweighted shortest-path distances from start; -1 marks unreachable nodes.
std::vector<int> bfs_distances(const BipartiteGraph& g, int start);

// Optional debugging export, edge-list CSV "source,target,weight".
void save_edge_list(const BipartiteGraph& g, const std::string& path);

struct GraphLevelFeatures {
    double edge_density = 0.0; // size / (|U| * |I|)
    double girth = 0.0;        // shortest cycle length, 0 if acyclic
    double order = 0.0;
    double size = 0.0;
    double radius = 0.0;       // min eccentricity over the largest component
};

GraphLevelFeatures graph_level(const BipartiteGraph& g);

enum class NodeFunction {
    Alpha,
    Authority,
    Closeness,
    Constraint,
    Coreness,
    Degree,
    Diversity,
    Eccentricity,
    Eigenvector,
    Hub,
    Knn,
    Neighbours,
    Scan,
    PageRank,
    Strength,
};

const std::vector<NodeFunction>& all_node_functions(); // the fifteen, in schema order
NodeFunction node_function_from_name(const std::string& name);
std::string node_function_name(NodeFunction f);

enum class NodeSet { G, U, I };
std::string node_set_name(NodeSet set);

// Per-node scores with a definedness mask: isolated-node entropy, empty
// neighborhoods and unreachable distances are undefined and must be left
// out of downstream aggregation.
struct ScoreVector {
    std::vector<double> values;
    std::vector<char> defined;

    std::vector<double> defined_values() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            if (defined[i]) out.push_back(values[i]);
        return out;
    }
};

// Scores computed on the full graph, then restricted to the node set.
ScoreVector node_scores_masked(const BipartiteGraph& g, NodeFunction f, NodeSet set);

// Same, with undefined entries reported as 0.
std::vector<double> node_scores(const BipartiteGraph& g, NodeFunction f, NodeSet set);

enum class PairFunction { Similarity, Distance };
enum class MatrixPostFunction { Sum, Mean, Count, Variance };

const std::vector<PairFunction>& all_pair_functions();
const std::vector<MatrixPostFunction>& all_matrix_post_functions();
std::string pair_function_name(PairFunction f);
std::string matrix_post_function_name(MatrixPostFunction f);

struct PairwiseConfig {
    int sample_cap = 512; // max nodes per IL matrix; <=0 disables the cap
    std::uint64_t seed = 0;
};

// One summary per (sampled) node of the set: the mpf applied to that node's
// row of the pairwise IL matrix. Diagonal excluded; infinite distances
// excluded; Count is the number of finite, nonzero row entries.
std::vector<double> pairwise_row_summaries(const BipartiteGraph& g, NodeSet set, PairFunction f,
                                           MatrixPostFunction mpf, const PairwiseConfig& cfg = {});

// All four mpf summaries in one pass over the IL matrix (order of
// all_matrix_post_functions).
std::vector<std::vector<double>> pairwise_row_summaries_all(const BipartiteGraph& g, NodeSet set,
                                                            PairFunction f,
                                                            const PairwiseConfig& cfg = {});

struct NodePartition {
    std::vector<int> assignment;          // node -> group id
    std::vector<std::vector<int>> groups; // disjoint, covering all nodes
};

// Louvain multilevel modularity optimization on the weighted graph;
// node visiting order is derived from the seed.
NodePartition communities(const BipartiteGraph& g, std::uint64_t seed);

// Connected components (the graph is undirected, so weak == strong).
NodePartition components(const BipartiteGraph& g);

// Induced subgraph on a node subset; keeps the user/item split.
BipartiteGraph induced_subgraph(const BipartiteGraph& g, const std::vector<int>& nodes);

} // namespace cfml
