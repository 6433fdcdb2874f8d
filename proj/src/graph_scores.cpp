#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfml/errors.hpp"
#include "cfml/graph.hpp"
#include "cfml/rng.hpp"
#include "cfml/stats.hpp"

namespace cfml {

namespace {

constexpr double kPowerTol = 1e-12;
constexpr int kPowerMaxIter = 1000;
constexpr double kPageRankTol = 1e-10;
constexpr int kPageRankMaxIter = 200;
constexpr double kDamping = 0.85;

std::vector<double> strengths(const BipartiteGraph& g) {
    std::vector<double> s(std::size_t(g.order()), 0.0);
    for (int v = 0; v < g.order(); ++v)
        for (const auto& [u, w] : g.adj[std::size_t(v)]) s[std::size_t(v)] += w;
    return s;
}

// k-core decomposition on unweighted degrees (Batagelj-Zaversnik).
std::vector<double> coreness_scores(const BipartiteGraph& g) {
    const int n = g.order();
    std::vector<int> degree(std::size_t(n));
    int max_deg = 0;
    for (int v = 0; v < n; ++v) {
        degree[std::size_t(v)] = g.degree(v);
        max_deg = std::max(max_deg, degree[std::size_t(v)]);
    }
    std::vector<int> bin(std::size_t(max_deg + 1), 0);
    for (int v = 0; v < n; ++v) bin[std::size_t(degree[std::size_t(v)])]++;
    int start = 0;
    for (int d = 0; d <= max_deg; ++d) {
        const int count = bin[std::size_t(d)];
        bin[std::size_t(d)] = start;
        start += count;
    }
    std::vector<int> pos(std::size_t(n)), vert(std::size_t(n));
    for (int v = 0; v < n; ++v) {
        pos[std::size_t(v)] = bin[std::size_t(degree[std::size_t(v)])]++;
        vert[std::size_t(pos[std::size_t(v)])] = v;
    }
    for (int d = max_deg; d > 0; --d) bin[std::size_t(d)] = bin[std::size_t(d - 1)];
    bin[0] = 0;

    std::vector<int> core(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        const int v = vert[std::size_t(i)];
        core[std::size_t(v)] = degree[std::size_t(v)];
        for (const auto& [u, w] : g.adj[std::size_t(v)]) {
            if (degree[std::size_t(u)] > degree[std::size_t(v)]) {
                const int du = degree[std::size_t(u)];
                const int pu = pos[std::size_t(u)];
                const int pw = bin[std::size_t(du)];
                const int x = vert[std::size_t(pw)];
                if (u != x) {
                    std::swap(vert[std::size_t(pu)], vert[std::size_t(pw)]);
                    pos[std::size_t(u)] = pw;
                    pos[std::size_t(x)] = pu;
                }
                bin[std::size_t(du)]++;
                degree[std::size_t(u)]--;
            }
        }
    }
    return std::vector<double>(core.begin(), core.end());
}

std::vector<double> pagerank_scores(const BipartiteGraph& g, const std::vector<double>& strength) {
    const int n = g.order();
    std::vector<double> pr(std::size_t(n), 1.0 / double(n));
    std::vector<double> next(std::size_t(n), 0.0);
    for (int iter = 0; iter < kPageRankMaxIter; ++iter) {
        double dangling = 0.0;
        for (int v = 0; v < n; ++v)
            if (strength[std::size_t(v)] <= 0.0) dangling += pr[std::size_t(v)];
        const double base = (1.0 - kDamping) / double(n) + kDamping * dangling / double(n);
        std::fill(next.begin(), next.end(), base);
        for (int v = 0; v < n; ++v) {
            const double sv = strength[std::size_t(v)];
            if (sv <= 0.0) continue;
            const double share = kDamping * pr[std::size_t(v)] / sv;
            for (const auto& [u, w] : g.adj[std::size_t(v)]) next[std::size_t(u)] += share * w;
        }
        double diff = 0.0;
        for (int v = 0; v < n; ++v) diff += std::abs(next[std::size_t(v)] - pr[std::size_t(v)]);
        pr.swap(next);
        if (diff < kPageRankTol) break;
    }
    return pr;
}

void multiply_adjacency(const BipartiteGraph& g, const std::vector<double>& x,
                        std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int v = 0; v < g.order(); ++v) {
        double acc = 0.0;
        for (const auto& [u, w] : g.adj[std::size_t(v)]) acc += w * x[std::size_t(u)];
        out[std::size_t(v)] = acc;
    }
}

double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// Dominant eigenvector of A via shifted power iteration (A + I keeps the
// Perron vector but breaks the +/-lambda oscillation of bipartite spectra).
// Returns the vector max-normalized, plus lambda_max of A.
std::pair<std::vector<double>, double> dominant_eigen(const BipartiteGraph& g) {
    const int n = g.order();
    std::vector<double> x(std::size_t(n), 1.0), ax(std::size_t(n), 0.0);
    if (n == 0) return {x, 0.0};
    if (g.size() == 0) return {std::vector<double>(std::size_t(n), 0.0), 0.0};
    double lambda = 0.0;
    for (int iter = 0; iter < kPowerMaxIter; ++iter) {
        multiply_adjacency(g, x, ax);
        double dot = 0.0, xx = 0.0;
        for (int v = 0; v < n; ++v) {
            dot += x[std::size_t(v)] * ax[std::size_t(v)];
            xx += x[std::size_t(v)] * x[std::size_t(v)];
        }
        lambda = dot / xx;
        for (int v = 0; v < n; ++v) ax[std::size_t(v)] += x[std::size_t(v)]; // shift
        const double norm = l2_norm(ax);
        if (norm <= 0.0) return {std::vector<double>(std::size_t(n), 0.0), 0.0};
        double diff = 0.0;
        for (int v = 0; v < n; ++v) {
            ax[std::size_t(v)] /= norm;
            diff = std::max(diff, std::abs(ax[std::size_t(v)] - x[std::size_t(v)]));
        }
        x.swap(ax);
        if (diff < kPowerTol) break;
    }
    const double mx = *std::max_element(x.begin(), x.end());
    if (mx > 0.0)
        for (double& v : x) v /= mx;
    return {x, lambda};
}

// HITS on an undirected graph: the dominant eigenvector of A^2, blockwise.
std::vector<double> hits_scores(const BipartiteGraph& g) {
    const int n = g.order();
    if (n == 0) return {};
    if (g.size() == 0) return std::vector<double>(std::size_t(n), 0.0);
    std::vector<double> x(std::size_t(n), 1.0), tmp(std::size_t(n), 0.0), next(std::size_t(n), 0.0);
    for (int iter = 0; iter < kPowerMaxIter; ++iter) {
        multiply_adjacency(g, x, tmp);
        multiply_adjacency(g, tmp, next);
        const double norm = l2_norm(next);
        if (norm <= 0.0) return std::vector<double>(std::size_t(n), 0.0);
        double diff = 0.0;
        for (int v = 0; v < n; ++v) {
            next[std::size_t(v)] /= norm;
            diff = std::max(diff, std::abs(next[std::size_t(v)] - x[std::size_t(v)]));
        }
        x.swap(next);
        if (diff < kPowerTol) break;
    }
    const double mx = *std::max_element(x.begin(), x.end());
    if (mx > 0.0)
        for (double& v : x) v /= mx;
    return x;
}

// Bonacich alpha centrality x = (I - alpha*A)^-1 * 1 with alpha = 0.85/lambda_max,
// solved by Neumann iteration.
std::vector<double> alpha_scores(const BipartiteGraph& g) {
    const int n = g.order();
    const double lambda = dominant_eigen(g).second;
    if (lambda <= 1e-12) return std::vector<double>(std::size_t(n), 1.0);
    const double alpha = kDamping / lambda;
    std::vector<double> x(std::size_t(n), 1.0), ax(std::size_t(n), 0.0);
    for (int iter = 0; iter < kPowerMaxIter; ++iter) {
        multiply_adjacency(g, x, ax);
        double diff = 0.0;
        for (int v = 0; v < n; ++v) {
            const double nv = 1.0 + alpha * ax[std::size_t(v)];
            diff = std::max(diff, std::abs(nv - x[std::size_t(v)]));
            ax[std::size_t(v)] = nv;
        }
        x.swap(ax);
        if (diff < 1e-10) break;
    }
    return x;
}

// Burt's constraint with weight-proportional tie shares.
ScoreVector constraint_scores(const BipartiteGraph& g, const std::vector<double>& strength) {
    const int n = g.order();
    ScoreVector out;
    out.values.assign(std::size_t(n), 0.0);
    out.defined.assign(std::size_t(n), 1);

    auto weight_between = [&](int a, int b) -> double {
        const auto& nbrs = g.adj[std::size_t(a)];
        auto it = std::lower_bound(nbrs.begin(), nbrs.end(), std::make_pair(b, -1e300));
        if (it != nbrs.end() && it->first == b) return it->second;
        return 0.0;
    };

    for (int i = 0; i < n; ++i) {
        const double si = strength[std::size_t(i)];
        if (g.degree(i) == 0 || si <= 0.0) {
            out.defined[std::size_t(i)] = 0;
            continue;
        }
        double c = 0.0;
        for (const auto& [j, wij] : g.adj[std::size_t(i)]) {
            double term = wij / si;
            // indirect investment through shared neighbors q of i and j
            for (const auto& [q, wiq] : g.adj[std::size_t(i)]) {
                if (q == j) continue;
                const double sq = strength[std::size_t(q)];
                if (sq <= 0.0) continue;
                const double wqj = weight_between(q, j);
                if (wqj > 0.0) term += (wiq / si) * (wqj / sq);
            }
            c += term * term;
        }
        out.values[std::size_t(i)] = c;
    }
    return out;
}

ScoreVector full_graph_scores(const BipartiteGraph& g, NodeFunction f) {
    const int n = g.order();
    ScoreVector out;
    out.values.assign(std::size_t(n), 0.0);
    out.defined.assign(std::size_t(n), 1);

    switch (f) {
    case NodeFunction::Degree:
    case NodeFunction::Neighbours:
        for (int v = 0; v < n; ++v) out.values[std::size_t(v)] = double(g.degree(v));
        return out;
    case NodeFunction::Strength: {
        out.values = strengths(g);
        return out;
    }
    case NodeFunction::Scan: {
        for (int v = 0; v < n; ++v) {
            const int d = g.degree(v);
            if (d == 0) {
                out.defined[std::size_t(v)] = 0;
                continue;
            }
            double acc = 0.0;
            for (const auto& [u, w] : g.adj[std::size_t(v)]) acc += w;
            out.values[std::size_t(v)] = acc / double(d);
        }
        return out;
    }
    case NodeFunction::Diversity: {
        for (int v = 0; v < n; ++v) {
            const int d = g.degree(v);
            if (d == 0) {
                out.defined[std::size_t(v)] = 0;
                continue;
            }
            if (d == 1) {
                out.values[std::size_t(v)] = 0.0;
                continue;
            }
            double total = 0.0;
            for (const auto& [u, w] : g.adj[std::size_t(v)])
                if (w > 0.0) total += w;
            if (total <= 0.0) {
                out.defined[std::size_t(v)] = 0;
                continue;
            }
            double h = 0.0;
            for (const auto& [u, w] : g.adj[std::size_t(v)]) {
                if (w <= 0.0) continue;
                const double p = w / total;
                h -= p * std::log(p);
            }
            out.values[std::size_t(v)] = h / std::log(double(d));
        }
        return out;
    }
    case NodeFunction::Closeness:
    case NodeFunction::Eccentricity: {
        for (int v = 0; v < n; ++v) {
            const auto dist = bfs_distances(g, v);
            long long total = 0;
            int reachable = 0, ecc = 0;
            for (int u = 0; u < n; ++u) {
                if (u == v || dist[std::size_t(u)] < 0) continue;
                ++reachable;
                total += dist[std::size_t(u)];
                ecc = std::max(ecc, dist[std::size_t(u)]);
            }
            if (reachable == 0) {
                out.defined[std::size_t(v)] = 0;
                continue;
            }
            out.values[std::size_t(v)] = (f == NodeFunction::Closeness)
                                             ? double(reachable) / double(total)
                                             : double(ecc);
        }
        return out;
    }
    case NodeFunction::Coreness:
        out.values = coreness_scores(g);
        return out;
    case NodeFunction::Knn: {
        for (int v = 0; v < n; ++v) {
            const int d = g.degree(v);
            if (d == 0) {
                out.defined[std::size_t(v)] = 0;
                continue;
            }
            double acc = 0.0;
            for (const auto& [u, w] : g.adj[std::size_t(v)]) acc += double(g.degree(u));
            out.values[std::size_t(v)] = acc / double(d);
        }
        return out;
    }
    case NodeFunction::PageRank:
        out.values = pagerank_scores(g, strengths(g));
        return out;
    case NodeFunction::Eigenvector:
        out.values = dominant_eigen(g).first;
        return out;
    case NodeFunction::Hub:
    case NodeFunction::Authority:
        out.values = hits_scores(g);
        return out;
    case NodeFunction::Alpha:
        out.values = alpha_scores(g);
        return out;
    case NodeFunction::Constraint:
        return constraint_scores(g, strengths(g));
    }
    throw UsageError("unknown node function id");
}

std::vector<int> node_set_members(const BipartiteGraph& g, NodeSet set) {
    std::vector<int> nodes;
    const int n = g.order();
    switch (set) {
    case NodeSet::G:
        nodes.resize(std::size_t(n));
        std::iota(nodes.begin(), nodes.end(), 0);
        break;
    case NodeSet::U:
        nodes.resize(std::size_t(g.n_users));
        std::iota(nodes.begin(), nodes.end(), 0);
        break;
    case NodeSet::I:
        nodes.resize(std::size_t(g.n_items));
        std::iota(nodes.begin(), nodes.end(), g.n_users);
        break;
    }
    return nodes;
}

} // namespace

const std::vector<NodeFunction>& all_node_functions() {
    static const std::vector<NodeFunction> fns = {
        NodeFunction::Alpha,     NodeFunction::Authority,    NodeFunction::Closeness,
        NodeFunction::Constraint, NodeFunction::Coreness,    NodeFunction::Degree,
        NodeFunction::Diversity, NodeFunction::Eccentricity, NodeFunction::Eigenvector,
        NodeFunction::Hub,       NodeFunction::Knn,          NodeFunction::Neighbours,
        NodeFunction::Scan,      NodeFunction::PageRank,     NodeFunction::Strength,
    };
    return fns;
}

namespace {
struct FnName {
    NodeFunction f;
    const char* name;
};
constexpr FnName kFnNames[] = {
    {NodeFunction::Alpha, "alpha"},
    {NodeFunction::Authority, "authority"},
    {NodeFunction::Closeness, "closeness"},
    {NodeFunction::Constraint, "constraint"},
    {NodeFunction::Coreness, "coreness"},
    {NodeFunction::Degree, "degree"},
    {NodeFunction::Diversity, "diversity"},
    {NodeFunction::Eccentricity, "eccentricity"},
    {NodeFunction::Eigenvector, "eigenvector"},
    {NodeFunction::Hub, "hub"},
    {NodeFunction::Knn, "knn"},
    {NodeFunction::Neighbours, "neighbours"},
    {NodeFunction::Scan, "scan"},
    {NodeFunction::PageRank, "PageRank"},
    {NodeFunction::Strength, "strength"},
};
} // namespace

NodeFunction node_function_from_name(const std::string& name) {
    for (const auto& e : kFnNames)
        if (name == e.name) return e.f;
    throw UsageError("unknown node function: " + name);
}

std::string node_function_name(NodeFunction f) {
    for (const auto& e : kFnNames)
        if (e.f == f) return e.name;
    throw UsageError("unknown node function id");
}

std::string node_set_name(NodeSet set) {
    switch (set) {
    case NodeSet::G: return "G";
    case NodeSet::U: return "U";
    case NodeSet::I: return "I";
    }
    throw UsageError("unknown node set");
}

ScoreVector node_scores_masked(const BipartiteGraph& g, NodeFunction f, NodeSet set) {
    const ScoreVector full = full_graph_scores(g, f);
    if (set == NodeSet::G) return full;
    const auto nodes = node_set_members(g, set);
    ScoreVector out;
    out.values.reserve(nodes.size());
    out.defined.reserve(nodes.size());
    for (int v : nodes) {
        out.values.push_back(full.values[std::size_t(v)]);
        out.defined.push_back(full.defined[std::size_t(v)]);
    }
    return out;
}

std::vector<double> node_scores(const BipartiteGraph& g, NodeFunction f, NodeSet set) {
    ScoreVector masked = node_scores_masked(g, f, set);
    for (std::size_t i = 0; i < masked.values.size(); ++i)
        if (!masked.defined[i]) masked.values[i] = 0.0;
    return masked.values;
}

const std::vector<PairFunction>& all_pair_functions() {
    static const std::vector<PairFunction> fns = {PairFunction::Similarity, PairFunction::Distance};
    return fns;
}

const std::vector<MatrixPostFunction>& all_matrix_post_functions() {
    static const std::vector<MatrixPostFunction> fns = {
        MatrixPostFunction::Sum,
        MatrixPostFunction::Mean,
        MatrixPostFunction::Count,
        MatrixPostFunction::Variance,
    };
    return fns;
}

std::string pair_function_name(PairFunction f) {
    return f == PairFunction::Similarity ? "similarity" : "distance";
}

std::string matrix_post_function_name(MatrixPostFunction f) {
    switch (f) {
    case MatrixPostFunction::Sum: return "sum";
    case MatrixPostFunction::Mean: return "mean";
    case MatrixPostFunction::Count: return "count";
    case MatrixPostFunction::Variance: return "variance";
    }
    throw UsageError("unknown matrix post-function");
}

namespace {

// Streaming accumulator for one IL-matrix row.
struct RowAccumulator {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t included = 0; // finite entries
    std::size_t nonzero = 0;  // finite and nonzero

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++included;
        if (x != 0.0) ++nonzero;
    }
    double mean() const { return included == 0 ? 0.0 : sum / double(included); }
    double variance() const {
        if (included < 2) return 0.0;
        const double v = (sumsq - sum * sum / double(included)) / double(included - 1);
        return v > 0.0 ? v : 0.0;
    }
    double get(MatrixPostFunction mpf) const {
        switch (mpf) {
        case MatrixPostFunction::Sum: return sum;
        case MatrixPostFunction::Mean: return mean();
        case MatrixPostFunction::Count: return double(nonzero);
        case MatrixPostFunction::Variance: return variance();
        }
        return 0.0;
    }
};

double jaccard(const BipartiteGraph& g, int a, int b) {
    const auto& na = g.adj[std::size_t(a)];
    const auto& nb = g.adj[std::size_t(b)];
    if (na.empty() && nb.empty()) return 0.0;
    std::size_t i = 0, j = 0, common = 0;
    while (i < na.size() && j < nb.size()) {
        if (na[i].first == nb[j].first) {
            ++common;
            ++i;
            ++j;
        } else if (na[i].first < nb[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t either = na.size() + nb.size() - common;
    return either == 0 ? 0.0 : double(common) / double(either);
}

std::vector<int> sampled_set(const BipartiteGraph& g, NodeSet set, const PairwiseConfig& cfg) {
    std::vector<int> nodes = node_set_members(g, set);
    if (cfg.sample_cap > 0 && int(nodes.size()) > cfg.sample_cap) {
        Rng rng(mix_seed(cfg.seed, {hash64("pairwise"), std::uint64_t(set)}));
        rng.shuffle(nodes);
        nodes.resize(std::size_t(cfg.sample_cap));
        std::sort(nodes.begin(), nodes.end());
    }
    return nodes;
}

std::vector<RowAccumulator> pairwise_rows(const BipartiteGraph& g, NodeSet set, PairFunction f,
                                          const PairwiseConfig& cfg) {
    const std::vector<int> nodes = sampled_set(g, set, cfg);
    const std::size_t m = nodes.size();
    std::vector<RowAccumulator> rows(m);

    if (f == PairFunction::Similarity) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double s = jaccard(g, nodes[i], nodes[j]);
                rows[i].add(s);
                rows[j].add(s);
            }
        }
    } else {
        std::vector<char> in_set(std::size_t(g.order()), 0);
        for (std::size_t i = 0; i < m; ++i) in_set[std::size_t(nodes[i])] = 1;
        for (std::size_t i = 0; i < m; ++i) {
            const auto dist = bfs_distances(g, nodes[i]);
            for (int v = 0; v < g.order(); ++v) {
                if (!in_set[std::size_t(v)] || v == nodes[i]) continue;
                if (dist[std::size_t(v)] < 0) continue; // unreachable: excluded
                rows[i].add(double(dist[std::size_t(v)]));
            }
        }
    }
    return rows;
}

} // namespace

std::vector<std::vector<double>> pairwise_row_summaries_all(const BipartiteGraph& g, NodeSet set,
                                                            PairFunction f,
                                                            const PairwiseConfig& cfg) {
    const auto rows = pairwise_rows(g, set, f, cfg);
    std::vector<std::vector<double>> out;
    for (MatrixPostFunction mpf : all_matrix_post_functions()) {
        std::vector<double> summaries;
        summaries.reserve(rows.size());
        for (const auto& row : rows) summaries.push_back(row.get(mpf));
        out.push_back(std::move(summaries));
    }
    return out;
}

std::vector<double> pairwise_row_summaries(const BipartiteGraph& g, NodeSet set, PairFunction f,
                                           MatrixPostFunction mpf, const PairwiseConfig& cfg) {
    const auto rows = pairwise_rows(g, set, f, cfg);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.get(mpf));
    return out;
}

} // namespace cfml
