#include "cfml/metalearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfml/errors.hpp"
#include "cfml/rng.hpp"
#include "cfml/stats.hpp"

namespace cfml {

std::vector<std::string> cfs(const MetafeatureTable& table, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw UsageError("cfs threshold must lie in (0,1]");
    if (table.rows.size() < 2) throw DataError("cfs: insufficient data (need >= 2 rows)");

    std::vector<std::string> kept_names;
    std::vector<std::vector<double>> kept_cols;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        std::vector<double> col = table.column(c);
        if (sample_variance(col) <= 0.0) continue; // constant columns never inform
        bool ok = true;
        for (const auto& prev : kept_cols) {
            if (std::abs(pearson(col, prev)) > threshold) {
                ok = false;
                break;
            }
        }
        if (ok) {
            kept_names.push_back(table.names[c]);
            kept_cols.push_back(std::move(col));
        }
    }
    return kept_names;
}

TauResult kendall_tau_ranks(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n < 2) throw UsageError("kendall_tau: need two aligned vectors, n >= 2");
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0) ++ties_a;
            if (db == 0.0) ++ties_b;
            if (da == 0.0 || db == 0.0) continue;
            if ((da > 0.0) == (db > 0.0))
                ++concordant;
            else
                ++discordant;
        }
    }
    const double n0 = double(n) * double(n - 1) / 2.0;
    const double denom = std::sqrt((n0 - double(ties_a)) * (n0 - double(ties_b)));
    if (denom <= 0.0) return {0.0, true};
    return {double(concordant - discordant) / denom, false};
}

TauResult kendall_tau(const Ranking& a, const Ranking& b) {
    if (a.algorithms.size() != b.algorithms.size())
        throw UsageError("kendall_tau: rankings over different algorithm sets");
    std::vector<double> b_aligned(b.ranks.size());
    if (a.algorithms == b.algorithms) {
        b_aligned = b.ranks;
    } else {
        for (std::size_t i = 0; i < a.algorithms.size(); ++i) {
            const auto it = std::find(b.algorithms.begin(), b.algorithms.end(), a.algorithms[i]);
            if (it == b.algorithms.end())
                throw UsageError("kendall_tau: algorithm " + a.algorithms[i] + " missing");
            b_aligned[i] = b.ranks[std::size_t(it - b.algorithms.begin())];
        }
    }
    return kendall_tau_ranks(a.ranks, b_aligned);
}

MetalearnerKind metalearner_from_name(const std::string& name) {
    if (name == "AVG") return MetalearnerKind::AVG;
    if (name == "KNN") return MetalearnerKind::KNN;
    if (name == "RT") return MetalearnerKind::RT;
    if (name == "RF") return MetalearnerKind::RF;
    throw UsageError("unknown metalearner: " + name);
}

std::string metalearner_name(MetalearnerKind kind) {
    switch (kind) {
    case MetalearnerKind::AVG: return "AVG";
    case MetalearnerKind::KNN: return "KNN";
    case MetalearnerKind::RT: return "RT";
    case MetalearnerKind::RF: return "RF";
    }
    throw UsageError("unknown metalearner id");
}

const std::vector<std::string>& MetaDataset::algorithms() const {
    if (targets.empty()) throw UsageError("MetaDataset has no targets");
    return targets.front().algorithms;
}

MetaDataset make_meta_dataset(const MetafeatureTable& features,
                              const std::vector<std::pair<std::string, Ranking>>& targets) {
    MetaDataset meta;
    meta.features = features;
    meta.targets.reserve(features.dataset_ids.size());
    for (const auto& id : features.dataset_ids) {
        const auto it = std::find_if(targets.begin(), targets.end(),
                                     [&](const auto& t) { return t.first == id; });
        if (it == targets.end()) throw AlignmentError("no metatarget for dataset " + id);
        meta.targets.push_back(it->second);
    }
    if (targets.size() != meta.targets.size())
        throw AlignmentError("metatargets cover datasets missing from the feature table");
    for (const auto& t : meta.targets)
        if (t.algorithms != meta.targets.front().algorithms)
            throw AlignmentError("metatargets disagree on the algorithm collection");
    return meta;
}

int RankingTree::max_split_level() const {
    int depth = 0;
    for (const auto& node : nodes)
        if (node.feature >= 0) depth = std::max(depth, node.level);
    return depth;
}

namespace {

std::vector<double> mean_rank_vector(const std::vector<std::vector<double>>& ranks,
                                     const std::vector<int>& members) {
    std::vector<double> mean(ranks.front().size(), 0.0);
    for (int idx : members)
        for (std::size_t a = 0; a < mean.size(); ++a) mean[a] += ranks[std::size_t(idx)][a];
    for (double& v : mean) v /= double(members.size());
    return mean;
}

// mean squared deviation of member rank vectors from the node mean
double ranking_impurity(const std::vector<std::vector<double>>& ranks,
                        const std::vector<int>& members, const std::vector<double>& mean) {
    double acc = 0.0;
    for (int idx : members) {
        const auto& r = ranks[std::size_t(idx)];
        for (std::size_t a = 0; a < mean.size(); ++a) {
            const double d = r[a] - mean[a];
            acc += d * d;
        }
    }
    return acc / double(members.size());
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& features;
    const std::vector<std::vector<double>>& ranks;
    const MetalearnerParams& params;
    bool feature_subsample;
    Rng& rng;
    RankingTree tree;

    int build(std::vector<int> members, int level) {
        const int node_id = int(tree.nodes.size());
        tree.nodes.emplace_back();
        auto mean = mean_rank_vector(ranks, members);
        const double impurity = ranking_impurity(ranks, members, mean);
        tree.nodes[std::size_t(node_id)].mean_ranks = std::move(mean);
        tree.nodes[std::size_t(node_id)].level = level;

        if (int(members.size()) < params.min_node_size || level > params.max_depth ||
            impurity <= 0.0)
            return node_id;

        const std::size_t p = features.front().size();
        std::vector<std::size_t> candidates;
        if (feature_subsample && p > 1) {
            const std::size_t want = std::size_t(std::ceil(std::sqrt(double(p))));
            std::vector<std::size_t> all(p);
            std::iota(all.begin(), all.end(), 0);
            for (std::size_t i = 0; i < want; ++i) {
                const std::size_t j = i + std::size_t(rng.below(p - i));
                std::swap(all[i], all[j]);
            }
            candidates.assign(all.begin(), all.begin() + std::ptrdiff_t(want));
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates.resize(p);
            std::iota(candidates.begin(), candidates.end(), 0);
        }

        double best_score = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        std::vector<double> values;
        for (std::size_t f : candidates) {
            values.clear();
            for (int idx : members) values.push_back(features[std::size_t(idx)][f]);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double mid = 0.5 * (values[v] + values[v + 1]);
                std::vector<int> left, right;
                for (int idx : members)
                    (features[std::size_t(idx)][f] <= mid ? left : right).push_back(idx);
                if (left.empty() || right.empty()) continue;
                const auto lmean = mean_rank_vector(ranks, left);
                const auto rmean = mean_rank_vector(ranks, right);
                const double child =
                    double(left.size()) / double(members.size()) * ranking_impurity(ranks, left, lmean) +
                    double(right.size()) / double(members.size()) * ranking_impurity(ranks, right, rmean);
                const double score = impurity - child;
                if (score > best_score + 1e-15) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = mid;
                    found = true;
                }
            }
        }
        if (!found) return node_id;

        std::vector<int> left, right;
        for (int idx : members)
            (features[std::size_t(idx)][best_feature] <= best_threshold ? left : right).push_back(idx);
        tree.nodes[std::size_t(node_id)].feature = int(best_feature);
        tree.nodes[std::size_t(node_id)].threshold = best_threshold;
        const int l = build(std::move(left), level + 1);
        tree.nodes[std::size_t(node_id)].left = l;
        const int r = build(std::move(right), level + 1);
        tree.nodes[std::size_t(node_id)].right = r;
        return node_id;
    }
};

RankingTree build_tree(const std::vector<std::vector<double>>& features,
                       const std::vector<std::vector<double>>& ranks, std::vector<int> members,
                       const MetalearnerParams& params, bool feature_subsample, Rng& rng) {
    TreeBuilder builder{features, ranks, params, feature_subsample, rng, {}};
    builder.build(std::move(members), 1);
    return std::move(builder.tree);
}

const std::vector<double>& tree_leaf(const RankingTree& tree, const std::vector<double>& x) {
    int node = 0;
    while (tree.nodes[std::size_t(node)].feature >= 0) {
        const auto& nd = tree.nodes[std::size_t(node)];
        node = x[std::size_t(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return tree.nodes[std::size_t(node)].mean_ranks;
}

} // namespace

LabelRankingModel fit(MetalearnerKind kind, const MetaDataset& meta,
                      const MetalearnerParams& params, std::uint64_t seed) {
    const std::size_t n = meta.features.rows.size();
    if (n != meta.targets.size()) throw AlignmentError("fit: features/targets misaligned");
    if (n < 3) throw DataError("fit: insufficient data (need >= 3 training datasets)");

    LabelRankingModel model;
    model.kind = kind;
    model.params = params;
    model.seed = seed;
    model.algorithms = meta.algorithms();
    model.feature_names = meta.features.names;

    std::vector<std::vector<double>> ranks;
    ranks.reserve(n);
    for (const auto& t : meta.targets) ranks.push_back(t.ranks);

    if (kind == MetalearnerKind::AVG) {
        model.mean_ranks.assign(model.algorithms.size(), 0.0);
        for (const auto& r : ranks)
            for (std::size_t a = 0; a < r.size(); ++a) model.mean_ranks[a] += r[a];
        for (double& v : model.mean_ranks) v /= double(n);
        return model;
    }

    if (kind == MetalearnerKind::KNN) {
        const std::size_t p = meta.features.names.size();
        model.feature_mean.assign(p, 0.0);
        model.feature_sd.assign(p, 0.0);
        for (std::size_t c = 0; c < p; ++c) {
            const auto col = meta.features.column(c);
            model.feature_mean[c] = std::accumulate(col.begin(), col.end(), 0.0) / double(n);
            model.feature_sd[c] = std::sqrt(sample_variance(col));
        }
        model.train_features.reserve(n);
        for (const auto& row : meta.features.rows) {
            std::vector<double> z(p, 0.0);
            for (std::size_t c = 0; c < p; ++c)
                if (model.feature_sd[c] > 0.0)
                    z[c] = (row[c] - model.feature_mean[c]) / model.feature_sd[c];
            model.train_features.push_back(std::move(z));
        }
        model.train_ranks = std::move(ranks);
        return model;
    }

    // trees share the raw (unstandardized) feature space
    Rng rng(mix_seed(seed, {hash64("ranking-trees")}));
    std::vector<int> all(int(n));
    std::iota(all.begin(), all.end(), 0);

    if (kind == MetalearnerKind::RT) {
        model.trees.push_back(
            build_tree(meta.features.rows, ranks, all, params, /*feature_subsample=*/false, rng));
        return model;
    }

    // RF
    const int trees = std::max(1, params.trees);
    model.trees.reserve(std::size_t(trees));
    for (int t = 0; t < trees; ++t) {
        std::vector<int> members;
        if (params.bootstrap) {
            members.reserve(n);
            for (std::size_t i = 0; i < n; ++i) members.push_back(int(rng.below(n)));
            std::sort(members.begin(), members.end());
        } else {
            members = all;
        }
        model.trees.push_back(
            build_tree(meta.features.rows, ranks, std::move(members), params,
                       params.feature_subsample, rng));
    }
    return model;
}

Ranking predict(const LabelRankingModel& model, const std::vector<double>& features) {
    if (features.size() != model.feature_names.size())
        throw UsageError("predict: feature schema mismatch (got " +
                         std::to_string(features.size()) + ", trained on " +
                         std::to_string(model.feature_names.size()) + ")");

    std::vector<double> scores; // mean rank per algorithm; lower is better
    switch (model.kind) {
    case MetalearnerKind::AVG: scores = model.mean_ranks; break;
    case MetalearnerKind::KNN: {
        std::vector<double> z(features.size(), 0.0);
        for (std::size_t c = 0; c < features.size(); ++c)
            if (model.feature_sd[c] > 0.0)
                z[c] = (features[c] - model.feature_mean[c]) / model.feature_sd[c];
        const std::size_t n = model.train_features.size();
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t c = 0; c < z.size(); ++c) {
                const double d = z[c] - model.train_features[i][c];
                acc += d * d;
            }
            dist[i] = {acc, i}; // index tiebreak = training insertion order
        }
        std::sort(dist.begin(), dist.end());
        const std::size_t k = std::min<std::size_t>(std::size_t(std::max(1, model.params.k)), n);
        scores.assign(model.algorithms.size(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& r = model.train_ranks[dist[i].second];
            for (std::size_t a = 0; a < scores.size(); ++a) scores[a] += r[a];
        }
        for (double& v : scores) v /= double(k);
        break;
    }
    case MetalearnerKind::RT:
    case MetalearnerKind::RF: {
        scores.assign(model.algorithms.size(), 0.0);
        for (const auto& tree : model.trees) {
            const auto& leaf = tree_leaf(tree, features);
            for (std::size_t a = 0; a < scores.size(); ++a) scores[a] += leaf[a];
        }
        for (double& v : scores) v /= double(model.trees.size());
        break;
    }
    }

    Ranking out;
    out.algorithms = model.algorithms;
    out.ranks = fractional_ranks(scores, /*higher_better=*/false);
    return out;
}

HyperGrid default_grid(MetalearnerKind kind) {
    HyperGrid grid;
    MetalearnerParams base;
    switch (kind) {
    case MetalearnerKind::AVG: grid.combos.push_back(base); break;
    case MetalearnerKind::KNN:
        for (int k = 1; k <= 10; ++k) {
            base.k = k;
            grid.combos.push_back(base);
        }
        break;
    case MetalearnerKind::RT:
        for (int d : {2, 4, 8}) {
            base.max_depth = d;
            grid.combos.push_back(base);
        }
        break;
    case MetalearnerKind::RF:
        base.trees = 100;
        for (int d : {2, 4, 8}) {
            base.max_depth = d;
            grid.combos.push_back(base);
        }
        break;
    }
    return grid;
}

namespace {

MetaDataset subset_meta(const MetaDataset& meta, const std::vector<std::size_t>& keep) {
    MetaDataset out;
    out.features.provenance = meta.features.provenance;
    out.features.names = meta.features.names;
    for (std::size_t i : keep) {
        out.features.dataset_ids.push_back(meta.features.dataset_ids[i]);
        out.features.rows.push_back(meta.features.rows[i]);
        out.targets.push_back(meta.targets[i]);
    }
    return out;
}

double tau_or_zero(const Ranking& predicted, const Ranking& truth) {
    return kendall_tau(predicted, truth).tau;
}

} // namespace

LoocvResult loocv(const MetaDataset& meta, MetalearnerKind kind, const HyperGrid& grid,
                  std::uint64_t seed) {
    if (grid.combos.empty()) throw UsageError("loocv: empty hyperparameter grid");
    const std::size_t n = meta.features.rows.size();
    if (n < 4) throw DataError("loocv: insufficient data (need >= 4 datasets)");

    LoocvResult result;
    for (std::size_t held = 0; held < n; ++held) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
            if (i != held) rest.push_back(i);
        const MetaDataset outer = subset_meta(meta, rest);

        std::size_t best_combo = 0;
        if (grid.combos.size() > 1) {
            double best_mean = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < grid.combos.size(); ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < rest.size(); ++j) {
                    std::vector<std::size_t> inner;
                    for (std::size_t i = 0; i < rest.size(); ++i)
                        if (i != j) inner.push_back(rest[i]);
                    const MetaDataset inner_meta = subset_meta(meta, inner);
                    const auto model =
                        fit(kind, inner_meta, grid.combos[c],
                            mix_seed(seed, {hash64("loocv-inner"), held, c, j}));
                    const Ranking pred = predict(model, meta.features.rows[rest[j]]);
                    acc += tau_or_zero(pred, meta.targets[rest[j]]);
                }
                const double mean = acc / double(rest.size());
                if (mean > best_mean + 1e-12) {
                    best_mean = mean;
                    best_combo = c;
                }
            }
        }

        const auto model = fit(kind, outer, grid.combos[best_combo],
                               mix_seed(seed, {hash64("loocv-final"), held}));
        const Ranking pred = predict(model, meta.features.rows[held]);
        result.taus.push_back(tau_or_zero(pred, meta.targets[held]));
        result.chosen.push_back(grid.combos[best_combo]);
        result.predictions.push_back(pred);
    }

    result.mean_tau =
        std::accumulate(result.taus.begin(), result.taus.end(), 0.0) / double(result.taus.size());
    result.sd_tau = std::sqrt(sample_variance(result.taus));
    return result;
}

std::vector<FeatureImportanceEntry> feature_importance(const LabelRankingModel& model) {
    if (model.kind != MetalearnerKind::RF)
        throw UsageError("feature_importance requires an RF model");
    const std::size_t p = model.feature_names.size();
    std::vector<double> level_sum(p, 0.0);
    for (const auto& tree : model.trees) {
        const int unused_level = tree.max_split_level() + 1;
        std::vector<int> min_level(p, unused_level);
        for (const auto& node : tree.nodes)
            if (node.feature >= 0)
                min_level[std::size_t(node.feature)] =
                    std::min(min_level[std::size_t(node.feature)], node.level);
        for (std::size_t f = 0; f < p; ++f) level_sum[f] += double(min_level[f]);
    }

    std::vector<FeatureImportanceEntry> out(p);
    for (std::size_t f = 0; f < p; ++f)
        out[f] = {model.feature_names[f], level_sum[f] / double(model.trees.size())};
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.avg_level < b.avg_level; // schema order breaks ties (stable)
    });
    return out;
}

std::vector<double> baselevel_impact(const std::vector<std::pair<std::string, Ranking>>& predicted,
                                     const PerformanceTable& truth, Measure measure) {
    if (predicted.empty()) throw UsageError("baselevel_impact: no predictions");
    const bool higher = higher_is_better(measure);
    const std::size_t n_algs = predicted.front().second.algorithms.size();

    std::vector<double> curve(n_algs, 0.0);
    for (const auto& [dataset, ranking] : predicted) {
        if (ranking.algorithms.size() != n_algs)
            throw AlignmentError("baselevel_impact: rankings differ in algorithm count");
        std::vector<std::size_t> order(n_algs);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ranking.ranks[a] < ranking.ranks[b]; // ties: algorithm order
        });
        double best = 0.0;
        for (std::size_t t = 0; t < n_algs; ++t) {
            const double perf =
                truth.value(dataset, ranking.algorithms[order[t]], measure);
            if (t == 0)
                best = perf;
            else
                best = higher ? std::max(best, perf) : std::min(best, perf);
            curve[t] += best;
        }
    }
    for (double& v : curve) v /= double(predicted.size());
    return curve;
}

namespace {

// regularized upper incomplete gamma Q(a, x)
double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw UsageError("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // series for P(a,x), return 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Two-tailed Nemenyi q_alpha = studentized range / sqrt(2), k = 2..10.
double nemenyi_q(double alpha, std::size_t k) {
    static const double q05[] = {1.959964, 2.343701, 2.569032, 2.727774, 2.849705,
                                 2.948319, 3.030879, 3.101730, 3.163684};
    static const double q10[] = {1.644854, 2.052293, 2.291341, 2.459516, 2.588521,
                                 2.692732, 2.779884, 2.854606, 2.920063};
    static const double q01[] = {2.575829, 2.913494, 3.113250, 3.254685, 3.363740,
                                 3.452212, 3.526470, 3.590439, 3.646292};
    if (k < 2 || k > 10)
        throw UsageError("nemenyi critical values tabulated for 2..10 learners");
    const double* table = nullptr;
    if (std::abs(alpha - 0.05) < 1e-9) table = q05;
    else if (std::abs(alpha - 0.10) < 1e-9) table = q10;
    else if (std::abs(alpha - 0.01) < 1e-9) table = q01;
    else throw UsageError("nemenyi critical values tabulated for alpha in {0.01, 0.05, 0.10}");
    return table[k - 2];
}

} // namespace

FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& scores, double alpha) {
    const std::size_t k = scores.size();
    if (k < 2) throw UsageError("friedman_nemenyi: need >= 2 learners");
    const std::size_t n = scores.front().size();
    if (n < 2) throw UsageError("friedman_nemenyi: need >= 2 datasets");
    for (const auto& row : scores)
        if (row.size() != n) throw UsageError("friedman_nemenyi: ragged score matrix");

    FriedmanResult result;
    result.avg_ranks.assign(k, 0.0);
    std::vector<double> column(k);
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t l = 0; l < k; ++l) column[l] = scores[l][d];
        const auto ranks = fractional_ranks(column, /*higher_better=*/true);
        for (std::size_t l = 0; l < k; ++l) result.avg_ranks[l] += ranks[l];
    }
    for (double& r : result.avg_ranks) r /= double(n);

    double sum_sq = 0.0;
    for (double r : result.avg_ranks) sum_sq += r * r;
    const double kk = double(k);
    result.chi2 = 12.0 * double(n) / (kk * (kk + 1.0)) *
                  (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
    if (result.chi2 < 0.0) result.chi2 = 0.0;
    result.p_value = gammq(0.5 * (kk - 1.0), 0.5 * result.chi2);
    result.significant = result.p_value < alpha;
    result.critical_difference = nemenyi_q(alpha, k) * std::sqrt(kk * (kk + 1.0) / (6.0 * double(n)));
    return result;
}

} // namespace cfml
