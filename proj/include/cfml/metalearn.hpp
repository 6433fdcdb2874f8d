#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfml/metafeatures.hpp"
#include "cfml/metatarget.hpp"

namespace cfml {

// Greedy pairwise-correlation filter: zero-variance columns dropped, then a
// column is kept iff its |Pearson| with every already-kept column stays at
// or below the threshold. Deterministic in schema order.
std::vector<std::string> cfs(const MetafeatureTable& table, double threshold);

struct TauResult {
    double tau = 0.0;
    bool degenerate = false; // vanishing tie-corrected denominator
};

// Kendall tau-b over aligned rank vectors.
TauResult kendall_tau_ranks(std::span<const double> a, std::span<const double> b);

// Same, matching algorithms by name (the sets must coincide).
TauResult kendall_tau(const Ranking& a, const Ranking& b);

enum class MetalearnerKind { AVG, KNN, RT, RF };

MetalearnerKind metalearner_from_name(const std::string& name);
std::string metalearner_name(MetalearnerKind kind);

struct MetalearnerParams {
    int k = 3;                    // KNN neighborhood
    int max_depth = 8;            // RT/RF split levels
    int trees = 100;              // RF
    int min_node_size = 2;
    bool bootstrap = true;        // RF bagging
    bool feature_subsample = true; // RF ceil(sqrt(p)) candidates per split
};

/// Label-ranking training data: metafeature rows plus one target ranking per
/// dataset, all over a single algorithm collection.
struct MetaDataset {
    MetafeatureTable features;
    std::vector<Ranking> targets; // aligned with features.dataset_ids

    const std::vector<std::string>& algorithms() const;
};

// Aligns a metafeature table with per-dataset target rankings by id.
MetaDataset make_meta_dataset(const MetafeatureTable& features,
                              const std::vector<std::pair<std::string, Ranking>>& targets);

struct RankingTreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int level = 0; // root split = 1
    std::vector<double> mean_ranks;
};

struct RankingTree {
    std::vector<RankingTreeNode> nodes;
    int max_split_level() const;
};

struct LabelRankingModel {
    MetalearnerKind kind = MetalearnerKind::AVG;
    MetalearnerParams params;
    std::uint64_t seed = 0;
    std::vector<std::string> algorithms;
    std::vector<std::string> feature_names;

    std::vector<double> mean_ranks; // AVG

    std::vector<double> feature_mean, feature_sd;   // KNN standardization
    std::vector<std::vector<double>> train_features; // standardized rows
    std::vector<std::vector<double>> train_ranks;

    std::vector<RankingTree> trees; // RT holds one, RF holds params.trees
};

LabelRankingModel fit(MetalearnerKind kind, const MetaDataset& meta,
                      const MetalearnerParams& params, std::uint64_t seed);

Ranking predict(const LabelRankingModel& model, const std::vector<double>& features);

struct HyperGrid {
    std::vector<MetalearnerParams> combos;
};

// KNN k in 1..10; RT depth in {2,4,8}; RF trees {100} x depth {2,4,8};
// AVG has a single empty combo.
HyperGrid default_grid(MetalearnerKind kind);

struct LoocvResult {
    std::vector<double> taus; // per held-out dataset, in id order
    double mean_tau = 0.0;
    double sd_tau = 0.0;
    std::vector<MetalearnerParams> chosen;   // per held-out dataset
    std::vector<Ranking> predictions;        // per held-out dataset
};

// Outer LOOCV with nested grid search (inner LOOCV mean tau decides).
LoocvResult loocv(const MetaDataset& meta, MetalearnerKind kind, const HyperGrid& grid,
                  std::uint64_t seed);

struct FeatureImportanceEntry {
    std::string name;
    double avg_level = 0.0; // lower = more important
};

// Minimum split depth per feature averaged over the forest's trees;
// features unused in a tree take that tree's depth + 1.
std::vector<FeatureImportanceEntry> feature_importance(const LabelRankingModel& model);

// Mean running-best true performance when following predicted rankings up
// to each threshold t; |A| values, non-decreasing in the oriented sense.
std::vector<double> baselevel_impact(const std::vector<std::pair<std::string, Ranking>>& predicted,
                                     const PerformanceTable& truth, Measure measure);

struct FriedmanResult {
    std::vector<double> avg_ranks; // per learner, aligned with input rows
    double chi2 = 0.0;
    double p_value = 1.0;
    bool significant = false;
    double critical_difference = 0.0;
};

// scores: learners x datasets, higher is better (Kendall tau here).
FriedmanResult friedman_nemenyi(const std::vector<std::vector<double>>& scores, double alpha);

} // namespace cfml
