#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfml/baselevel.hpp"
#include "cfml/dataset.hpp"
#include "cfml/graph.hpp"

namespace cfml {

enum class Provenance { RM, SL, GR, CM };

Provenance provenance_from_name(const std::string& name);
std::string provenance_name(Provenance p);

/// One dataset's named metafeatures. Names follow the dotted
/// object.function.postfunction grammar, with bracketed inner-level
/// segments for the recursive levels.
struct MetafeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
    Provenance provenance = Provenance::RM;
};

/// datasets x metafeatures matrix; all rows share one name schema.
struct MetafeatureTable {
    std::vector<std::string> dataset_ids;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    Provenance provenance = Provenance::RM;

    std::vector<double> column(std::size_t idx) const;
};

// Stacks per-dataset vectors; their name schemas must be identical.
MetafeatureTable make_table(const std::vector<std::string>& dataset_ids,
                            const std::vector<MetafeatureVector>& vectors);

// First column `dataset`, then the metafeature names; 10 significant digits.
void save_metafeature_csv(const MetafeatureTable& table, const std::string& path);
MetafeatureTable load_metafeature_csv(const std::string& path, Provenance provenance);

// The 73 rating-matrix metafeatures: U/I x {count,mean,sum} x ten summaries,
// R.ratings x ten summaries, plus nusers/nitems/nratings.
MetafeatureVector extract_rm(const RatingDataset& ds);

struct GraphExtractConfig {
    int pairwise_cap = 512;
    std::uint64_t seed = 0;
};

// The 761 graph metafeatures: 5 graph-level, 180 node-level, 96 pairwise,
// 480 subgraph-level, in that order.
MetafeatureVector extract_graph(const BipartiteGraph& g, const GraphExtractConfig& cfg = {});
MetafeatureVector extract_graph(const RatingDataset& ds, const GraphExtractConfig& cfg = {});

struct LandmarkerConfig {
    double sample_rate = 0.1;
    double holdout = 0.2;
    std::size_t min_sample_ratings = 10;
    std::uint64_t seed = 0;
    std::string dataset_label = "<unnamed>";
    std::vector<BaselearnerConfig> baselearners; // empty selects the full default suite
    EvalOptions eval;
};

std::vector<BaselearnerConfig> default_landmarker_baselearners();

// Subsampling landmarkers, one metafeature per algorithm x measure, named
// "Algorithm.Measure"; a single holdout estimate on a seeded sample.
MetafeatureVector extract_landmarkers(const RatingDataset& ds, const LandmarkerConfig& cfg);

// Column-wise concatenation followed by correlation feature selection.
MetafeatureTable comprehensive(const std::vector<MetafeatureTable>& tables,
                               double threshold = 0.7);

} // namespace cfml
