#pragma once

#include <string>
#include <vector>

#include "cfml/baselevel.hpp"

namespace cfml {

/// Per-dataset algorithm rank vector; ties allowed. Sorted rankings carry
/// fractional average ranks, frontier rankings carry positive integers.
struct Ranking {
    std::vector<std::string> algorithms;
    std::vector<double> ranks;
};

/// One point per algorithm, one coordinate per evaluation measure.
struct DatasetInterestSpace {
    std::string dataset_id;
    std::vector<std::string> algorithms;
    std::vector<std::vector<double>> points; // [algorithm][measure]
    std::vector<bool> higher_better;         // per measure
};

// Eq.-5-style ranking: algorithms sorted best-first on the oriented value,
// exact ties sharing their average position.
Ranking individual_ranking(const std::vector<std::string>& algorithms,
                           const std::vector<double>& performances, bool higher_better);

// Iterative skyline peeling; frontier 1 holds the non-dominated points.
// a dominates b iff a >= b on every oriented coordinate and > on one.
std::vector<int> skyline_frontiers(const DatasetInterestSpace& space);

// Frontier indices used directly as the rank vector.
Ranking multicriteria_ranking(const PerformanceTable& table, const std::string& dataset_id,
                              const std::vector<Measure>& measures);

DatasetInterestSpace make_interest_space(const PerformanceTable& table,
                                         const std::string& dataset_id,
                                         const std::vector<Measure>& measures);

// Kendall tau-b between an individual and the multicriteria ranking.
double alignment(const Ranking& individual, const Ranking& multicriteria);

struct AlignmentRow {
    std::string dataset;
    Measure measure;
    double correlation;
};

// One row per (dataset, measure): tau-b between that measure's individual
// ranking and the multicriteria ranking over all measures.
std::vector<AlignmentRow> alignment_report(const PerformanceTable& table,
                                           const std::vector<Measure>& measures);

// Metatarget persistence: dataset,algorithm,rank.
void save_rankings_csv(const std::vector<std::pair<std::string, Ranking>>& rankings,
                       const std::string& path);
std::vector<std::pair<std::string, Ranking>> load_rankings_csv(const std::string& path);

} // namespace cfml
