#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfml/dataset.hpp"
#include "cfml/metalearn.hpp"

namespace cfml {

struct SyntheticCorpusConfig {
    int count = 8;
    std::uint64_t seed = 42;
    std::size_t min_ratings = 200;
    std::size_t max_ratings = 2000;
};

// Seeded low-rank datasets with popularity-skewed item sampling, rating
// scale 1..5. Dataset ids are synth-00, synth-01, ...
std::vector<std::pair<std::string, RatingDataset>> make_synthetic_corpus(
    const SyntheticCorpusConfig& cfg);

// Rank-2 factor structure plus Gaussian noise; used by the baselearner
// sanity checks. Continuous ratings clamped to 1..5.
RatingDataset make_rank2_dataset(std::size_t nusers, std::size_t nitems, std::size_t nratings,
                                 double noise_sd, std::uint64_t seed);

// Label-ranking benchmark: the metatarget is a step function of the two
// informative metafeatures (four quadrants, four base rankings over four
// algorithms), plus four noise features and a 10% chance of one adjacent
// swap per target. The quadrant rankings average to an uninformative mean,
// so AVG cannot beat learners that use the features.
MetaDataset make_synthetic_metadataset(std::size_t n_datasets, std::uint64_t seed);

} // namespace cfml
