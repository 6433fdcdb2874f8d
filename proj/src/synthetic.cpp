#include "cfml/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cfml/errors.hpp"
#include "cfml/rng.hpp"

namespace cfml {

namespace {

std::string index_id(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%02d", prefix, i);
    return buf;
}

} // namespace

RatingDataset make_rank2_dataset(std::size_t nusers, std::size_t nitems, std::size_t nratings,
                                 double noise_sd, std::uint64_t seed) {
    Rng rng(mix_seed(seed, {hash64("rank2")}));
    std::vector<double> pu(nusers * 2), qi(nitems * 2);
    for (double& x : pu) x = rng.normal();
    for (double& x : qi) x = rng.normal();

    // popularity skew: item k drawn with weight ~ 1/(k+1)^0.8 under a
    // seeded permutation
    std::vector<int> perm(nitems);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> cumulative(nitems);
    double total = 0.0;
    for (std::size_t k = 0; k < nitems; ++k) {
        total += 1.0 / std::pow(double(k + 1), 0.8);
        cumulative[k] = total;
    }

    auto draw_item = [&]() {
        const double u = rng.uniform() * total;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        return perm[std::size_t(it - cumulative.begin())];
    };

    std::vector<std::tuple<std::string, std::string, double>> rows;
    rows.reserve(nratings);
    std::vector<char> used(nusers * nitems, 0);
    std::size_t produced = 0;
    std::size_t attempts = 0;
    const std::size_t max_attempts = nratings * 50 + 1000;
    while (produced < nratings && attempts++ < max_attempts) {
        const std::size_t u = std::size_t(rng.below(nusers));
        const std::size_t i = std::size_t(draw_item());
        if (used[u * nitems + i]) continue;
        used[u * nitems + i] = 1;
        const double latent = pu[u * 2] * qi[i * 2] + pu[u * 2 + 1] * qi[i * 2 + 1];
        const double value =
            std::clamp(3.0 + 0.9 * latent + noise_sd * rng.normal(), 1.0, 5.0);
        rows.emplace_back("u" + std::to_string(u), "i" + std::to_string(i), value);
        ++produced;
    }
    if (produced < nratings)
        throw DataError("make_rank2_dataset: could not place the requested ratings");
    return RatingDataset::from_triples(rows, RatingScale{1.0, 5.0});
}

std::vector<std::pair<std::string, RatingDataset>> make_synthetic_corpus(
    const SyntheticCorpusConfig& cfg) {
    if (cfg.count < 1) throw UsageError("make_synthetic_corpus: count must be >= 1");
    std::vector<std::pair<std::string, RatingDataset>> corpus;
    for (int d = 0; d < cfg.count; ++d) {
        Rng rng(mix_seed(cfg.seed, {hash64("corpus"), std::uint64_t(d)}));
        const std::size_t nratings =
            cfg.min_ratings + std::size_t(rng.below(cfg.max_ratings - cfg.min_ratings + 1));
        // density drifts between 2% and 10% so the graphs vary in shape
        const double density = 0.02 + 0.08 * rng.uniform();
        const double cells = double(nratings) / density;
        const double aspect = 0.6 + 0.9 * rng.uniform(); // items per user
        std::size_t nusers = std::size_t(std::sqrt(cells / aspect));
        std::size_t nitems = std::size_t(std::sqrt(cells * aspect));
        nusers = std::max<std::size_t>(nusers, 12);
        nitems = std::max<std::size_t>(nitems, 12);
        const double noise = 0.2 + 0.4 * rng.uniform();
        corpus.emplace_back(index_id("synth", d),
                            make_rank2_dataset(nusers, nitems, nratings, noise,
                                               mix_seed(cfg.seed, {hash64("ds"), std::uint64_t(d)})));
    }
    return corpus;
}

MetaDataset make_synthetic_metadataset(std::size_t n_datasets, std::uint64_t seed) {
    if (n_datasets < 8) throw UsageError("make_synthetic_metadataset: need >= 8 datasets");
    Rng rng(mix_seed(seed, {hash64("metadataset")}));

    const std::vector<std::string> algorithms = {"a1", "a2", "a3", "a4"};
    const double base_rankings[4][4] = {
        {1, 2, 3, 4},
        {4, 3, 2, 1},
        {2, 1, 4, 3},
        {3, 4, 1, 2},
    };

    MetaDataset meta;
    meta.features.provenance = Provenance::RM;
    meta.features.names = {"f1", "f2", "n1", "n2", "n3", "n4"};
    for (std::size_t d = 0; d < n_datasets; ++d) {
        const int quadrant = int(d % 4);
        const double u = rng.uniform(0.25, 1.0);
        const double v = rng.uniform(0.25, 1.0);
        std::vector<double> row = {
            (quadrant == 0 || quadrant == 1) ? u : -u,
            (quadrant == 0 || quadrant == 2) ? v : -v,
            rng.normal(),
            rng.normal(),
            rng.normal(),
            rng.normal(),
        };
        meta.features.dataset_ids.push_back(index_id("synthmeta", int(d)));
        meta.features.rows.push_back(std::move(row));

        Ranking target;
        target.algorithms = algorithms;
        target.ranks.assign(std::begin(base_rankings[quadrant]),
                            std::end(base_rankings[quadrant]));
        if (rng.uniform() < 0.1) {
            const std::size_t j = std::size_t(rng.below(3));
            std::swap(target.ranks[j], target.ranks[j + 1]);
        }
        meta.targets.push_back(std::move(target));
    }
    return meta;
}

} // namespace cfml
