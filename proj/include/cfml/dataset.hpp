#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace cfml {

struct RatingScale {
    double min_rating = 0.0;
    double max_rating = 0.0;
    double span() const { return max_rating - min_rating; }
};

struct RatingTriple {
    int user;
    int item;
    double value;
    bool operator==(const RatingTriple&) const = default;
};

/// Sparse user-item-feedback triples with bijective id maps.
/// Immutable after construction; safe to share across threads.
class RatingDataset {
public:
    RatingDataset() = default;

    // Builds from (user id, item id, value) rows; duplicate pairs keep the
    // last value seen. Declared scale overrides the observed one and every
    // value must fall inside it.
    static RatingDataset from_triples(const std::vector<std::tuple<std::string, std::string, double>>& rows,
                                      std::optional<RatingScale> declared = std::nullopt);

    // Same index space as the parent, restricted to the given rating rows.
    // Used for CV folds, where users/items must keep their global indices.
    RatingDataset subset_keep_maps(const std::vector<int>& rating_indices) const;

    const std::vector<std::string>& users() const { return users_; }
    const std::vector<std::string>& items() const { return items_; }
    const std::vector<RatingTriple>& ratings() const { return ratings_; }
    const RatingScale& scale() const { return scale_; }

    std::size_t nusers() const { return users_.size(); }
    std::size_t nitems() const { return items_.size(); }
    std::size_t nratings() const { return ratings_.size(); }
    bool empty() const { return ratings_.empty(); }

private:
    std::vector<std::string> users_;
    std::vector<std::string> items_;
    std::vector<RatingTriple> ratings_;
    RatingScale scale_;
};

enum class RatingFormat { CsvTriples, MovielensTab };

RatingFormat rating_format_from_name(const std::string& name);
std::string rating_format_name(RatingFormat format);

// csv-triples: header "user,item,rating", '.' decimal separator.
// movielens-tab: headerless "user\titem\trating\ttimestamp".
RatingDataset load_ratings(const std::string& path, RatingFormat format,
                           std::optional<RatingScale> declared = std::nullopt);

// Canonical csv-triples form; load_ratings(save_ratings(ds)) == ds.
void save_ratings(const RatingDataset& ds, const std::string& path);

struct DatasetStats {
    std::size_t nusers = 0;
    std::size_t nitems = 0;
    std::size_t nratings = 0;
    bool operator==(const DatasetStats&) const = default;
};

DatasetStats dataset_stats(const RatingDataset& ds);

struct SplitPlan {
    struct Fold {
        std::vector<int> train;
        std::vector<int> test;
    };
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
};

// Rating-level random partition into k folds; test sizes differ by at most 1.
SplitPlan kfold_split(const RatingDataset& ds, int k, std::uint64_t seed);

// Uniform subsample of ceil(rate * nratings) triples, users/items re-indexed.
RatingDataset sample_ratings(const RatingDataset& ds, double rate, std::uint64_t seed);

} // namespace cfml
