#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfml {

// Scalar summaries applied on top of per-object value vectors.
enum class PostFunction {
    Max,
    Min,
    Mean,
    Sd,
    Variance,
    Median,
    Mode,
    Entropy,
    Gini,
    Skewness,
    Kurtosis,
    Sum,
    Count,
};

// Conventions: variance/sd use the n-1 denominator; skewness is
// Fisher-Pearson g1 and kurtosis is excess kurtosis, both 0 when the input
// has zero spread; entropy is Shannon entropy over a Sturges-binned
// histogram; gini shifts values to be nonnegative first; mode returns the
// most frequent value, smallest on ties. Empty input yields 0 everywhere.
double post_function(std::span<const double> values, PostFunction pf);

PostFunction post_function_from_name(std::string_view name);
std::string_view post_function_name(PostFunction pf);

// The ten summaries of the rating-matrix metafeature scheme, in order.
const std::vector<PostFunction>& rm_post_functions();
// The four summaries used by the graph metafeature levels, in order.
const std::vector<PostFunction>& graph_post_functions();

// Pearson correlation; 0 if either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// Best-first fractional ranks (ties share their average position).
std::vector<double> fractional_ranks(std::span<const double> values, bool higher_better);

double sample_variance(std::span<const double> values);

} // namespace cfml
