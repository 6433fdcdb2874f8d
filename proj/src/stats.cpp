#include "cfml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfml/errors.hpp"

namespace cfml {

namespace {

double vec_sum(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

double vec_mean(std::span<const double> v) {
    return v.empty() ? 0.0 : vec_sum(v) / double(v.size());
}

// central moment of order k
double central_moment(std::span<const double> v, double mean, int k) {
    double acc = 0.0;
    for (double x : v) acc += std::pow(x - mean, k);
    return acc / double(v.size());
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mode_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double best = v[0];
    std::size_t best_count = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if (j - i > best_count) {
            best_count = j - i;
            best = v[i];
        }
        i = j;
    }
    return best;
}

// Shannon entropy (nats) over an equal-width histogram with
// ceil(log2(n)+1) bins; 0 for constant input.
double entropy_of(std::span<const double> v) {
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mn == mx) return 0.0;
    const std::size_t n = v.size();
    const int bins = int(std::ceil(std::log2(double(n)) + 1.0));
    std::vector<std::size_t> counts(std::size_t(bins), 0);
    const double width = (mx - mn) / double(bins);
    for (double x : v) {
        int b = int((x - mn) / width);
        if (b >= bins) b = bins - 1;
        counts[std::size_t(b)]++;
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = double(c) / double(n);
        h -= p * std::log(p);
    }
    return h;
}

// Gini coefficient of nonnegative-shifted values, via the sorted form.
double gini_of(std::vector<double> v) {
    const double mn = *std::min_element(v.begin(), v.end());
    if (mn < 0.0)
        for (double& x : v) x -= mn;
    std::sort(v.begin(), v.end());
    const double total = vec_sum(v);
    if (total <= 0.0) return 0.0;
    const double n = double(v.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) weighted += double(i + 1) * v[i];
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

} // namespace

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = vec_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / double(v.size() - 1);
}

double post_function(std::span<const double> v, PostFunction pf) {
    if (v.empty()) return 0.0;
    switch (pf) {
    case PostFunction::Max: return *std::max_element(v.begin(), v.end());
    case PostFunction::Min: return *std::min_element(v.begin(), v.end());
    case PostFunction::Mean: return vec_mean(v);
    case PostFunction::Sd: return std::sqrt(sample_variance(v));
    case PostFunction::Variance: return sample_variance(v);
    case PostFunction::Median: return median_of(std::vector<double>(v.begin(), v.end()));
    case PostFunction::Mode: return mode_of(std::vector<double>(v.begin(), v.end()));
    case PostFunction::Entropy: return entropy_of(v);
    case PostFunction::Gini: return gini_of(std::vector<double>(v.begin(), v.end()));
    case PostFunction::Skewness: {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        if (*mn == *mx) return 0.0;
        const double mean = vec_mean(v);
        const double m2 = central_moment(v, mean, 2);
        if (m2 <= 0.0) return 0.0;
        return central_moment(v, mean, 3) / std::pow(m2, 1.5);
    }
    case PostFunction::Kurtosis: {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        if (*mn == *mx) return 0.0;
        const double mean = vec_mean(v);
        const double m2 = central_moment(v, mean, 2);
        if (m2 <= 0.0) return 0.0;
        return central_moment(v, mean, 4) / (m2 * m2) - 3.0;
    }
    case PostFunction::Sum: return vec_sum(v);
    case PostFunction::Count: return double(v.size());
    }
    throw UsageError("unknown post-function id");
}

namespace {
struct PfName {
    PostFunction pf;
    std::string_view name;
};
constexpr PfName kPfNames[] = {
    {PostFunction::Max, "max"},           {PostFunction::Min, "min"},
    {PostFunction::Mean, "mean"},         {PostFunction::Sd, "sd"},
    {PostFunction::Variance, "variance"}, {PostFunction::Median, "median"},
    {PostFunction::Mode, "mode"},         {PostFunction::Entropy, "entropy"},
    {PostFunction::Gini, "gini"},         {PostFunction::Skewness, "skewness"},
    {PostFunction::Kurtosis, "kurtosis"}, {PostFunction::Sum, "sum"},
    {PostFunction::Count, "count"},
};
} // namespace

PostFunction post_function_from_name(std::string_view name) {
    for (const auto& e : kPfNames)
        if (e.name == name) return e.pf;
    throw UsageError("unknown post-function: " + std::string(name));
}

std::string_view post_function_name(PostFunction pf) {
    for (const auto& e : kPfNames)
        if (e.pf == pf) return e.name;
    throw UsageError("unknown post-function id");
}

const std::vector<PostFunction>& rm_post_functions() {
    static const std::vector<PostFunction> pfs = {
        PostFunction::Max,     PostFunction::Min,  PostFunction::Mean,
        PostFunction::Sd,      PostFunction::Median, PostFunction::Mode,
        PostFunction::Entropy, PostFunction::Gini, PostFunction::Skewness,
        PostFunction::Kurtosis,
    };
    return pfs;
}

const std::vector<PostFunction>& graph_post_functions() {
    static const std::vector<PostFunction> pfs = {
        PostFunction::Mean,
        PostFunction::Variance,
        PostFunction::Skewness,
        PostFunction::Entropy,
    };
    return pfs;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) return 0.0;
    const double ma = vec_mean(a), mb = vec_mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> fractional_ranks(std::span<const double> values, bool higher_better) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return higher_better ? values[i] > values[j] : values[i] < values[j];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = 0.5 * double(i + 1 + j); // mean of positions i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

} // namespace cfml
