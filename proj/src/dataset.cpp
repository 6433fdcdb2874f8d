#include "cfml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cfml/errors.hpp"
#include "cfml/rng.hpp"

namespace cfml {

namespace {

double parse_rating_value(const std::string& field, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ": bad rating value '" + field + "'");
    return value;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

} // namespace

RatingDataset RatingDataset::from_triples(
    const std::vector<std::tuple<std::string, std::string, double>>& rows,
    std::optional<RatingScale> declared) {
    RatingDataset ds;
    std::unordered_map<std::string, int> user_index;
    std::unordered_map<std::string, int> item_index;
    std::unordered_map<std::int64_t, int> pair_slot; // (u,i) -> position in ratings_

    for (const auto& [user, item, value] : rows) {
        auto [uit, unew] = user_index.try_emplace(user, int(ds.users_.size()));
        if (unew) ds.users_.push_back(user);
        auto [iit, inew] = item_index.try_emplace(item, int(ds.items_.size()));
        if (inew) ds.items_.push_back(item);
        const std::int64_t key = std::int64_t(uit->second) << 32 | std::uint32_t(iit->second);
        auto [pit, pnew] = pair_slot.try_emplace(key, int(ds.ratings_.size()));
        if (pnew)
            ds.ratings_.push_back({uit->second, iit->second, value});
        else
            ds.ratings_[std::size_t(pit->second)].value = value; // last occurrence wins
    }

    if (declared) {
        if (!(declared->min_rating < declared->max_rating))
            throw ValidationError("declared scale must satisfy min < max");
        ds.scale_ = *declared;
        for (const auto& r : ds.ratings_)
            if (r.value < ds.scale_.min_rating || r.value > ds.scale_.max_rating)
                throw ValidationError("rating " + std::to_string(r.value) + " outside declared scale");
    } else if (!ds.ratings_.empty()) {
        double mn = ds.ratings_[0].value, mx = ds.ratings_[0].value;
        for (const auto& r : ds.ratings_) {
            mn = std::min(mn, r.value);
            mx = std::max(mx, r.value);
        }
        // A constant dataset would otherwise produce a degenerate scale.
        ds.scale_ = (mn < mx) ? RatingScale{mn, mx} : RatingScale{mn, mn + 1.0};
    }
    return ds;
}

RatingDataset RatingDataset::subset_keep_maps(const std::vector<int>& rating_indices) const {
    RatingDataset out;
    out.users_ = users_;
    out.items_ = items_;
    out.scale_ = scale_;
    out.ratings_.reserve(rating_indices.size());
    for (int idx : rating_indices) {
        if (idx < 0 || std::size_t(idx) >= ratings_.size())
            throw UsageError("rating index out of range: " + std::to_string(idx));
        out.ratings_.push_back(ratings_[std::size_t(idx)]);
    }
    return out;
}

RatingFormat rating_format_from_name(const std::string& name) {
    if (name == "csv-triples") return RatingFormat::CsvTriples;
    if (name == "movielens-tab") return RatingFormat::MovielensTab;
    throw UsageError("unknown rating format: " + name);
}

std::string rating_format_name(RatingFormat format) {
    return format == RatingFormat::CsvTriples ? "csv-triples" : "movielens-tab";
}

RatingDataset load_ratings(const std::string& path, RatingFormat format,
                           std::optional<RatingScale> declared) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);

    std::vector<std::tuple<std::string, std::string, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool saw_content = false;

    if (format == RatingFormat::CsvTriples) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (!saw_content) {
                saw_content = true;
                if (line != "user,item,rating")
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": expected header 'user,item,rating', got '" + line + "'");
                continue;
            }
            auto fields = split_on(line, ',');
            if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
                throw ParseError("line " + std::to_string(line_no) + ": expected user,item,rating");
            rows.emplace_back(fields[0], fields[1], parse_rating_value(fields[2], line_no));
        }
    } else {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            saw_content = true;
            auto fields = split_on(line, '\t');
            if (fields.size() < 3 || fields.size() > 4 || fields[0].empty() || fields[1].empty())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": expected user\\titem\\trating[\\ttimestamp]");
            rows.emplace_back(fields[0], fields[1], parse_rating_value(fields[2], line_no));
        }
    }

    if (rows.empty()) throw DataError("empty dataset: " + path);
    return RatingDataset::from_triples(rows, declared);
}

void save_ratings(const RatingDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "user,item,rating\n";
    char buf[64];
    for (const auto& r : ds.ratings()) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.value);
        out << ds.users()[std::size_t(r.user)] << ',' << ds.items()[std::size_t(r.item)] << ','
            << buf << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

DatasetStats dataset_stats(const RatingDataset& ds) {
    return {ds.nusers(), ds.nitems(), ds.nratings()};
}

SplitPlan kfold_split(const RatingDataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw UsageError("kfold_split requires k >= 2");
    const int n = int(ds.nratings());
    if (k > n) throw DataError("infeasible split: k=" + std::to_string(k) + " exceeds nratings=" +
                               std::to_string(n));

    std::vector<int> order(std::size_t(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, {hash64("kfold")}));
    rng.shuffle(order);

    SplitPlan plan;
    plan.seed = seed;
    plan.folds.resize(std::size_t(k));
    const int base = n / k, extra = n % k;
    int offset = 0;
    for (int f = 0; f < k; ++f) {
        const int size = base + (f < extra ? 1 : 0);
        auto& fold = plan.folds[std::size_t(f)];
        fold.test.assign(order.begin() + offset, order.begin() + offset + size);
        std::sort(fold.test.begin(), fold.test.end());
        offset += size;
    }
    for (int f = 0; f < k; ++f) {
        auto& fold = plan.folds[std::size_t(f)];
        std::vector<bool> in_test(std::size_t(n), false);
        for (int idx : fold.test) in_test[std::size_t(idx)] = true;
        fold.train.reserve(std::size_t(n) - fold.test.size());
        for (int i = 0; i < n; ++i)
            if (!in_test[std::size_t(i)]) fold.train.push_back(i);
    }
    return plan;
}

RatingDataset sample_ratings(const RatingDataset& ds, double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate <= 1.0)) throw UsageError("sample rate must lie in (0,1]");
    const std::size_t n = ds.nratings();
    const std::size_t m = std::size_t(std::ceil(rate * double(n)));
    if (m == 0) throw DataError("empty sample");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, {hash64("sample")}));
    rng.shuffle(order);
    order.resize(m);
    std::sort(order.begin(), order.end()); // keep original triple order

    std::vector<std::tuple<std::string, std::string, double>> rows;
    rows.reserve(m);
    for (int idx : order) {
        const auto& r = ds.ratings()[std::size_t(idx)];
        rows.emplace_back(ds.users()[std::size_t(r.user)], ds.items()[std::size_t(r.item)], r.value);
    }
    return RatingDataset::from_triples(rows, ds.scale());
}

} // namespace cfml
