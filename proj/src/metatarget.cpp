#include "cfml/metatarget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfml/errors.hpp"
#include "cfml/io_util.hpp"
#include "cfml/metalearn.hpp"
#include "cfml/stats.hpp"

namespace cfml {

Ranking individual_ranking(const std::vector<std::string>& algorithms,
                           const std::vector<double>& performances, bool higher_better) {
    if (algorithms.empty() || algorithms.size() != performances.size())
        throw UsageError("individual_ranking: empty or misaligned inputs");
    for (double v : performances)
        if (!std::isfinite(v)) throw ValidationError("individual_ranking: non-finite performance");
    Ranking r;
    r.algorithms = algorithms;
    r.ranks = fractional_ranks(performances, higher_better);
    return r;
}

std::vector<int> skyline_frontiers(const DatasetInterestSpace& space) {
    const std::size_t n = space.points.size();
    if (n == 0) throw UsageError("skyline_frontiers: no algorithms");
    const std::size_t m = space.higher_better.size();
    if (m == 0) throw UsageError("skyline_frontiers: no measures");

    // oriented copies: larger is always better
    std::vector<std::vector<double>> pts(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        if (space.points[i].size() != m)
            throw UsageError("skyline_frontiers: ragged point matrix");
        for (std::size_t j = 0; j < m; ++j)
            pts[i][j] = space.higher_better[j] ? space.points[i][j] : -space.points[i][j];
    }

    auto dominates = [&](std::size_t a, std::size_t b) {
        bool strict = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (pts[a][j] < pts[b][j]) return false;
            if (pts[a][j] > pts[b][j]) strict = true;
        }
        return strict;
    };

    std::vector<int> frontier(n, 0);
    std::vector<std::size_t> remaining(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
    int level = 0;
    while (!remaining.empty()) {
        ++level;
        std::vector<std::size_t> layer, rest;
        for (std::size_t a : remaining) {
            bool dominated = false;
            for (std::size_t b : remaining) {
                if (a != b && dominates(b, a)) {
                    dominated = true;
                    break;
                }
            }
            (dominated ? rest : layer).push_back(a);
        }
        for (std::size_t a : layer) frontier[a] = level;
        remaining.swap(rest);
    }
    return frontier;
}

DatasetInterestSpace make_interest_space(const PerformanceTable& table,
                                         const std::string& dataset_id,
                                         const std::vector<Measure>& measures) {
    DatasetInterestSpace space;
    space.dataset_id = dataset_id;
    space.algorithms = table.algorithms;
    for (Measure m : measures) space.higher_better.push_back(higher_is_better(m));
    for (const auto& alg : table.algorithms) {
        std::vector<double> point;
        point.reserve(measures.size());
        for (Measure m : measures) point.push_back(table.value(dataset_id, alg, m));
        space.points.push_back(std::move(point));
    }
    return space;
}

Ranking multicriteria_ranking(const PerformanceTable& table, const std::string& dataset_id,
                              const std::vector<Measure>& measures) {
    const DatasetInterestSpace space = make_interest_space(table, dataset_id, measures);
    const std::vector<int> frontier = skyline_frontiers(space);
    Ranking r;
    r.algorithms = space.algorithms;
    r.ranks.assign(frontier.begin(), frontier.end());
    return r;
}

double alignment(const Ranking& individual, const Ranking& multicriteria) {
    if (individual.algorithms.size() < 2)
        throw DataError("alignment: undefined correlation for fewer than 2 algorithms");
    return kendall_tau(individual, multicriteria).tau;
}

std::vector<AlignmentRow> alignment_report(const PerformanceTable& table,
                                           const std::vector<Measure>& measures) {
    std::vector<AlignmentRow> rows;
    for (const auto& dataset : table.dataset_ids) {
        const Ranking multi = multicriteria_ranking(table, dataset, measures);
        for (Measure m : measures) {
            std::vector<double> perfs;
            perfs.reserve(table.algorithms.size());
            for (const auto& alg : table.algorithms) perfs.push_back(table.value(dataset, alg, m));
            const Ranking indiv =
                individual_ranking(table.algorithms, perfs, higher_is_better(m));
            rows.push_back({dataset, m, alignment(indiv, multi)});
        }
    }
    return rows;
}

void save_rankings_csv(const std::vector<std::pair<std::string, Ranking>>& rankings,
                       const std::string& path) {
    std::ostringstream out;
    out << "dataset,algorithm,rank\n";
    for (const auto& [dataset, ranking] : rankings)
        for (std::size_t a = 0; a < ranking.algorithms.size(); ++a)
            out << dataset << ',' << ranking.algorithms[a] << ','
                << format_double(ranking.ranks[a], 17) << '\n';
    atomic_write_text(path, out.str());
}

std::vector<std::pair<std::string, Ranking>> load_rankings_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "dataset,algorithm,rank")
        throw ParseError(path + ": expected header dataset,algorithm,rank");

    std::vector<std::pair<std::string, Ranking>> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line, ',');
        if (fields.size() != 3)
            throw ParseError(path + " line " + std::to_string(line_no) + ": expected 3 fields");
        if (out.empty() || out.back().first != fields[0]) out.push_back({fields[0], {}});
        out.back().second.algorithms.push_back(fields[1]);
        out.back().second.ranks.push_back(std::stod(fields[2]));
    }
    return out;
}

} // namespace cfml
