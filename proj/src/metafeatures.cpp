#include "cfml/metafeatures.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "cfml/errors.hpp"
#include "cfml/io_util.hpp"
#include "cfml/metalearn.hpp"
#include "cfml/rng.hpp"
#include "cfml/stats.hpp"

namespace cfml {

Provenance provenance_from_name(const std::string& name) {
    if (name == "RM") return Provenance::RM;
    if (name == "SL") return Provenance::SL;
    if (name == "GR") return Provenance::GR;
    if (name == "CM") return Provenance::CM;
    throw UsageError("unknown metafeature set: " + name);
}

std::string provenance_name(Provenance p) {
    switch (p) {
    case Provenance::RM: return "RM";
    case Provenance::SL: return "SL";
    case Provenance::GR: return "GR";
    case Provenance::CM: return "CM";
    }
    throw UsageError("unknown provenance id");
}

std::vector<double> MetafeatureTable::column(std::size_t idx) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[idx]);
    return out;
}

MetafeatureTable make_table(const std::vector<std::string>& dataset_ids,
                            const std::vector<MetafeatureVector>& vectors) {
    if (dataset_ids.size() != vectors.size())
        throw UsageError("make_table: ids and vectors differ in length");
    MetafeatureTable table;
    table.dataset_ids = dataset_ids;
    if (vectors.empty()) return table;
    table.names = vectors.front().names;
    table.provenance = vectors.front().provenance;
    for (const auto& v : vectors) {
        if (v.names != table.names)
            throw AlignmentError("make_table: rows disagree on the name schema");
        table.rows.push_back(v.values);
    }
    return table;
}

void save_metafeature_csv(const MetafeatureTable& table, const std::string& path) {
    std::ostringstream out;
    out << "dataset";
    for (const auto& name : table.names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << table.dataset_ids[r];
        for (double v : table.rows[r]) out << ',' << format_double(v, 10);
        out << '\n';
    }
    atomic_write_text(path, out.str());
}

MetafeatureTable load_metafeature_csv(const std::string& path, Provenance provenance) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_line(line, ',');
    if (header.empty() || header[0] != "dataset")
        throw ParseError(path + ": first column must be 'dataset'");

    MetafeatureTable table;
    table.provenance = provenance;
    table.names.assign(header.begin() + 1, header.end());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line, ',');
        if (fields.size() != header.size())
            throw ParseError(path + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields");
        table.dataset_ids.push_back(fields[0]);
        std::vector<double> row;
        row.reserve(table.names.size());
        for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(std::stod(fields[i]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

MetafeatureVector extract_rm(const RatingDataset& ds) {
    if (ds.empty()) throw DataError("extract_rm: empty dataset");

    std::vector<double> user_count(ds.nusers(), 0.0), user_sum(ds.nusers(), 0.0);
    std::vector<double> item_count(ds.nitems(), 0.0), item_sum(ds.nitems(), 0.0);
    std::vector<double> all_ratings;
    all_ratings.reserve(ds.nratings());
    for (const auto& r : ds.ratings()) {
        user_count[std::size_t(r.user)] += 1.0;
        user_sum[std::size_t(r.user)] += r.value;
        item_count[std::size_t(r.item)] += 1.0;
        item_sum[std::size_t(r.item)] += r.value;
        all_ratings.push_back(r.value);
    }
    auto mean_of = [](const std::vector<double>& sum, const std::vector<double>& count) {
        std::vector<double> out(sum.size(), 0.0);
        for (std::size_t i = 0; i < sum.size(); ++i)
            out[i] = count[i] > 0.0 ? sum[i] / count[i] : 0.0;
        return out;
    };
    const std::vector<double> user_mean = mean_of(user_sum, user_count);
    const std::vector<double> item_mean = mean_of(item_sum, item_count);

    MetafeatureVector mf;
    mf.provenance = Provenance::RM;
    auto emit_block = [&](const std::string& object, const std::string& function,
                          const std::vector<double>& values) {
        for (PostFunction pf : rm_post_functions()) {
            mf.names.push_back(object + "." + function + "." + std::string(post_function_name(pf)));
            mf.values.push_back(post_function(values, pf));
        }
    };
    emit_block("U", "count", user_count);
    emit_block("U", "mean", user_mean);
    emit_block("U", "sum", user_sum);
    emit_block("I", "count", item_count);
    emit_block("I", "mean", item_mean);
    emit_block("I", "sum", item_sum);
    emit_block("R", "ratings", all_ratings);
    mf.names.push_back("nusers");
    mf.values.push_back(double(ds.nusers()));
    mf.names.push_back("nitems");
    mf.values.push_back(double(ds.nitems()));
    mf.names.push_back("nratings");
    mf.values.push_back(double(ds.nratings()));
    return mf;
}

namespace {

double aggregate_defined(const std::vector<double>& values, const std::vector<char>& defined,
                         PostFunction pf) {
    std::vector<double> kept;
    kept.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (defined[i]) kept.push_back(values[i]);
    return post_function(kept, pf);
}

} // namespace

MetafeatureVector extract_graph(const BipartiteGraph& g, const GraphExtractConfig& cfg) {
    MetafeatureVector mf;
    mf.provenance = Provenance::GR;
    const auto& pfs = graph_post_functions();
    static const NodeSet kSets[] = {NodeSet::G, NodeSet::U, NodeSet::I};

    // graph level
    const GraphLevelFeatures gl = graph_level(g);
    mf.names = {"G.edge_density", "G.girth", "G.order", "G.size", "G.radius"};
    mf.values = {gl.edge_density, gl.girth, gl.order, gl.size, gl.radius};

    // node level: functions computed once on the full graph, then restricted
    for (NodeSet set : kSets) {
        for (NodeFunction f : all_node_functions()) {
            const ScoreVector scores = node_scores_masked(g, f, set);
            for (PostFunction pf : pfs) {
                mf.names.push_back(node_set_name(set) + "." + node_function_name(f) + "." +
                                   std::string(post_function_name(pf)));
                mf.values.push_back(aggregate_defined(scores.values, scores.defined, pf));
            }
        }
    }

    // pairwise level
    PairwiseConfig pw_cfg{cfg.pairwise_cap, cfg.seed};
    for (NodeSet set : kSets) {
        for (PairFunction f : all_pair_functions()) {
            const auto summaries = pairwise_row_summaries_all(g, set, f, pw_cfg);
            const auto& mpfs = all_matrix_post_functions();
            for (std::size_t m = 0; m < mpfs.size(); ++m) {
                for (PostFunction pf : pfs) {
                    mf.names.push_back(node_set_name(set) + ".[pairs." + pair_function_name(f) +
                                       "." + matrix_post_function_name(mpfs[m]) + "]." +
                                       std::string(post_function_name(pf)));
                    mf.values.push_back(post_function(summaries[m], pf));
                }
            }
        }
    }

    // subgraph level: node functions within each subgraph in isolation,
    // IL summary per subgraph, OL summary across subgraphs
    const struct {
        const char* name;
        NodePartition partition;
    } splits[] = {
        {"communities", communities(g, cfg.seed)},
        {"components", components(g)},
    };
    const auto& fns = all_node_functions();
    for (const auto& split : splits) {
        // il_values[f][ilpf] -> one value per subgraph
        std::vector<std::vector<std::vector<double>>> il_values(
            fns.size(), std::vector<std::vector<double>>(pfs.size()));
        for (const auto& group : split.partition.groups) {
            const BipartiteGraph sub = induced_subgraph(g, group);
            for (std::size_t fi = 0; fi < fns.size(); ++fi) {
                const ScoreVector scores = node_scores_masked(sub, fns[fi], NodeSet::G);
                for (std::size_t pi = 0; pi < pfs.size(); ++pi)
                    il_values[fi][pi].push_back(
                        aggregate_defined(scores.values, scores.defined, pfs[pi]));
            }
        }
        for (std::size_t fi = 0; fi < fns.size(); ++fi)
            for (std::size_t pi = 0; pi < pfs.size(); ++pi)
                for (PostFunction olpf : pfs) {
                    mf.names.push_back(std::string(split.name) + ".[subgraph." +
                                       node_function_name(fns[fi]) + "." +
                                       std::string(post_function_name(pfs[pi])) + "]." +
                                       std::string(post_function_name(olpf)));
                    mf.values.push_back(post_function(il_values[fi][pi], olpf));
                }
    }
    return mf;
}

MetafeatureVector extract_graph(const RatingDataset& ds, const GraphExtractConfig& cfg) {
    if (ds.empty()) throw DataError("extract_graph: empty dataset");
    return extract_graph(build_bipartite(ds), cfg);
}

std::vector<BaselearnerConfig> default_landmarker_baselearners() {
    std::vector<BaselearnerConfig> out;
    for (const char* name : {"MostPopular", "BPRMF", "WBPRMF"}) {
        BaselearnerConfig cfg;
        cfg.task = Task::ItemRecommendation;
        cfg.algorithm = name;
        out.push_back(cfg);
    }
    for (const char* name : {"GlobalAverage", "UserItemBaseline", "MF", "BiasedMF"}) {
        BaselearnerConfig cfg;
        cfg.task = Task::RatingPrediction;
        cfg.algorithm = name;
        out.push_back(cfg);
    }
    return out;
}

MetafeatureVector extract_landmarkers(const RatingDataset& ds, const LandmarkerConfig& cfg) {
    std::vector<BaselearnerConfig> learners =
        cfg.baselearners.empty() ? default_landmarker_baselearners() : cfg.baselearners;
    if (learners.empty()) throw UsageError("extract_landmarkers: no baselearners configured");

    const RatingDataset sample =
        sample_ratings(ds, cfg.sample_rate, mix_seed(cfg.seed, {hash64("sl-sample")}));
    if (sample.nratings() < cfg.min_sample_ratings)
        throw DataError("landmarker-infeasible: dataset " + cfg.dataset_label + " sample has " +
                        std::to_string(sample.nratings()) + " ratings (< " +
                        std::to_string(cfg.min_sample_ratings) + ")");

    // single seeded holdout on the sample
    std::vector<int> order(sample.nratings());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(cfg.seed, {hash64("sl-holdout")}));
    rng.shuffle(order);
    const std::size_t n_test = std::max<std::size_t>(1, std::size_t(cfg.holdout * double(order.size())));
    std::vector<int> test_idx(order.begin(), order.begin() + std::ptrdiff_t(n_test));
    std::vector<int> train_idx(order.begin() + std::ptrdiff_t(n_test), order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    const RatingDataset train = sample.subset_keep_maps(train_idx);
    const RatingDataset test = sample.subset_keep_maps(test_idx);

    MetafeatureVector mf;
    mf.provenance = Provenance::SL;
    for (const auto& learner : learners) {
        BaselearnerConfig run = learner;
        run.seed = mix_seed(cfg.seed, {hash64("sl-train"), hash64(run.algorithm)});
        const auto& measures = task_measures(run.task);
        std::map<Measure, double> result;
        if (run.task == Task::RatingPrediction) {
            const auto model = train_rating_model(run, train);
            result = evaluate_rating(*model, test, measures);
        } else {
            const auto model = train_itemrec_model(run, train);
            EvalOptions eopts = cfg.eval;
            eopts.seed = mix_seed(cfg.seed, {hash64("sl-eval"), hash64(run.algorithm)});
            result = evaluate_itemrec(*model, train, test, measures, eopts);
        }
        for (Measure m : measures) {
            mf.names.push_back(run.algorithm + "." + measure_name(m));
            mf.values.push_back(result.at(m));
        }
    }
    return mf;
}

MetafeatureTable comprehensive(const std::vector<MetafeatureTable>& tables, double threshold) {
    if (tables.empty()) throw UsageError("comprehensive: no tables given");
    const auto& ids = tables.front().dataset_ids;
    MetafeatureTable merged;
    merged.provenance = Provenance::CM;
    merged.dataset_ids = ids;
    merged.rows.assign(ids.size(), {});

    std::unordered_set<std::string> seen;
    for (const auto& table : tables) {
        if (table.dataset_ids.size() != ids.size())
            throw AlignmentError("comprehensive: tables disagree on dataset ids");
        // rows may be permuted between tables; align by id
        std::vector<std::size_t> row_of(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto it = std::find(table.dataset_ids.begin(), table.dataset_ids.end(), ids[i]);
            if (it == table.dataset_ids.end())
                throw AlignmentError("comprehensive: dataset " + ids[i] + " missing from a table");
            row_of[i] = std::size_t(it - table.dataset_ids.begin());
        }
        for (const auto& name : table.names)
            if (!seen.insert(name).second)
                throw ValidationError("comprehensive: duplicate metafeature name " + name);
        merged.names.insert(merged.names.end(), table.names.begin(), table.names.end());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto& src = table.rows[row_of[i]];
            merged.rows[i].insert(merged.rows[i].end(), src.begin(), src.end());
        }
    }

    const std::vector<std::string> kept = cfs(merged, threshold);
    std::vector<std::size_t> keep_idx;
    for (const auto& name : kept) {
        const auto it = std::find(merged.names.begin(), merged.names.end(), name);
        keep_idx.push_back(std::size_t(it - merged.names.begin()));
    }
    MetafeatureTable out;
    out.provenance = Provenance::CM;
    out.dataset_ids = merged.dataset_ids;
    out.names = kept;
    out.rows.reserve(merged.rows.size());
    for (const auto& row : merged.rows) {
        std::vector<double> selected;
        selected.reserve(keep_idx.size());
        for (std::size_t idx : keep_idx) selected.push_back(row[idx]);
        out.rows.push_back(std::move(selected));
    }
    return out;
}

} // namespace cfml
