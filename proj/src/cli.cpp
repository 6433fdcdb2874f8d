#include "cfml/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfml/config.hpp"
#include "cfml/errors.hpp"
#include "cfml/io_util.hpp"
#include "cfml/log.hpp"
#include "cfml/metalearn.hpp"
#include "cfml/metatarget.hpp"
#include "cfml/report.hpp"
#include "cfml/rng.hpp"
#include "cfml/synthetic.hpp"

namespace cfml {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct LoadedCorpus {
    std::vector<std::pair<std::string, RatingDataset>> datasets;
    json input_manifest; // id -> {path, checksum}
};

LoadedCorpus load_corpus(const ExperimentConfig& cfg) {
    LoadedCorpus corpus;
    corpus.input_manifest = json::object();
    for (const auto& entry : cfg.corpus) {
        corpus.datasets.emplace_back(entry.id, load_ratings(entry.path, entry.format));
        corpus.input_manifest[entry.id] = {{"path", entry.path},
                                           {"checksum", file_checksum(entry.path)}};
    }
    return corpus;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command, const json& inputs,
                    const json& timings_ms, const std::vector<std::string>& outputs) {
    json j = {
        {"command", command},
        {"version", kVersion},
        {"seed", cfg.seed},
        {"config", {{"path", cfg.source_path}, {"checksum", cfg.source_checksum}}},
        {"inputs", inputs},
        {"timings_ms", timings_ms},
        {"outputs", outputs},
    };
    atomic_write_text((fs::path(cfg.output) / (command + "_manifest.json")).string(),
                      j.dump(2) + "\n");
}

// ---- extract ----

struct SetMemo {
    // previously extracted rows reusable under --resume
    std::vector<std::string> names;
    std::map<std::string, std::vector<double>> rows;
};

SetMemo load_memo(const fs::path& out, Provenance set) {
    SetMemo memo;
    const std::string base = (out / (provenance_name(set) + std::string(".csv"))).string();
    std::string path;
    if (fs::exists(base)) path = base;
    else if (fs::exists(base + ".partial")) path = base + ".partial";
    else return memo;
    try {
        const MetafeatureTable table = load_metafeature_csv(path, set);
        memo.names = table.names;
        for (std::size_t r = 0; r < table.dataset_ids.size(); ++r)
            memo.rows[table.dataset_ids[r]] = table.rows[r];
    } catch (const Error& e) {
        log_warn(std::string("resume: ignoring unreadable ") + path + ": " + e.what());
    }
    return memo;
}

std::string set_csv_name(Provenance set) {
    std::string name = provenance_name(set);
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    return name + ".csv";
}

int cmd_extract(const ExperimentConfig& cfg, bool resume, bool dry_run) {
    const fs::path out(cfg.output);
    const auto& sets = cfg.metafeature_sets;
    const bool want_rm = std::count(sets.begin(), sets.end(), Provenance::RM) > 0;
    const bool want_sl = std::count(sets.begin(), sets.end(), Provenance::SL) > 0;
    const bool want_gr = std::count(sets.begin(), sets.end(), Provenance::GR) > 0;
    const bool want_cm = std::count(sets.begin(), sets.end(), Provenance::CM) > 0;

    if (dry_run) {
        for (const auto& entry : cfg.corpus)
            for (Provenance set : sets)
                std::cout << "extract " << provenance_name(set) << ' ' << entry.id << '\n';
        return 0;
    }

    const LoadedCorpus corpus = load_corpus(cfg);
    fs::create_directories(out);

    SetMemo rm_memo, sl_memo, gr_memo;
    if (resume) {
        if (want_rm) rm_memo = load_memo(out, Provenance::RM);
        if (want_sl) sl_memo = load_memo(out, Provenance::SL);
        if (want_gr) gr_memo = load_memo(out, Provenance::GR);
    }

    struct PerDataset {
        std::optional<MetafeatureVector> rm, sl, gr;
        bool done = false;
        std::string error;
        double ms = 0.0;
    };
    std::vector<PerDataset> results(corpus.datasets.size());

    auto extract_one = [&](std::size_t d) {
        const auto& [id, ds] = corpus.datasets[d];
        auto& slot = results[d];
        const auto start = Clock::now();
        try {
            if (want_rm && !rm_memo.rows.count(id)) slot.rm = extract_rm(ds);
            if (want_sl && !sl_memo.rows.count(id)) {
                LandmarkerConfig lm = cfg.landmarkers;
                lm.seed = mix_seed(cfg.seed, {hash64("sl"), hash64(id)});
                lm.dataset_label = id;
                slot.sl = extract_landmarkers(ds, lm);
            }
            if (want_gr && !gr_memo.rows.count(id)) {
                GraphExtractConfig gc;
                gc.pairwise_cap = cfg.pairwise_cap;
                gc.seed = mix_seed(cfg.seed, {hash64("gr"), hash64(id)});
                slot.gr = extract_graph(ds, gc);
            }
            slot.done = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
        slot.ms = elapsed_ms(start);
    };

    const int jobs = std::max(1, cfg.jobs);
    for (std::size_t start = 0; start < results.size(); start += std::size_t(jobs)) {
        const std::size_t end = std::min(results.size(), start + std::size_t(jobs));
        std::vector<std::future<void>> batch;
        for (std::size_t d = start; d < end; ++d)
            batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                       extract_one, d));
        for (auto& f : batch) f.get();
    }

    std::string first_error;
    for (std::size_t d = 0; d < results.size(); ++d)
        if (!results[d].done && first_error.empty())
            first_error = "dataset " + corpus.datasets[d].first + ": " + results[d].error;

    auto build_table = [&](Provenance set, const SetMemo& memo,
                           std::optional<MetafeatureVector> PerDataset::*field) {
        std::vector<std::string> ids;
        std::vector<MetafeatureVector> vectors;
        for (std::size_t d = 0; d < results.size(); ++d) {
            const auto& id = corpus.datasets[d].first;
            const auto memo_it = memo.rows.find(id);
            if (memo_it != memo.rows.end()) {
                MetafeatureVector v;
                v.names = memo.names;
                v.values = memo_it->second;
                v.provenance = set;
                ids.push_back(id);
                vectors.push_back(std::move(v));
            } else if (results[d].*field) {
                ids.push_back(id);
                vectors.push_back(*(results[d].*field));
            }
        }
        return make_table(ids, vectors);
    };

    std::vector<std::string> outputs;
    const bool partial = !first_error.empty();
    const std::string suffix = partial ? ".partial" : "";
    MetafeatureTable rm_table, sl_table, gr_table;
    if (want_rm) {
        rm_table = build_table(Provenance::RM, rm_memo, &PerDataset::rm);
        rm_table.provenance = Provenance::RM;
        save_metafeature_csv(rm_table, (out / (set_csv_name(Provenance::RM) + suffix)).string());
        outputs.push_back(set_csv_name(Provenance::RM) + suffix);
    }
    if (want_sl) {
        sl_table = build_table(Provenance::SL, sl_memo, &PerDataset::sl);
        sl_table.provenance = Provenance::SL;
        save_metafeature_csv(sl_table, (out / (set_csv_name(Provenance::SL) + suffix)).string());
        outputs.push_back(set_csv_name(Provenance::SL) + suffix);
    }
    if (want_gr) {
        gr_table = build_table(Provenance::GR, gr_memo, &PerDataset::gr);
        gr_table.provenance = Provenance::GR;
        save_metafeature_csv(gr_table, (out / (set_csv_name(Provenance::GR) + suffix)).string());
        outputs.push_back(set_csv_name(Provenance::GR) + suffix);
    }
    if (partial) throw EvalError("extraction failed: " + first_error);

    if (want_cm) {
        const MetafeatureTable cm = comprehensive({rm_table, sl_table, gr_table}, cfg.cfs_threshold);
        save_metafeature_csv(cm, (out / set_csv_name(Provenance::CM)).string());
        outputs.push_back(set_csv_name(Provenance::CM));
    }

    json timings = json::object();
    for (std::size_t d = 0; d < results.size(); ++d)
        timings[corpus.datasets[d].first] = results[d].ms;
    write_manifest(cfg, "extract", corpus.input_manifest, timings, outputs);
    return 0;
}

// ---- baselevel ----

int cmd_baselevel(const ExperimentConfig& cfg, bool resume, bool dry_run) {
    const fs::path out(cfg.output);
    const fs::path final_path = out / "performance.csv";
    const fs::path partial_path = out / "performance.csv.partial";

    if (dry_run) {
        for (const auto& entry : cfg.corpus)
            for (const auto& alg : cfg.baselearners) {
                std::cout << "baselevel " << entry.id << " x " << alg.algorithm << " [";
                for (std::size_t m = 0; m < cfg.measures.size(); ++m)
                    std::cout << (m ? " " : "") << measure_name(cfg.measures[m]);
                std::cout << "]\n";
            }
        return 0;
    }

    const LoadedCorpus corpus = load_corpus(cfg);
    fs::create_directories(out);

    // resume granularity: a dataset is finished when all its cells exist
    std::map<std::string, std::vector<std::vector<double>>> done;
    if (resume) {
        for (const fs::path& p : {final_path, partial_path}) {
            if (!fs::exists(p)) continue;
            try {
                const PerformanceTable prev = load_performance_csv(p.string());
                if (prev.algorithms.size() != cfg.baselearners.size() ||
                    prev.measures != cfg.measures)
                    continue;
                bool algs_match = true;
                for (std::size_t a = 0; a < prev.algorithms.size(); ++a)
                    if (prev.algorithms[a] != cfg.baselearners[a].algorithm) algs_match = false;
                if (!algs_match) continue;
                for (std::size_t d = 0; d < prev.dataset_ids.size(); ++d)
                    done[prev.dataset_ids[d]] = prev.values[d];
            } catch (const Error& e) {
                log_warn(std::string("resume: ignoring ") + p.string() + ": " + e.what());
            }
        }
    }

    ExperimentOptions opts;
    opts.folds = cfg.folds;
    opts.seed = cfg.seed;
    opts.jobs = cfg.jobs;

    PerformanceTable table;
    for (const auto& [id, ds] : corpus.datasets) table.dataset_ids.push_back(id);
    for (const auto& a : cfg.baselearners) table.algorithms.push_back(a.algorithm);
    table.measures = cfg.measures;
    table.values.resize(corpus.datasets.size());

    json timings = json::object();
    std::string first_error;
    std::vector<std::size_t> pending;
    for (std::size_t d = 0; d < corpus.datasets.size(); ++d) {
        const auto it = done.find(corpus.datasets[d].first);
        if (it != done.end()) {
            table.values[d] = it->second;
            timings[corpus.datasets[d].first] = 0.0;
        } else {
            pending.push_back(d);
        }
    }

    const int jobs = std::max(1, cfg.jobs);
    for (std::size_t start = 0; start < pending.size() && first_error.empty();
         start += std::size_t(jobs)) {
        const std::size_t end = std::min(pending.size(), start + std::size_t(jobs));
        std::vector<std::future<std::pair<std::vector<std::vector<double>>, double>>> batch;
        for (std::size_t i = start; i < end; ++i) {
            const std::size_t d = pending[i];
            batch.push_back(std::async(
                jobs == 1 ? std::launch::deferred : std::launch::async, [&, d] {
                    const auto t0 = Clock::now();
                    auto values = run_dataset_experiment(corpus.datasets[d].first,
                                                         corpus.datasets[d].second,
                                                         cfg.baselearners, cfg.measures, opts);
                    return std::make_pair(std::move(values), elapsed_ms(t0));
                }));
        }
        for (std::size_t i = start; i < end; ++i) {
            try {
                auto [values, ms] = batch[i - start].get();
                table.values[pending[i]] = std::move(values);
                timings[corpus.datasets[pending[i]].first] = ms;
            } catch (const std::exception& e) {
                if (first_error.empty()) first_error = e.what();
            }
        }
    }

    if (!first_error.empty()) {
        // keep whatever completed; cells of unfinished datasets are dropped
        PerformanceTable partial;
        partial.algorithms = table.algorithms;
        partial.measures = table.measures;
        for (std::size_t d = 0; d < table.dataset_ids.size(); ++d) {
            if (table.values[d].empty()) continue;
            partial.dataset_ids.push_back(table.dataset_ids[d]);
            partial.values.push_back(table.values[d]);
        }
        if (!partial.dataset_ids.empty()) save_performance_csv(partial, partial_path.string());
        throw EvalError("baselevel failed: " + first_error);
    }

    save_performance_csv(table, final_path.string());
    if (fs::exists(partial_path)) fs::remove(partial_path);
    write_manifest(cfg, "baselevel", corpus.input_manifest, timings, {"performance.csv"});
    return 0;
}

// ---- metatarget ----

int cmd_metatarget(const ExperimentConfig& cfg, bool dry_run) {
    const fs::path out(cfg.output);
    const std::string perf_path = (out / "performance.csv").string();
    if (dry_run) {
        std::cout << "metatarget from " << perf_path << " over";
        for (Measure m : cfg.measures) std::cout << ' ' << measure_name(m);
        std::cout << '\n';
        return 0;
    }

    const auto t0 = Clock::now();
    const PerformanceTable table = load_performance_csv(perf_path);

    std::vector<std::pair<std::string, Ranking>> metatargets;
    for (const auto& id : table.dataset_ids)
        metatargets.emplace_back(id, multicriteria_ranking(table, id, cfg.measures));
    save_rankings_csv(metatargets, (out / "metatarget.csv").string());

    const std::vector<AlignmentRow> rows = alignment_report(table, cfg.measures);
    std::ostringstream acsv;
    acsv << "dataset,measure,correlation\n";
    for (const auto& row : rows)
        acsv << row.dataset << ',' << measure_name(row.measure) << ','
             << format_double(row.correlation, 17) << '\n';
    atomic_write_text((out / "alignment.csv").string(), acsv.str());

    // Table-3-style layout: one row per dataset whose weakest correlation
    // falls below the flag threshold
    std::ostringstream fcsv;
    fcsv << "dataset";
    for (std::size_t m = 0; m < cfg.measures.size(); ++m) fcsv << ",m" << m + 1;
    for (std::size_t m = 0; m < cfg.measures.size(); ++m) fcsv << ",corr_m" << m + 1;
    fcsv << '\n';
    for (const auto& id : table.dataset_ids) {
        std::vector<double> corrs;
        for (const auto& row : rows)
            if (row.dataset == id) corrs.push_back(row.correlation);
        const double weakest = *std::min_element(corrs.begin(), corrs.end());
        if (weakest >= cfg.alignment_flag_threshold) continue;
        fcsv << id;
        for (Measure m : cfg.measures) fcsv << ',' << measure_name(m);
        for (double c : corrs) fcsv << ',' << format_double(c, 17);
        fcsv << '\n';
    }
    atomic_write_text((out / "alignment_flagged.csv").string(), fcsv.str());

    json inputs = {{"performance", {{"path", perf_path}, {"checksum", file_checksum(perf_path)}}}};
    json timings = {{"total", elapsed_ms(t0)}};
    write_manifest(cfg, "metatarget", inputs, timings,
                   {"metatarget.csv", "alignment.csv", "alignment_flagged.csv"});
    return 0;
}

// ---- meta ----

int cmd_meta(const ExperimentConfig& cfg, bool dry_run) {
    const fs::path out(cfg.output);
    if (dry_run) {
        for (Provenance set : cfg.metafeature_sets)
            for (const auto& spec : cfg.metalearners)
                std::cout << "meta " << provenance_name(set) << " x "
                          << metalearner_name(spec.kind) << '\n';
        return 0;
    }

    const auto t0 = Clock::now();
    const std::string target_path = (out / "metatarget.csv").string();
    const std::string perf_path = (out / "performance.csv").string();
    const auto targets = load_rankings_csv(target_path);
    const PerformanceTable truth = load_performance_csv(perf_path);

    std::ostringstream scores_csv, per_dataset_csv, importance_csv, impact_csv;
    scores_csv << "meta_approach,metalearner,mean_tau,sd_tau\n";
    per_dataset_csv << "meta_approach,metalearner,dataset,tau\n";
    importance_csv << "meta_approach,rank,metafeature,avg_level\n";
    impact_csv << "meta_approach,metalearner,measure,t,value\n";

    std::vector<std::string> outputs = {"meta_scores.csv", "meta_scores_per_dataset.csv",
                                        "feature_importance.csv", "impact.csv"};
    json inputs = {
        {"metatarget", {{"path", target_path}, {"checksum", file_checksum(target_path)}}},
        {"performance", {{"path", perf_path}, {"checksum", file_checksum(perf_path)}}},
    };
    json timings = json::object();

    std::vector<std::string> approach_names;
    std::vector<std::vector<double>> approach_best_scores;

    for (Provenance set : cfg.metafeature_sets) {
        const auto set_start = Clock::now();
        const std::string set_name = provenance_name(set);
        const std::string csv_path = (out / set_csv_name(set)).string();
        const MetafeatureTable table = load_metafeature_csv(csv_path, set);
        inputs[set_name] = {{"path", csv_path}, {"checksum", file_checksum(csv_path)}};
        const MetaDataset meta = make_meta_dataset(table, targets);

        std::vector<std::string> learner_names;
        std::vector<std::vector<double>> learner_scores;
        double best_mean = -2.0;
        std::size_t best_idx = 0;

        for (const auto& spec : cfg.metalearners) {
            const HyperGrid& grid =
                spec.grid.combos.empty() ? default_grid(spec.kind) : spec.grid;
            const LoocvResult res =
                loocv(meta, spec.kind, grid,
                      mix_seed(cfg.seed, {hash64("meta"), hash64(set_name),
                                          hash64(metalearner_name(spec.kind))}));
            const std::string learner = metalearner_name(spec.kind);
            scores_csv << set_name << ',' << learner << ',' << format_double(res.mean_tau, 17)
                       << ',' << format_double(res.sd_tau, 17) << '\n';
            for (std::size_t d = 0; d < res.taus.size(); ++d)
                per_dataset_csv << set_name << ',' << learner << ','
                                << meta.features.dataset_ids[d] << ','
                                << format_double(res.taus[d], 17) << '\n';

            std::vector<std::pair<std::string, Ranking>> predicted;
            for (std::size_t d = 0; d < res.predictions.size(); ++d)
                predicted.emplace_back(meta.features.dataset_ids[d], res.predictions[d]);
            for (Measure m : cfg.measures) {
                const auto curve = baselevel_impact(predicted, truth, m);
                for (std::size_t t = 0; t < curve.size(); ++t)
                    impact_csv << set_name << ',' << learner << ',' << measure_name(m) << ','
                               << t + 1 << ',' << format_double(curve[t], 17) << '\n';
            }

            learner_names.push_back(learner);
            learner_scores.push_back(res.taus);
            if (res.mean_tau > best_mean) {
                best_mean = res.mean_tau;
                best_idx = learner_scores.size() - 1;
            }
        }

        // feature importance from an RF metamodel on the full metadataset
        MetalearnerParams rf_params;
        const LabelRankingModel rf =
            fit(MetalearnerKind::RF, meta, rf_params,
                mix_seed(cfg.seed, {hash64("importance"), hash64(set_name)}));
        const auto importance = feature_importance(rf);
        const std::size_t top_n =
            std::min<std::size_t>(std::size_t(std::max(1, cfg.importance_top_n)),
                                  importance.size());
        for (std::size_t i = 0; i < top_n; ++i)
            importance_csv << set_name << ',' << i + 1 << ',' << importance[i].name << ','
                           << format_double(importance[i].avg_level, 17) << '\n';

        // CD data over metalearners within this meta-approach
        if (learner_scores.size() >= 2 && learner_scores.front().size() >= 2) {
            const FriedmanResult fr = friedman_nemenyi(learner_scores, cfg.cd_alpha);
            std::ostringstream cd_csv;
            cd_csv << "learner,avg_rank\n";
            for (std::size_t l = 0; l < learner_names.size(); ++l)
                cd_csv << learner_names[l] << ',' << format_double(fr.avg_ranks[l], 17) << '\n';
            const std::string stem = "cd_metalearners_" + set_name;
            atomic_write_text((out / (stem + ".csv")).string(), cd_csv.str());
            atomic_write_text((out / (stem + ".cd")).string(),
                              "cd=" + format_double(fr.critical_difference, 17) + "\n");
            outputs.push_back(stem + ".csv");
            outputs.push_back(stem + ".cd");
        }

        approach_names.push_back(set_name);
        approach_best_scores.push_back(learner_scores[best_idx]);
        timings[set_name] = elapsed_ms(set_start);
    }

    // CD data across meta-approaches, each represented by its best learner
    if (approach_best_scores.size() >= 2 && approach_best_scores.front().size() >= 2) {
        const FriedmanResult fr = friedman_nemenyi(approach_best_scores, cfg.cd_alpha);
        std::ostringstream cd_csv;
        cd_csv << "learner,avg_rank\n";
        for (std::size_t a = 0; a < approach_names.size(); ++a)
            cd_csv << approach_names[a] << ',' << format_double(fr.avg_ranks[a], 17) << '\n';
        atomic_write_text((out / "cd_approaches.csv").string(), cd_csv.str());
        atomic_write_text((out / "cd_approaches.cd").string(),
                          "cd=" + format_double(fr.critical_difference, 17) + "\n");
        outputs.push_back("cd_approaches.csv");
        outputs.push_back("cd_approaches.cd");
    }

    atomic_write_text((out / "meta_scores.csv").string(), scores_csv.str());
    atomic_write_text((out / "meta_scores_per_dataset.csv").string(), per_dataset_csv.str());
    atomic_write_text((out / "feature_importance.csv").string(), importance_csv.str());
    atomic_write_text((out / "impact.csv").string(), impact_csv.str());
    if (cfg.emit_svg) render_charts(cfg);

    timings["total"] = elapsed_ms(t0);
    write_manifest(cfg, "meta", inputs, timings, outputs);
    return 0;
}

// ---- synth ----

int cmd_synth(const std::string& out_dir, int count, std::uint64_t seed, const std::string& task,
              bool write_config) {
    SyntheticCorpusConfig scfg;
    scfg.count = count;
    scfg.seed = seed;
    const auto corpus = make_synthetic_corpus(scfg);

    fs::create_directories(out_dir);
    std::vector<std::string> paths;
    for (const auto& [id, ds] : corpus) {
        const std::string path = (fs::path(out_dir) / (id + ".csv")).string();
        save_ratings(ds, path);
        paths.push_back(path);
        std::cout << id << ": " << ds.nusers() << " users, " << ds.nitems() << " items, "
                  << ds.nratings() << " ratings -> " << path << '\n';
    }
    if (write_config) {
        const std::string cfg_path = (fs::path(out_dir) / "config.json").string();
        atomic_write_text(cfg_path, default_config_json(paths, task_from_name(task),
                                                        (fs::path(out_dir) / "out").string(), seed));
        std::cout << "config -> " << cfg_path << '\n';
    }
    return 0;
}

struct CommonFlags {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
    int jobs_override = 0;
    bool resume = false;
    bool dry_run = false;
};

ExperimentConfig resolve_config(const CommonFlags& flags) {
    ExperimentConfig cfg = load_config(flags.config_path);
    if (!flags.out_override.empty()) cfg.output = flags.out_override;
    if (flags.seed_override >= 0) cfg.seed = std::uint64_t(flags.seed_override);
    if (flags.jobs_override > 0) cfg.jobs = flags.jobs_override;
    validate_config(cfg);
    return cfg;
}

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", flags.out_override, "override the output directory");
    sub->add_option("--seed", flags.seed_override, "override the experiment seed");
    sub->add_option("--jobs", flags.jobs_override, "worker pool size for dataset-level work");
    sub->add_flag("--resume", flags.resume, "reuse previously computed outputs");
    sub->add_flag("--dry-run", flags.dry_run, "print the plan without writing anything");
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"cfml: collaborative-filtering algorithm-selection workbench"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* extract = app.add_subcommand("extract", "extract metafeature tables");
    add_common_flags(extract, flags);
    CLI::App* baselevel = app.add_subcommand("baselevel", "run the baselearner CV grid");
    add_common_flags(baselevel, flags);
    CLI::App* metatarget =
        app.add_subcommand("metatarget", "build multicriteria metatargets and alignment");
    add_common_flags(metatarget, flags);
    CLI::App* meta = app.add_subcommand("meta", "train and analyse label-ranking metalearners");
    add_common_flags(meta, flags);
    CLI::App* report = app.add_subcommand("report", "write summary.md (and charts) from outputs");
    add_common_flags(report, flags);

    std::string synth_out = "data";
    std::string synth_task = "rating-prediction";
    int synth_count = 8;
    std::int64_t synth_seed = 42;
    bool synth_no_config = false;
    CLI::App* synth = app.add_subcommand("synth", "generate the bundled synthetic corpus");
    synth->add_option("--out", synth_out, "directory for the generated datasets");
    synth->add_option("--count", synth_count, "number of datasets")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--task", synth_task, "task for the emitted config")
        ->check(CLI::IsMember({"rating-prediction", "item-recommendation"}));
    synth->add_flag("--no-config", synth_no_config, "skip writing config.json");

    std::vector<std::string> argv_storage = args;
    std::vector<const char*> argv;
    argv.push_back("cfml");
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_out, synth_count, std::uint64_t(synth_seed), synth_task,
                             !synth_no_config);
        const ExperimentConfig cfg = resolve_config(flags);
        if (extract->parsed()) return cmd_extract(cfg, flags.resume, flags.dry_run);
        if (baselevel->parsed()) return cmd_baselevel(cfg, flags.resume, flags.dry_run);
        if (metatarget->parsed()) return cmd_metatarget(cfg, flags.dry_run);
        if (meta->parsed()) return cmd_meta(cfg, flags.dry_run);
        if (report->parsed()) {
            run_report(cfg);
            return 0;
        }
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace cfml
