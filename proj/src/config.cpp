#include "cfml/config.hpp"

#include <filesystem>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cfml/errors.hpp"
#include "cfml/io_util.hpp"

namespace cfml {

using nlohmann::json;

namespace {

std::string path_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

BaselearnerConfig parse_baselearner(const json& j) {
    BaselearnerConfig cfg;
    if (!j.contains("algorithm")) throw ValidationError("baselearner entry missing 'algorithm'");
    cfg.algorithm = j.at("algorithm").get<std::string>();
    cfg.task = algorithm_task(cfg.algorithm);
    cfg.factors = j.value("factors", cfg.factors);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.regularization = j.value("regularization", cfg.regularization);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.bias_damping = j.value("bias_damping", cfg.bias_damping);
    return cfg;
}

HyperGrid parse_grid(MetalearnerKind kind, const json& j) {
    // cartesian product over the lists present; absent keys keep defaults
    std::vector<int> ks = j.value("k", std::vector<int>{});
    std::vector<int> depths = j.value("max_depth", std::vector<int>{});
    std::vector<int> trees = j.value("trees", std::vector<int>{});
    if (ks.empty() && depths.empty() && trees.empty()) return default_grid(kind);
    if (ks.empty()) ks = {MetalearnerParams{}.k};
    if (depths.empty()) depths = {MetalearnerParams{}.max_depth};
    if (trees.empty()) trees = {MetalearnerParams{}.trees};
    HyperGrid grid;
    for (int k : ks)
        for (int d : depths)
            for (int t : trees) {
                MetalearnerParams p;
                p.k = k;
                p.max_depth = d;
                p.trees = t;
                grid.combos.push_back(p);
            }
    return grid;
}

} // namespace

ExperimentConfig parse_config_json(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }

    ExperimentConfig cfg;
    cfg.source_path = origin;
    cfg.source_checksum = text_checksum(json_text);
    try {
        if (j.contains("corpus")) {
            for (const auto& entry : j.at("corpus")) {
                CorpusEntry ce;
                ce.path = entry.at("path").get<std::string>();
                ce.format = rating_format_from_name(entry.value("format", "csv-triples"));
                ce.id = entry.value("id", path_stem(ce.path));
                cfg.corpus.push_back(std::move(ce));
            }
        }
        if (j.contains("task")) cfg.task = task_from_name(j.at("task").get<std::string>());
        if (j.contains("baselearners"))
            for (const auto& entry : j.at("baselearners"))
                cfg.baselearners.push_back(parse_baselearner(entry));
        if (j.contains("measures")) {
            cfg.measures.clear();
            for (const auto& m : j.at("measures"))
                cfg.measures.push_back(measure_from_name(m.get<std::string>()));
        } else {
            cfg.measures = task_measures(cfg.task);
        }
        if (j.contains("metafeatures")) {
            cfg.metafeature_sets.clear();
            for (const auto& s : j.at("metafeatures"))
                cfg.metafeature_sets.push_back(provenance_from_name(s.get<std::string>()));
        }
        cfg.cfs_threshold = j.value("cfs_threshold", cfg.cfs_threshold);
        if (j.contains("metalearners")) {
            for (const auto& entry : j.at("metalearners")) {
                MetalearnerSpec spec;
                spec.kind = metalearner_from_name(entry.at("kind").get<std::string>());
                spec.grid = entry.contains("grid") ? parse_grid(spec.kind, entry.at("grid"))
                                                   : default_grid(spec.kind);
                cfg.metalearners.push_back(std::move(spec));
            }
        } else {
            for (MetalearnerKind kind : {MetalearnerKind::AVG, MetalearnerKind::KNN,
                                         MetalearnerKind::RT, MetalearnerKind::RF})
                cfg.metalearners.push_back({kind, default_grid(kind)});
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.folds = j.value("folds", cfg.folds);
        cfg.jobs = j.value("jobs", cfg.jobs);
        cfg.pairwise_cap = j.value("pairwise_cap", cfg.pairwise_cap);
        if (j.contains("landmarkers")) {
            const auto& lm = j.at("landmarkers");
            cfg.landmarkers.sample_rate = lm.value("sample_rate", cfg.landmarkers.sample_rate);
            cfg.landmarkers.holdout = lm.value("holdout", cfg.landmarkers.holdout);
            if (lm.contains("baselearners"))
                for (const auto& entry : lm.at("baselearners"))
                    cfg.landmarkers.baselearners.push_back(parse_baselearner(entry));
        }
        cfg.output = j.value("output", cfg.output);
        cfg.importance_top_n = j.value("importance_top_n", cfg.importance_top_n);
        cfg.emit_svg = j.value("emit_svg", cfg.emit_svg);
        cfg.alignment_flag_threshold =
            j.value("alignment_flag_threshold", cfg.alignment_flag_threshold);
        cfg.cd_alpha = j.value("cd_alpha", cfg.cd_alpha);
    } catch (const json::exception& e) {
        throw ValidationError(origin + ": " + e.what());
    }

    // AVG is the baseline of every scores report
    const bool has_avg = std::any_of(cfg.metalearners.begin(), cfg.metalearners.end(),
                                     [](const auto& s) { return s.kind == MetalearnerKind::AVG; });
    if (!has_avg)
        cfg.metalearners.insert(cfg.metalearners.begin(),
                                {MetalearnerKind::AVG, default_grid(MetalearnerKind::AVG)});
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config_json(read_text_file(path), path);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.corpus.empty()) throw ValidationError("config: corpus is empty");
    std::unordered_set<std::string> ids;
    for (const auto& entry : cfg.corpus) {
        if (!std::filesystem::exists(entry.path))
            throw ValidationError("config: corpus path does not exist: " + entry.path);
        if (!ids.insert(entry.id).second)
            throw ValidationError("config: duplicate dataset id: " + entry.id);
        if (entry.id.find(',') != std::string::npos)
            throw ValidationError("config: dataset id may not contain a comma: " + entry.id);
    }
    if (cfg.baselearners.empty()) throw ValidationError("config: no baselearners");
    for (const auto& b : cfg.baselearners)
        if (b.task != cfg.task)
            throw ValidationError("config: baselearner " + b.algorithm + " does not match task " +
                                  task_name(cfg.task));
    if (cfg.measures.empty()) throw ValidationError("config: no measures");
    for (Measure m : cfg.measures) {
        const auto& allowed = task_measures(cfg.task);
        if (std::find(allowed.begin(), allowed.end(), m) == allowed.end())
            throw ValidationError("config: measure " + measure_name(m) + " does not match task " +
                                  task_name(cfg.task));
    }
    if (!(cfg.cfs_threshold > 0.0 && cfg.cfs_threshold <= 1.0))
        throw ValidationError("config: cfs_threshold must lie in (0,1]");
    if (cfg.folds < 2) throw ValidationError("config: folds must be >= 2");
    if (cfg.jobs < 1) throw ValidationError("config: jobs must be >= 1");
    if (cfg.metalearners.empty()) throw ValidationError("config: no metalearners");
    const bool has_cm = std::any_of(cfg.metafeature_sets.begin(), cfg.metafeature_sets.end(),
                                    [](Provenance p) { return p == Provenance::CM; });
    if (has_cm) {
        for (Provenance need : {Provenance::RM, Provenance::SL, Provenance::GR})
            if (std::find(cfg.metafeature_sets.begin(), cfg.metafeature_sets.end(), need) ==
                cfg.metafeature_sets.end())
                throw ValidationError("config: CM requires RM, SL and GR to be selected");
    }
}

std::string default_config_json(const std::vector<std::string>& dataset_paths, Task task,
                                const std::string& output_dir, std::uint64_t seed) {
    json corpus = json::array();
    for (const auto& p : dataset_paths) corpus.push_back({{"path", p}, {"format", "csv-triples"}});
    json learners = json::array();
    if (task == Task::RatingPrediction) {
        for (const char* a : {"GlobalAverage", "UserItemBaseline", "MF", "BiasedMF"})
            learners.push_back({{"algorithm", a}});
    } else {
        for (const char* a : {"MostPopular", "BPRMF", "WBPRMF"})
            learners.push_back({{"algorithm", a}});
    }
    json measures = json::array();
    for (Measure m : task_measures(task)) measures.push_back(measure_name(m));
    const json j = {
        {"corpus", corpus},
        {"task", task_name(task)},
        {"baselearners", learners},
        {"measures", measures},
        {"metafeatures", {"RM", "SL", "GR", "CM"}},
        {"cfs_threshold", 0.7},
        {"metalearners",
         {{{"kind", "AVG"}},
          {{"kind", "KNN"}},
          {{"kind", "RT"}},
          {{"kind", "RF"}}}},
        {"seed", seed},
        {"folds", 10},
        {"jobs", 1},
        {"pairwise_cap", 512},
        {"landmarkers", {{"sample_rate", 0.1}, {"holdout", 0.2}}},
        {"output", output_dir},
        {"importance_top_n", 10},
        {"emit_svg", false},
    };
    return j.dump(2) + "\n";
}

} // namespace cfml
