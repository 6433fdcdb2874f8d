#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfml/baselevel.hpp"
#include "cfml/metafeatures.hpp"
#include "cfml/metalearn.hpp"

namespace cfml {

struct CorpusEntry {
    std::string path;
    RatingFormat format = RatingFormat::CsvTriples;
    std::string id; // defaults to the path stem
};

struct MetalearnerSpec {
    MetalearnerKind kind = MetalearnerKind::AVG;
    HyperGrid grid; // empty combos fall back to default_grid(kind)
};

/// Declarative experiment description, loaded from a single JSON document.
/// CLI flags (--seed, --out, --jobs) override the corresponding keys.
struct ExperimentConfig {
    std::vector<CorpusEntry> corpus;
    Task task = Task::RatingPrediction;
    std::vector<BaselearnerConfig> baselearners;
    std::vector<Measure> measures;
    std::vector<Provenance> metafeature_sets = {Provenance::RM, Provenance::SL, Provenance::GR,
                                                Provenance::CM};
    double cfs_threshold = 0.7;
    std::vector<MetalearnerSpec> metalearners;
    std::uint64_t seed = 42;
    int folds = 10;
    int jobs = 1;
    int pairwise_cap = 512;
    LandmarkerConfig landmarkers;
    std::string output = "out";
    int importance_top_n = 10;
    bool emit_svg = false;
    double alignment_flag_threshold = 0.8;
    double cd_alpha = 0.05;

    std::string source_path;     // where the config was loaded from
    std::string source_checksum; // recorded in run manifests
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& json_text, const std::string& origin);

// Measure/task compatibility, existing corpus paths, unique ids, sane
// thresholds. Throws ValidationError.
void validate_config(const ExperimentConfig& cfg);

// The config written by `cfml synth --config-out`.
std::string default_config_json(const std::vector<std::string>& dataset_paths, Task task,
                                const std::string& output_dir, std::uint64_t seed);

} // namespace cfml
