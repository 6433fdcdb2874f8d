#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cfml/dataset.hpp"

namespace cfml {

enum class Measure { NDCG, AUC, RMSE, NMAE };

bool higher_is_better(Measure m);
Measure measure_from_name(const std::string& name);
std::string measure_name(Measure m);

enum class Task { ItemRecommendation, RatingPrediction };

Task task_from_name(const std::string& name);
std::string task_name(Task t);
const std::vector<Measure>& task_measures(Task t); // NDCG,AUC / NMAE,RMSE

struct BaselearnerConfig {
    Task task = Task::RatingPrediction;
    std::string algorithm; // GlobalAverage | UserItemBaseline | MF | BiasedMF
                           // MostPopular | BPRMF | WBPRMF
    int factors = 10;
    double learning_rate = 0.01;
    double regularization = 0.05;
    int epochs = 30;
    double bias_damping = 10.0; // ridge damping for UserItemBaseline
    std::uint64_t seed = 0;
};

// Task of an algorithm by name; throws UsageError for unknown names.
Task algorithm_task(const std::string& algorithm);

/// Rating predictor; predictions are clamped to the training scale and
/// unknown users/items fall back to the global mean plus any known bias.
class RatingModel {
public:
    virtual ~RatingModel() = default;
    virtual double predict(int user, int item) const = 0;
};

/// Item scorer; higher score means recommended earlier.
class ItemrecModel {
public:
    virtual ~ItemrecModel() = default;
    virtual double score(int user, int item) const = 0;
};

std::unique_ptr<RatingModel> train_rating_model(const BaselearnerConfig& cfg,
                                                const RatingDataset& train);
std::unique_ptr<ItemrecModel> train_itemrec_model(const BaselearnerConfig& cfg,
                                                  const RatingDataset& train);

struct EvalOptions {
    int ndcg_cutoff = 10;
    int max_negatives = 100; // per-user AUC negative sample cap
    std::uint64_t seed = 0;
};

std::map<Measure, double> evaluate_rating(const RatingModel& model, const RatingDataset& test,
                                          const std::vector<Measure>& measures);

// train supplies each user's seen items (excluded from ranking candidates);
// train and test must share one index space.
std::map<Measure, double> evaluate_itemrec(const ItemrecModel& model, const RatingDataset& train,
                                           const RatingDataset& test,
                                           const std::vector<Measure>& measures,
                                           const EvalOptions& opts = {});

/// Complete datasets x algorithms x measures grid of CV-averaged values.
struct PerformanceTable {
    std::vector<std::string> dataset_ids;
    std::vector<std::string> algorithms;
    std::vector<Measure> measures;
    std::vector<std::vector<std::vector<double>>> values; // [dataset][algorithm][measure]

    double value(const std::string& dataset, const std::string& algorithm, Measure m) const;
    int dataset_index(const std::string& dataset) const;
};

struct ExperimentOptions {
    int folds = 10;
    std::uint64_t seed = 0;
    int jobs = 1;
    EvalOptions eval;
};

PerformanceTable run_experiment(const std::vector<std::pair<std::string, RatingDataset>>& corpus,
                                const std::vector<BaselearnerConfig>& algorithms,
                                const std::vector<Measure>& measures,
                                const ExperimentOptions& opts = {});

// One dataset's CV-averaged grid, [algorithm][measure]; fold-level failures
// surface as EvalError naming the dataset, fold and algorithm.
std::vector<std::vector<double>> run_dataset_experiment(
    const std::string& id, const RatingDataset& ds,
    const std::vector<BaselearnerConfig>& algorithms, const std::vector<Measure>& measures,
    const ExperimentOptions& opts = {});

// Long-form persistence: dataset,algorithm,measure,value,orientation.
void save_performance_csv(const PerformanceTable& table, const std::string& path);
PerformanceTable load_performance_csv(const std::string& path);

} // namespace cfml
