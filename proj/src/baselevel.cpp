#include "cfml/baselevel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cfml/errors.hpp"
#include "cfml/log.hpp"
#include "cfml/rng.hpp"

namespace cfml {

bool higher_is_better(Measure m) { return m == Measure::NDCG || m == Measure::AUC; }

Measure measure_from_name(const std::string& name) {
    if (name == "NDCG") return Measure::NDCG;
    if (name == "AUC") return Measure::AUC;
    if (name == "RMSE") return Measure::RMSE;
    if (name == "NMAE") return Measure::NMAE;
    throw UsageError("unknown measure: " + name);
}

std::string measure_name(Measure m) {
    switch (m) {
    case Measure::NDCG: return "NDCG";
    case Measure::AUC: return "AUC";
    case Measure::RMSE: return "RMSE";
    case Measure::NMAE: return "NMAE";
    }
    throw UsageError("unknown measure id");
}

Task task_from_name(const std::string& name) {
    if (name == "item-recommendation") return Task::ItemRecommendation;
    if (name == "rating-prediction") return Task::RatingPrediction;
    throw UsageError("unknown task: " + name);
}

std::string task_name(Task t) {
    return t == Task::ItemRecommendation ? "item-recommendation" : "rating-prediction";
}

const std::vector<Measure>& task_measures(Task t) {
    static const std::vector<Measure> ir = {Measure::NDCG, Measure::AUC};
    static const std::vector<Measure> rp = {Measure::NMAE, Measure::RMSE};
    return t == Task::ItemRecommendation ? ir : rp;
}

Task algorithm_task(const std::string& algorithm) {
    if (algorithm == "GlobalAverage" || algorithm == "UserItemBaseline" || algorithm == "MF" ||
        algorithm == "BiasedMF")
        return Task::RatingPrediction;
    if (algorithm == "MostPopular" || algorithm == "BPRMF" || algorithm == "WBPRMF")
        return Task::ItemRecommendation;
    throw UsageError("unknown baselearner: " + algorithm);
}

namespace {

double clamp_to_scale(double v, const RatingScale& s) {
    return std::min(std::max(v, s.min_rating), s.max_rating);
}

double global_mean(const RatingDataset& ds) {
    double acc = 0.0;
    for (const auto& r : ds.ratings()) acc += r.value;
    return acc / double(ds.nratings());
}

// ---- rating prediction models ----

class GlobalAverageModel final : public RatingModel {
public:
    GlobalAverageModel(double mu, RatingScale scale) : mu_(mu), scale_(scale) {}
    double predict(int, int) const override { return clamp_to_scale(mu_, scale_); }

private:
    double mu_;
    RatingScale scale_;
};

class UserItemBaselineModel final : public RatingModel {
public:
    UserItemBaselineModel(const RatingDataset& train, double damping) : scale_(train.scale()) {
        mu_ = global_mean(train);
        user_bias_.assign(train.nusers(), 0.0);
        item_bias_.assign(train.nitems(), 0.0);
        std::vector<int> user_count(train.nusers(), 0), item_count(train.nitems(), 0);
        for (const auto& r : train.ratings()) {
            user_bias_[std::size_t(r.user)] += r.value - mu_;
            user_count[std::size_t(r.user)]++;
        }
        for (std::size_t u = 0; u < user_bias_.size(); ++u) {
            const double denom = damping + double(user_count[u]);
            user_bias_[u] = denom > 0.0 ? user_bias_[u] / denom : 0.0;
        }
        for (const auto& r : train.ratings()) {
            item_bias_[std::size_t(r.item)] += r.value - mu_ - user_bias_[std::size_t(r.user)];
            item_count[std::size_t(r.item)]++;
        }
        for (std::size_t i = 0; i < item_bias_.size(); ++i) {
            const double denom = damping + double(item_count[i]);
            item_bias_[i] = denom > 0.0 ? item_bias_[i] / denom : 0.0;
        }
    }

    double predict(int user, int item) const override {
        double v = mu_;
        if (user >= 0 && std::size_t(user) < user_bias_.size()) v += user_bias_[std::size_t(user)];
        if (item >= 0 && std::size_t(item) < item_bias_.size()) v += item_bias_[std::size_t(item)];
        return clamp_to_scale(v, scale_);
    }

private:
    double mu_ = 0.0;
    std::vector<double> user_bias_, item_bias_;
    RatingScale scale_;
};

struct FactorMatrix {
    int factors = 0;
    std::vector<double> data; // row-major

    void init(std::size_t rows, int k, Rng& rng, double sd) {
        factors = k;
        data.resize(rows * std::size_t(k));
        for (double& x : data) x = sd * rng.normal();
    }
    double* row(int r) { return data.data() + std::size_t(r) * std::size_t(factors); }
    const double* row(int r) const { return data.data() + std::size_t(r) * std::size_t(factors); }
};

double dot(const double* a, const double* b, int k) {
    double acc = 0.0;
    for (int f = 0; f < k; ++f) acc += a[f] * b[f];
    return acc;
}

class MatrixFactorizationModel final : public RatingModel {
public:
    MatrixFactorizationModel(const BaselearnerConfig& cfg, const RatingDataset& train, bool biased)
        : biased_(biased), scale_(train.scale()) {
        mu_ = global_mean(train);
        Rng rng(mix_seed(cfg.seed, {hash64(biased ? "BiasedMF" : "MF")}));
        user_factors_.init(train.nusers(), cfg.factors, rng, 0.1);
        item_factors_.init(train.nitems(), cfg.factors, rng, 0.1);
        user_bias_.assign(train.nusers(), 0.0);
        item_bias_.assign(train.nitems(), 0.0);
        user_seen_.assign(train.nusers(), 0);
        item_seen_.assign(train.nitems(), 0);
        for (const auto& r : train.ratings()) {
            user_seen_[std::size_t(r.user)] = 1;
            item_seen_[std::size_t(r.item)] = 1;
        }

        const int k = cfg.factors;
        const double lr = cfg.learning_rate, reg = cfg.regularization;
        std::vector<int> order(train.nratings());
        std::iota(order.begin(), order.end(), 0);
        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            rng.shuffle(order);
            for (int idx : order) {
                const auto& r = train.ratings()[std::size_t(idx)];
                double* p = user_factors_.row(r.user);
                double* q = item_factors_.row(r.item);
                double pred = dot(p, q, k);
                if (biased_) pred += mu_ + user_bias_[std::size_t(r.user)] + item_bias_[std::size_t(r.item)];
                const double err = r.value - pred;
                if (biased_) {
                    user_bias_[std::size_t(r.user)] += lr * (err - reg * user_bias_[std::size_t(r.user)]);
                    item_bias_[std::size_t(r.item)] += lr * (err - reg * item_bias_[std::size_t(r.item)]);
                }
                for (int f = 0; f < k; ++f) {
                    const double pf = p[f];
                    p[f] += lr * (err * q[f] - reg * pf);
                    q[f] += lr * (err * pf - reg * q[f]);
                }
            }
        }
    }

    double predict(int user, int item) const override {
        const bool ku = user >= 0 && std::size_t(user) < user_seen_.size() && user_seen_[std::size_t(user)];
        const bool ki = item >= 0 && std::size_t(item) < item_seen_.size() && item_seen_[std::size_t(item)];
        double v;
        if (biased_) {
            v = mu_;
            if (ku) v += user_bias_[std::size_t(user)];
            if (ki) v += item_bias_[std::size_t(item)];
            if (ku && ki)
                v += dot(user_factors_.row(user), item_factors_.row(item), user_factors_.factors);
        } else {
            v = (ku && ki) ? dot(user_factors_.row(user), item_factors_.row(item), user_factors_.factors)
                           : mu_;
        }
        return clamp_to_scale(v, scale_);
    }

private:
    bool biased_;
    double mu_ = 0.0;
    FactorMatrix user_factors_, item_factors_;
    std::vector<double> user_bias_, item_bias_;
    std::vector<char> user_seen_, item_seen_;
    RatingScale scale_;
};

// ---- item recommendation models ----

class MostPopularModel final : public ItemrecModel {
public:
    explicit MostPopularModel(const RatingDataset& train) {
        counts_.assign(train.nitems(), 0.0);
        for (const auto& r : train.ratings()) counts_[std::size_t(r.item)] += 1.0;
    }
    double score(int, int item) const override {
        if (item < 0 || std::size_t(item) >= counts_.size()) return 0.0;
        return counts_[std::size_t(item)];
    }

private:
    std::vector<double> counts_;
};

class BprmfModel final : public ItemrecModel {
public:
    BprmfModel(const BaselearnerConfig& cfg, const RatingDataset& train, bool weighted)
        : weighted_(weighted) {
        const std::size_t n_users = train.nusers(), n_items = train.nitems();
        Rng rng(mix_seed(cfg.seed, {hash64(weighted ? "WBPRMF" : "BPRMF")}));
        user_factors_.init(n_users, cfg.factors, rng, 0.1);
        item_factors_.init(n_items, cfg.factors, rng, 0.1);

        // positives per user, sorted for O(log d) membership tests
        std::vector<std::vector<int>> positives(n_users);
        for (const auto& r : train.ratings()) positives[std::size_t(r.user)].push_back(r.item);
        for (auto& v : positives) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        std::vector<int> trainable_users;
        for (std::size_t u = 0; u < n_users; ++u)
            if (!positives[u].empty() && positives[u].size() < n_items)
                trainable_users.push_back(int(u));
        if (trainable_users.empty()) return; // nothing rankable to learn from

        const auto& triples = train.ratings();
        const int k = cfg.factors;
        const double lr = cfg.learning_rate, reg = cfg.regularization;
        const std::size_t draws_per_epoch = train.nratings();

        auto is_positive = [&](int u, int i) {
            const auto& p = positives[std::size_t(u)];
            return std::binary_search(p.begin(), p.end(), i);
        };

        for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (std::size_t d = 0; d < draws_per_epoch; ++d) {
                int u, pos;
                if (weighted_) {
                    // triple-uniform draw: users ~ activity, positives ~ frequency
                    const auto& t = triples[std::size_t(rng.below(triples.size()))];
                    u = t.user;
                    pos = t.item;
                    if (positives[std::size_t(u)].size() >= n_items) continue;
                } else {
                    u = trainable_users[std::size_t(rng.below(trainable_users.size()))];
                    const auto& p = positives[std::size_t(u)];
                    pos = p[std::size_t(rng.below(p.size()))];
                }
                int neg = -1;
                for (int tries = 0; tries < 100; ++tries) {
                    int candidate;
                    if (weighted_) {
                        // item of a random triple: negatives ~ popularity
                        candidate = triples[std::size_t(rng.below(triples.size()))].item;
                    } else {
                        candidate = int(rng.below(n_items));
                    }
                    if (!is_positive(u, candidate)) {
                        neg = candidate;
                        break;
                    }
                }
                if (neg < 0) continue;

                double* pu = user_factors_.row(u);
                double* qi = item_factors_.row(pos);
                double* qj = item_factors_.row(neg);
                const double x = dot(pu, qi, k) - dot(pu, qj, k);
                const double sig = 1.0 / (1.0 + std::exp(x));
                for (int f = 0; f < k; ++f) {
                    const double puf = pu[f];
                    pu[f] += lr * (sig * (qi[f] - qj[f]) - reg * puf);
                    qi[f] += lr * (sig * puf - reg * qi[f]);
                    qj[f] += lr * (-sig * puf - reg * qj[f]);
                }
            }
        }
    }

    double score(int user, int item) const override {
        if (user < 0 || item < 0) return 0.0;
        return dot(user_factors_.row(user), item_factors_.row(item), user_factors_.factors);
    }

private:
    bool weighted_;
    FactorMatrix user_factors_, item_factors_;
};

} // namespace

std::unique_ptr<RatingModel> train_rating_model(const BaselearnerConfig& cfg,
                                                const RatingDataset& train) {
    if (cfg.task != Task::RatingPrediction)
        throw UsageError("train_rating_model requires a rating-prediction config");
    if (train.empty()) throw EvalError("training error: empty training set");
    if (cfg.algorithm == "GlobalAverage")
        return std::make_unique<GlobalAverageModel>(global_mean(train), train.scale());
    if (cfg.algorithm == "UserItemBaseline")
        return std::make_unique<UserItemBaselineModel>(train, cfg.bias_damping);
    if (cfg.algorithm == "MF")
        return std::make_unique<MatrixFactorizationModel>(cfg, train, false);
    if (cfg.algorithm == "BiasedMF")
        return std::make_unique<MatrixFactorizationModel>(cfg, train, true);
    throw UsageError("unknown rating-prediction baselearner: " + cfg.algorithm);
}

std::unique_ptr<ItemrecModel> train_itemrec_model(const BaselearnerConfig& cfg,
                                                  const RatingDataset& train) {
    if (cfg.task != Task::ItemRecommendation)
        throw UsageError("train_itemrec_model requires an item-recommendation config");
    if (train.empty()) throw EvalError("training error: empty training set");
    if (cfg.algorithm == "MostPopular") return std::make_unique<MostPopularModel>(train);
    if (cfg.algorithm == "BPRMF") return std::make_unique<BprmfModel>(cfg, train, false);
    if (cfg.algorithm == "WBPRMF") return std::make_unique<BprmfModel>(cfg, train, true);
    throw UsageError("unknown item-recommendation baselearner: " + cfg.algorithm);
}

std::map<Measure, double> evaluate_rating(const RatingModel& model, const RatingDataset& test,
                                          const std::vector<Measure>& measures) {
    if (test.empty()) throw EvalError("evaluation undefined: empty test set");
    for (Measure m : measures)
        if (m != Measure::RMSE && m != Measure::NMAE)
            throw UsageError("measure " + measure_name(m) + " incompatible with rating prediction");

    double sq = 0.0, abs_err = 0.0;
    for (const auto& r : test.ratings()) {
        const double err = model.predict(r.user, r.item) - r.value;
        sq += err * err;
        abs_err += std::abs(err);
    }
    const double n = double(test.nratings());
    std::map<Measure, double> out;
    for (Measure m : measures) {
        if (m == Measure::RMSE) out[m] = std::sqrt(sq / n);
        if (m == Measure::NMAE) out[m] = (abs_err / n) / test.scale().span();
    }
    return out;
}

std::map<Measure, double> evaluate_itemrec(const ItemrecModel& model, const RatingDataset& train,
                                           const RatingDataset& test,
                                           const std::vector<Measure>& measures,
                                           const EvalOptions& opts) {
    for (Measure m : measures)
        if (m != Measure::NDCG && m != Measure::AUC)
            throw UsageError("measure " + measure_name(m) + " incompatible with item recommendation");
    if (train.nusers() != test.nusers() || train.nitems() != test.nitems())
        throw UsageError("evaluate_itemrec requires train/test over one index space");

    const std::size_t n_users = train.nusers();
    const int n_items = int(train.nitems());
    std::vector<std::vector<int>> seen(n_users), held_out(n_users);
    for (const auto& r : train.ratings()) seen[std::size_t(r.user)].push_back(r.item);
    for (const auto& r : test.ratings()) held_out[std::size_t(r.user)].push_back(r.item);
    for (auto& v : seen) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& v : held_out) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    double auc_sum = 0.0, ndcg_sum = 0.0;
    std::size_t auc_users = 0, ndcg_users = 0;

    for (std::size_t u = 0; u < n_users; ++u) {
        const auto& pos = held_out[u];
        if (pos.empty()) continue;
        const auto& tr = seen[u];

        // candidates: items the user never interacted with in train
        std::vector<int> candidates;
        candidates.reserve(std::size_t(n_items) - tr.size());
        for (int i = 0; i < n_items; ++i)
            if (!std::binary_search(tr.begin(), tr.end(), i)) candidates.push_back(i);

        for (Measure m : measures) {
            if (m == Measure::AUC) {
                std::vector<int> negatives;
                negatives.reserve(candidates.size());
                for (int i : candidates)
                    if (!std::binary_search(pos.begin(), pos.end(), i)) negatives.push_back(i);
                if (negatives.empty()) continue;
                if (opts.max_negatives > 0 && int(negatives.size()) > opts.max_negatives) {
                    Rng rng(mix_seed(opts.seed, {hash64("auc-negatives"), std::uint64_t(u)}));
                    rng.shuffle(negatives);
                    negatives.resize(std::size_t(opts.max_negatives));
                    std::sort(negatives.begin(), negatives.end());
                }
                double wins = 0.0;
                for (int p : pos) {
                    const double sp = model.score(int(u), p);
                    for (int ng : negatives) {
                        const double sn = model.score(int(u), ng);
                        if (sp > sn)
                            wins += 1.0;
                        else if (sp == sn)
                            wins += 0.5;
                    }
                }
                auc_sum += wins / (double(pos.size()) * double(negatives.size()));
                ++auc_users;
            } else { // NDCG
                std::vector<std::pair<double, int>> ranked;
                ranked.reserve(candidates.size());
                for (int i : candidates) ranked.emplace_back(-model.score(int(u), i), i);
                const std::size_t cutoff = std::min(std::size_t(opts.ndcg_cutoff), ranked.size());
                std::partial_sort(ranked.begin(), ranked.begin() + std::ptrdiff_t(cutoff),
                                  ranked.end());
                double dcg = 0.0;
                for (std::size_t k = 0; k < cutoff; ++k)
                    if (std::binary_search(pos.begin(), pos.end(), ranked[k].second))
                        dcg += 1.0 / std::log2(double(k) + 2.0);
                double idcg = 0.0;
                const std::size_t ideal = std::min(std::size_t(opts.ndcg_cutoff), pos.size());
                for (std::size_t k = 0; k < ideal; ++k) idcg += 1.0 / std::log2(double(k) + 2.0);
                if (idcg > 0.0) {
                    ndcg_sum += dcg / idcg;
                    ++ndcg_users;
                }
            }
        }
    }

    std::map<Measure, double> out;
    for (Measure m : measures) {
        if (m == Measure::AUC) {
            if (auc_users == 0) throw EvalError("evaluation undefined: no scorable user for AUC");
            out[m] = auc_sum / double(auc_users);
        } else {
            if (ndcg_users == 0) throw EvalError("evaluation undefined: no scorable user for NDCG");
            out[m] = ndcg_sum / double(ndcg_users);
        }
    }
    return out;
}

double PerformanceTable::value(const std::string& dataset, const std::string& algorithm,
                               Measure m) const {
    const int d = dataset_index(dataset);
    const auto ait = std::find(algorithms.begin(), algorithms.end(), algorithm);
    if (ait == algorithms.end()) throw AlignmentError("unknown algorithm: " + algorithm);
    const auto mit = std::find(measures.begin(), measures.end(), m);
    if (mit == measures.end()) throw AlignmentError("unknown measure: " + measure_name(m));
    return values[std::size_t(d)][std::size_t(ait - algorithms.begin())]
                 [std::size_t(mit - measures.begin())];
}

int PerformanceTable::dataset_index(const std::string& dataset) const {
    const auto it = std::find(dataset_ids.begin(), dataset_ids.end(), dataset);
    if (it == dataset_ids.end()) throw AlignmentError("unknown dataset: " + dataset);
    return int(it - dataset_ids.begin());
}

std::vector<std::vector<double>> run_dataset_experiment(const std::string& id,
                                                        const RatingDataset& ds,
                                                        const std::vector<BaselearnerConfig>& algorithms,
                                                        const std::vector<Measure>& measures,
                                                        const ExperimentOptions& opts) {
    const int folds = std::min<int>(opts.folds, int(ds.nratings()));
    const SplitPlan plan = kfold_split(ds, folds, mix_seed(opts.seed, {hash64(id), hash64("cv")}));

    std::vector<std::vector<double>> sums(algorithms.size(),
                                          std::vector<double>(measures.size(), 0.0));
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const RatingDataset train = ds.subset_keep_maps(plan.folds[f].train);
        const RatingDataset test = ds.subset_keep_maps(plan.folds[f].test);
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            BaselearnerConfig cfg = algorithms[a];
            cfg.seed = mix_seed(opts.seed, {hash64(id), std::uint64_t(f), hash64(cfg.algorithm)});
            try {
                std::map<Measure, double> result;
                if (cfg.task == Task::RatingPrediction) {
                    const auto model = train_rating_model(cfg, train);
                    result = evaluate_rating(*model, test, measures);
                } else {
                    const auto model = train_itemrec_model(cfg, train);
                    EvalOptions eopts = opts.eval;
                    eopts.seed = mix_seed(opts.seed, {hash64(id), std::uint64_t(f), hash64("eval")});
                    result = evaluate_itemrec(*model, train, test, measures, eopts);
                }
                for (std::size_t m = 0; m < measures.size(); ++m)
                    sums[a][m] += result.at(measures[m]);
            } catch (const Error& e) {
                throw EvalError("dataset " + id + " fold " + std::to_string(f) + " algorithm " +
                                cfg.algorithm + ": " + e.what());
            }
        }
    }
    for (auto& per_alg : sums)
        for (double& v : per_alg) v /= double(plan.folds.size());
    return sums;
}

PerformanceTable run_experiment(const std::vector<std::pair<std::string, RatingDataset>>& corpus,
                                const std::vector<BaselearnerConfig>& algorithms,
                                const std::vector<Measure>& measures,
                                const ExperimentOptions& opts) {
    if (corpus.empty()) throw UsageError("run_experiment: empty corpus");
    if (algorithms.empty()) throw UsageError("run_experiment: no baselearners configured");
    const Task task = algorithms.front().task;
    for (const auto& a : algorithms)
        if (a.task != task) throw UsageError("run_experiment: baselearners must share one task");
    for (Measure m : measures) {
        const auto& allowed = task_measures(task);
        if (std::find(allowed.begin(), allowed.end(), m) == allowed.end())
            throw UsageError("measure " + measure_name(m) + " incompatible with task " +
                             task_name(task));
    }

    PerformanceTable table;
    for (const auto& [id, ds] : corpus) table.dataset_ids.push_back(id);
    for (const auto& a : algorithms) table.algorithms.push_back(a.algorithm);
    table.measures = measures;
    table.values.resize(corpus.size());

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            log_info("baselevel: dataset " + corpus[d].first);
            table.values[d] =
                run_dataset_experiment(corpus[d].first, corpus[d].second, algorithms, measures, opts);
        }
    } else {
        // batches of `jobs` async tasks; results land in corpus order
        std::vector<std::future<std::vector<std::vector<double>>>> futures(corpus.size());
        for (std::size_t start = 0; start < corpus.size(); start += std::size_t(jobs)) {
            const std::size_t end = std::min(corpus.size(), start + std::size_t(jobs));
            for (std::size_t d = start; d < end; ++d)
                futures[d] = std::async(std::launch::async, [&, d] {
                    return run_dataset_experiment(corpus[d].first, corpus[d].second, algorithms,
                                                  measures, opts);
                });
            for (std::size_t d = start; d < end; ++d) table.values[d] = futures[d].get();
        }
    }
    return table;
}

void save_performance_csv(const PerformanceTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "dataset,algorithm,measure,value,orientation\n";
    char buf[64];
    for (std::size_t d = 0; d < table.dataset_ids.size(); ++d)
        for (std::size_t a = 0; a < table.algorithms.size(); ++a)
            for (std::size_t m = 0; m < table.measures.size(); ++m) {
                std::snprintf(buf, sizeof(buf), "%.17g", table.values[d][a][m]);
                out << table.dataset_ids[d] << ',' << table.algorithms[a] << ','
                    << measure_name(table.measures[m]) << ',' << buf << ','
                    << (higher_is_better(table.measures[m]) ? "higher" : "lower") << '\n';
            }
    if (!out) throw Error("write failed: " + path);
}

PerformanceTable load_performance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "dataset,algorithm,measure,value,orientation")
        throw ParseError(path + ": unexpected header '" + line + "'");

    PerformanceTable table;
    std::unordered_map<std::string, std::size_t> d_index, a_index;
    std::vector<std::tuple<std::size_t, std::size_t, Measure, double>> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string dataset, algorithm, measure, value, orientation;
        if (!std::getline(ss, dataset, ',') || !std::getline(ss, algorithm, ',') ||
            !std::getline(ss, measure, ',') || !std::getline(ss, value, ',') ||
            !std::getline(ss, orientation))
            throw ParseError(path + " line " + std::to_string(line_no) + ": expected 5 fields");
        auto [dit, dnew] = d_index.try_emplace(dataset, table.dataset_ids.size());
        if (dnew) table.dataset_ids.push_back(dataset);
        auto [ait, anew] = a_index.try_emplace(algorithm, table.algorithms.size());
        if (anew) table.algorithms.push_back(algorithm);
        const Measure m = measure_from_name(measure);
        if (std::find(table.measures.begin(), table.measures.end(), m) == table.measures.end())
            table.measures.push_back(m);
        cells.emplace_back(dit->second, ait->second, m, std::stod(value));
    }

    const double nan = std::nan("");
    table.values.assign(table.dataset_ids.size(),
                        std::vector<std::vector<double>>(
                            table.algorithms.size(),
                            std::vector<double>(table.measures.size(), nan)));
    for (const auto& [d, a, m, v] : cells) {
        const auto mit = std::find(table.measures.begin(), table.measures.end(), m);
        table.values[d][a][std::size_t(mit - table.measures.begin())] = v;
    }
    std::string missing;
    for (std::size_t d = 0; d < table.dataset_ids.size(); ++d)
        for (std::size_t a = 0; a < table.algorithms.size(); ++a)
            for (std::size_t m = 0; m < table.measures.size(); ++m)
                if (std::isnan(table.values[d][a][m]))
                    missing += " (" + table.dataset_ids[d] + "," + table.algorithms[a] + "," +
                               measure_name(table.measures[m]) + ")";
    if (!missing.empty()) throw AlignmentError("incomplete performance table; missing cells:" + missing);
    return table;
}

} // namespace cfml
