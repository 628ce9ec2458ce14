#pragma once

#include "hetsep/diff/matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hetsep::eval {

struct SplitSpec {
    int train_per_class = 20;
    Index val_size = 1000;
    Index test_size = 1000;
    std::uint64_t seed = 0;
};

struct Splits {
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
};

// Stratified train set of train_per_class nodes per class; val and test are
// drawn uniformly from the remainder. When the remainder holds fewer than
// val_size + test_size nodes, each gets half of it.
Splits make_splits(const std::vector<int>& labels, int num_classes, const SplitSpec& spec);

// Percentages in [0, 100].
double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred);
double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int num_classes);
// Mann-Whitney AUC of `score` against the 0/1 `positive` mask, ties at
// average rank. NaN when either side is empty.
double roc_auc(const std::vector<double>& score, const std::vector<char>& positive);
// One-vs-rest ROC AUC per class from the class probability column (ties get
// average ranks), averaged over classes that occur in `truth` and whose
// complement is non-empty.
double macro_auc(const std::vector<int>& truth, const Matrix<double>& prob);
// One pooled ROC over every (node, class) probability.
double micro_auc(const std::vector<int>& truth, const Matrix<double>& prob);

enum class AucAverage { macro, micro };

struct LogisticOptions {
    int steps = 500;
    double lr = 0.01;
    std::vector<double> l2_grid = {1e-4, 1e-3, 1e-2};
    AucAverage auc = AucAverage::macro;
};

struct ClassificationResult {
    double micro_f1 = 0;
    double macro_f1 = 0;
    double auc = 0;
    double l2 = 0;  // chosen on validation Micro-F1
};

// Multinomial logistic regression on standardised embeddings, full-batch
// Adam from zero weights.
ClassificationResult logistic_eval(const Matrix<double>& embeddings, const std::vector<int>& labels, int num_classes,
                                   const Splits& splits, const LogisticOptions& options = {});

// k-means++ seeding then Lloyd iterations until the relative inertia change
// drops below tol or max_iter is reached. Returns cluster ids.
std::vector<int> kmeans(const Matrix<double>& x, int k, std::uint64_t seed, int max_iter = 300, double tol = 1e-4);

// Arithmetic-mean normalisation.
double nmi(const std::vector<int>& a, const std::vector<int>& b);
double ari(const std::vector<int>& a, const std::vector<int>& b);

struct ClusteringResult {
    double nmi = 0;
    double ari = 0;
};

ClusteringResult kmeans_eval(const Matrix<double>& embeddings, const std::vector<int>& labels, int k, int trials,
                             std::uint64_t seed);

// Mean over nodes of the share (in percent) of the k most cosine-similar
// other nodes with the same label. Ties: smaller index first.
double sim_at_k(const Matrix<double>& embeddings, const std::vector<int>& labels, int k);

struct MetricStat {
    double mean = 0;
    double std = 0;  // population standard deviation
};

MetricStat summarize(const std::vector<double>& values);

struct MetricsReport {
    std::map<std::string, MetricStat> metrics;
    int trials = 0;
    nlohmann::json metadata = nlohmann::json::object();

    nlohmann::json to_json() const;
    std::string to_tsv() const;
};

struct EvalOptions {
    int train_per_class = 20;
    int trials = 10;
    std::uint64_t seed = 0;
    LogisticOptions logistic;
    bool clustering = true;
    bool similarity = true;
};

// Classification over `trials` splits (or the preset split, when given),
// k-means over `trials` restarts and Sim@5 / Sim@10.
MetricsReport evaluate(const Matrix<double>& embeddings, const std::vector<int>& labels, int num_classes,
                       const EvalOptions& options, const Splits* preset = nullptr);

}  // namespace hetsep::eval
