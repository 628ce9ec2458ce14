#pragma once

#include "hetsep/eval/metrics.hpp"
#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/train/config.hpp"

#include <string>
#include <vector>

namespace hetsep::eval {

// full, no_homo, no_hete, no_rae, mean_fusion, random_single.
const std::vector<std::string>& ablation_variants();

// `base` with the variant's switch applied on top; throws on unknown names.
train::TrainConfig apply_variant(const train::TrainConfig& base, const std::string& variant);

struct AblationRow {
    std::string variant;
    MetricsReport report;
};

// Trains every variant from the same seed and evaluates its anchor embeddings.
std::vector<AblationRow> run_ablation(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                      const std::vector<std::string>& variants, const EvalOptions& eval = {});

// One row per variant: "variant" then <metric>_mean, <metric>_std columns.
std::string ablation_tsv(const std::vector<AblationRow>& rows);

struct SweepPoint {
    double rate = 0;
    MetricsReport report;
};

// For each rate: drop that share of every relation's edges (seeded by the
// config seed), retrain, and report Micro-F1 at eval.train_per_class.
std::vector<SweepPoint> robustness_sweep(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                         const std::vector<double>& rates, const EvalOptions& eval = {});

// "rate<TAB>micro_f1_mean<TAB>micro_f1_std<TAB>trials", one row per rate.
std::string sweep_tsv(const std::vector<SweepPoint>& points);

// Train then evaluate the anchor embeddings; shared by both experiments.
MetricsReport train_and_evaluate(const graph::HeteroGraph& graph, const train::TrainConfig& config,
                                 const EvalOptions& eval);

}  // namespace hetsep::eval
