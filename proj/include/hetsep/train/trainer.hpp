#pragma once

#include "hetsep/diff/checkpoint.hpp"
#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/model/objective.hpp"
#include "hetsep/train/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetsep::train {

struct TrainOptions {
    // When set, train_log.tsv and checkpoint.bin are written here.
    std::optional<std::filesystem::path> out_dir;
    // Continue from a checkpoint written by an earlier run of the same config.
    std::optional<diff::CheckpointFile> resume;
};

struct TrainResult {
    std::vector<double> losses;  // total loss per executed epoch
    std::vector<model::LossBreakdown> breakdowns;
    int first_epoch = 0;
    int epochs_run = 0;
    bool early_stopped = false;
    bool diverged = false;
    std::string divergence_message;
    std::string log_tsv;  // header plus one row per (epoch, term)
    diff::CheckpointFile checkpoint;  // parameters after the last good epoch
};

// Full-graph training: forward in train mode, total loss, backward, Adam.
// Everything logged is a function of (graph, config) in deterministic mode.
TrainResult train(const graph::HeteroGraph& graph, const TrainConfig& config, const TrainOptions& options = {});

// Config stored in a checkpoint header.
TrainConfig checkpoint_config(const diff::CheckpointFile& checkpoint);

enum class EmbeddingVariant { anchor, concat_views };
EmbeddingVariant embedding_variant_from_string(const std::string& s);
std::string to_string(EmbeddingVariant v);

struct EmbeddingMatrix {
    Matrix<double> values;  // target nodes x dim
    EmbeddingVariant variant = EmbeddingVariant::anchor;
};

// Eval-mode (noise-free) forward of the checkpointed parameters.
EmbeddingMatrix export_embeddings(const diff::CheckpointFile& checkpoint, const graph::HeteroGraph& graph,
                                  EmbeddingVariant variant = EmbeddingVariant::anchor);

// "node_index<TAB>v0<TAB>v1..." one row per target node.
void write_embeddings_tsv(const std::filesystem::path& path, const EmbeddingMatrix& embeddings);
EmbeddingMatrix read_embeddings_tsv(const std::filesystem::path& path);

// Eval-mode scores, weights and synthesized graphs of every target relation,
// written as <relation>.weights.tsv and <relation>.<ho|he>.graph.tsv.
void dump_relation_weights(const diff::CheckpointFile& checkpoint, const graph::HeteroGraph& graph,
                           const std::filesystem::path& dir, const std::string& only_relation = "");

}  // namespace hetsep::train
