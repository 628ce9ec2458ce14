#pragma once

#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/model/encoder.hpp"
#include "hetsep/model/hypergraph.hpp"
#include "hetsep/model/objective.hpp"
#include "hetsep/model/separation.hpp"
#include "hetsep/train/config.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace hetsep::train {

using diff::Tape;
using diff::Var;

// Outputs of one relation that drives a synthesized graph pair.
template <typename T>
struct RelationForward {
    Index relation = -1;  // r
    Index inverse = -1;   // r^-1
    Var<T> scores;        // over the edges of r
    Var<T> scores_inv;
    Var<T> w;
    Var<T> w_inv;
    Var<T> a_ho;
    Var<T> a_he;
    Var<T> h_ho;
    Var<T> h_he;
};

template <typename T>
struct ForwardResult {
    std::vector<Var<T>> main;  // main encoder output per type
    Var<T> anchor;             // main encoder output of the target type
    std::vector<RelationForward<T>> relations;
    std::optional<model::ObjectiveResult<T>> loss;
};

// The full pipeline over one graph. Holds the graph-derived constants and
// the parameter set; the graph must outlive the model.
template <typename T>
class Model {
public:
    Model(const graph::HeteroGraph& g, const TrainConfig& config);
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    diff::ParameterSet<T>& params() { return params_; }
    const diff::ParameterSet<T>& params() const { return params_; }
    const TrainConfig& config() const { return config_; }
    const graph::HeteroGraph& graph() const { return graph_; }

    // Train mode draws logistic noise from (seed, step, relation); eval mode
    // is noise-free. With `with_loss`, the objective is evaluated too.
    ForwardResult<T> forward(Tape<T>& tape, model::GumbelMode mode, std::uint64_t step, bool with_loss,
                             const model::PositiveCache* frozen = nullptr) const;

    const std::vector<Index>& target_relations() const { return target_relations_; }
    const PathPattern& pattern(size_t slot) const { return patterns_[slot]; }
    const model::DualOperator<T>& dual(Index relation) const;

private:
    struct RelationParams {
        std::vector<diff::Parameter<T>*> theta;
        std::vector<diff::Parameter<T>*> slope;
        model::Linear<T> edge_linear;  // replaces the hypergraph when no_rae
        model::Linear<T> score;
    };

    Var<T> edge_scores(Tape<T>& tape, const std::vector<Var<T>>& aux, Index relation) const;

    const graph::HeteroGraph& graph_;
    TrainConfig config_;
    model::EncoderOptions encoder_options_;
    std::vector<Matrix<T>> features_;
    model::EncoderGraph<T> encoder_graph_;
    std::vector<Index> target_relations_;
    std::vector<Index> scored_relations_;  // target relations and their inverses
    std::vector<std::unique_ptr<model::DualOperator<T>>> duals_;  // per relation, null if unused
    std::vector<PathPattern> patterns_;                           // per target relation

    diff::ParameterSet<T> params_;
    model::EncoderParams<T> main_;
    model::EncoderParams<T> aux_;
    std::vector<RelationParams> relation_params_;  // per relation
    model::Linear<T> filter_input_;
    std::vector<model::Linear<T>> filter_ho_;  // per target relation
    std::vector<model::Linear<T>> filter_he_;
    model::Mlp<T> proj_anchor_;
    std::vector<model::Mlp<T>> proj_ho_;
    std::vector<model::Mlp<T>> proj_he_;
};

extern template class Model<float>;
extern template class Model<double>;

}  // namespace hetsep::train
