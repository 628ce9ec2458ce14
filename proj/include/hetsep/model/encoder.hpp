#pragma once

#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/model/layers.hpp"

#include <string>
#include <vector>

namespace hetsep::model {

enum class NodeAgg { mean, sum };
enum class TypeAgg { sum, mean };
enum class Activation { elu, identity };

NodeAgg node_agg_from_string(const std::string& s);
TypeAgg type_agg_from_string(const std::string& s);
std::string to_string(NodeAgg a);
std::string to_string(TypeAgg a);

struct EncoderOptions {
    Index hidden_dim = 64;
    int layers = 2;
    NodeAgg node_agg = NodeAgg::mean;
    TypeAgg type_agg = TypeAgg::sum;
    Activation activation = Activation::elu;
};

// Message-passing structure of one relation, seen from its destination type.
template <typename T>
struct EncoderRelation {
    Index relation = -1;
    Index src_type = 0;
    Index dst_type = 0;
    SparseMatrix<T> aggregator;  // dst x src, rows scaled by 1/deg in mean mode
    Vector<T> has_neighbors;     // dst, 1 where the neighbourhood is non-empty
};

template <typename T>
struct EncoderGraph {
    std::vector<Index> type_counts;
    std::vector<EncoderRelation<T>> relations;
    std::vector<std::vector<Index>> incoming;  // per type: indices into `relations`
};

template <typename T>
EncoderGraph<T> build_encoder_graph(const graph::HeteroGraph& g, NodeAgg mode);

template <typename T>
struct EncoderParams {
    std::vector<Linear<T>> input;                 // per type: feature_dim -> d
    std::vector<std::vector<Linear<T>>> self;     // [layer][type], with bias
    std::vector<std::vector<Linear<T>>> neighbor;  // [layer][relation], no bias

    static EncoderParams create(ParameterSet<T>& set, const std::string& prefix, const graph::HeteroGraph& g,
                                const EncoderOptions& options, std::mt19937_64& rng);
};

// act(h_dst W_s + A h_src W_r) over the destination nodes of one relation.
// Rows with no neighbours reduce to act(h_dst W_s).
template <typename T>
Var<T> node_aggregate(Tape<T>& tape, const Var<T>& h_dst, const Var<T>& h_src, const EncoderRelation<T>& rel,
                      const Linear<T>& self, const Linear<T>& neighbor, Activation act);

// Combines relation representations of one type, counting relation r for
// node i only when i has neighbours under r. A node with no neighbours under
// any relation is an error unless `allow_isolated`, in which case every
// relation contributes its (self-only) representation.
template <typename T>
Var<T> type_aggregate(const std::vector<Var<T>>& reps, const std::vector<const Vector<T>*>& has_neighbors,
                      TypeAgg mode, bool allow_isolated);

// Per-type embeddings after the input projection and `layers` rounds of
// node_aggregate / type_aggregate.
template <typename T>
std::vector<Var<T>> encode(Tape<T>& tape, const EncoderGraph<T>& eg, const std::vector<Var<T>>& features,
                           const EncoderParams<T>& params, const EncoderOptions& options);

}  // namespace hetsep::model
