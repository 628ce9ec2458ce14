#pragma once

#include "hetsep/graph/incidence.hpp"
#include "hetsep/model/layers.hpp"

#include <cstdint>
#include <vector>

namespace hetsep::model {

// Propagation operators of one relation's dual hypergraph plus the endpoint
// lists used to build edge features. Rows follow the relation's edge order.
template <typename T>
struct DualOperator {
    Index relation = -1;
    Index src_type = 0;
    Index dst_type = 0;
    std::vector<Index> src;
    std::vector<Index> dst;
    SparseMatrix<T> to_hyperedges;  // B^-1 M^T
    SparseMatrix<T> to_nodes;       // D^-1 M^T^T, i.e. D^-1 Mbar

    Index edges() const { return static_cast<Index>(src.size()); }
};

template <typename T>
DualOperator<T> build_dual_operator(const graph::HeteroGraph& g, Index relation);

// Row e is concat(h_src[src_e], h_dst[dst_e]).
template <typename T>
Var<T> init_edge_features(const Var<T>& h_src_type, const Var<T>& h_dst_type, const DualOperator<T>& op);

// PReLU(D^-1 Mbar W B^-1 Mbar^T H Theta) with W = I.
template <typename T>
Var<T> hypergraph_conv(const Var<T>& h, const DualOperator<T>& op, const Var<T>& theta, const Var<T>& slope);

// One scalar per edge: embeddings u + b.
template <typename T>
Var<T> score_edges(Tape<T>& tape, const Var<T>& edge_embeddings, const Linear<T>& score);

enum class GumbelMode { train, eval };

// Logistic noise log u - log(1 - u), u ~ Uniform(eps, 1 - eps), one value
// per edge. A pure function of (seed, step, stream).
Vector<double> logistic_noise(Index n, double eps, std::uint64_t seed, std::uint64_t step, std::uint64_t stream);

// sigmoid((s + noise) / tau). Eval mode ignores the noise: sigmoid(s / tau).
template <typename T>
Var<T> gumbel_weights(const Var<T>& scores, double tau, const Vector<double>& noise, GumbelMode mode);

// Plain-value variant for inspection and tests.
Vector<double> gumbel_weights(const Vector<double>& scores, double tau, const Vector<double>& noise, GumbelMode mode);

}  // namespace hetsep::model
