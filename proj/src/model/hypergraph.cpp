#include "hetsep/model/hypergraph.hpp"

#include "hetsep/graph/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hetsep::model {

template <typename T>
DualOperator<T> build_dual_operator(const graph::HeteroGraph& g, Index relation) {
    const auto dual = graph::dual_transform(graph::build_incidence(g, relation));
    const auto prop = graph::dual_propagation(dual);
    const auto& r = g.relations.at(static_cast<size_t>(relation));
    DualOperator<T> op;
    op.relation = relation;
    op.src_type = r.src_type;
    op.dst_type = r.dst_type;
    for (const auto& e : r.edges) {
        op.src.push_back(e.src);
        op.dst.push_back(e.dst);
    }
    op.to_hyperedges = prop.to_hyperedges.cast<T>();
    op.to_nodes = prop.to_nodes.cast<T>();
    return op;
}

template <typename T>
Var<T> init_edge_features(const Var<T>& h_src_type, const Var<T>& h_dst_type, const DualOperator<T>& op) {
    return diff::concat_cols<T>({diff::gather_rows(h_src_type, op.src), diff::gather_rows(h_dst_type, op.dst)});
}

template <typename T>
Var<T> hypergraph_conv(const Var<T>& h, const DualOperator<T>& op, const Var<T>& theta, const Var<T>& slope) {
    if (h.rows() != op.edges()) throw std::invalid_argument("hypergraph_conv: one feature row per edge required");
    // Theta is applied on the hyperedge side: far fewer rows than edges.
    const Var<T> hyperedges = diff::matmul(diff::spmm(op.to_hyperedges, h), theta);
    return diff::prelu(diff::spmm(op.to_nodes, hyperedges), slope);
}

template <typename T>
Var<T> score_edges(Tape<T>& tape, const Var<T>& edge_embeddings, const Linear<T>& score) {
    if (score.out_dim() != 1) throw std::invalid_argument("score_edges: scoring layer must have one output");
    return score(tape, edge_embeddings);
}

Vector<double> logistic_noise(Index n, double eps, std::uint64_t seed, std::uint64_t step, std::uint64_t stream) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("noise clamp eps must lie in (0, 0.5)");
    std::mt19937_64 rng(graph::mix_seed(seed, step, stream));
    std::uniform_real_distribution<double> unit(eps, 1.0 - eps);
    Vector<double> out(n);
    for (Index e = 0; e < n; ++e) {
        const double u = unit(rng);
        out(e) = std::log(u) - std::log1p(-u);
    }
    return out;
}

template <typename T>
Var<T> gumbel_weights(const Var<T>& scores, double tau, const Vector<double>& noise, GumbelMode mode) {
    if (!(tau > 0.0)) throw std::invalid_argument("gumbel temperature tau must be > 0");
    if (scores.cols() != 1) throw std::invalid_argument("gumbel_weights: scores must be a column");
    Var<T> logits = scores;
    if (mode == GumbelMode::train) {
        if (noise.size() != scores.rows()) throw std::invalid_argument("gumbel_weights: noise length mismatch");
        logits = diff::add_constant(scores, Matrix<T>(noise.cast<T>()));
    }
    return diff::sigmoid(diff::divide(logits, static_cast<T>(tau)));
}

Vector<double> gumbel_weights(const Vector<double>& scores, double tau, const Vector<double>& noise, GumbelMode mode) {
    diff::Tape<double> tape(false);
    const auto w = gumbel_weights(tape.constant(Matrix<double>(scores)), tau, noise, mode);
    return w.value().col(0);
}

#define HETSEP_INSTANTIATE_HYPERGRAPH(T)                                                                     \
    template DualOperator<T> build_dual_operator<T>(const graph::HeteroGraph&, Index);                       \
    template Var<T> init_edge_features(const Var<T>&, const Var<T>&, const DualOperator<T>&);               \
    template Var<T> hypergraph_conv(const Var<T>&, const DualOperator<T>&, const Var<T>&, const Var<T>&);   \
    template Var<T> score_edges(Tape<T>&, const Var<T>&, const Linear<T>&);                                 \
    template Var<T> gumbel_weights(const Var<T>&, double, const Vector<double>&, GumbelMode);

HETSEP_INSTANTIATE_HYPERGRAPH(float)
HETSEP_INSTANTIATE_HYPERGRAPH(double)

}  // namespace hetsep::model
