#include "hetsep/model/encoder.hpp"

#include <stdexcept>

namespace hetsep::model {

NodeAgg node_agg_from_string(const std::string& s) {
    if (s == "mean") return NodeAgg::mean;
    if (s == "sum") return NodeAgg::sum;
    throw std::invalid_argument("unknown node aggregation mode '" + s + "' (expected mean or sum)");
}

TypeAgg type_agg_from_string(const std::string& s) {
    if (s == "sum") return TypeAgg::sum;
    if (s == "mean") return TypeAgg::mean;
    throw std::invalid_argument("unknown type aggregation mode '" + s + "' (expected sum or mean)");
}

std::string to_string(NodeAgg a) { return a == NodeAgg::mean ? "mean" : "sum"; }
std::string to_string(TypeAgg a) { return a == TypeAgg::sum ? "sum" : "mean"; }

template <typename T>
EncoderGraph<T> build_encoder_graph(const graph::HeteroGraph& g, NodeAgg mode) {
    EncoderGraph<T> eg;
    for (const auto& t : g.node_types) eg.type_counts.push_back(t.count);
    eg.incoming.resize(g.node_types.size());
    for (size_t ri = 0; ri < g.relations.size(); ++ri) {
        const auto& r = g.relations[ri];
        EncoderRelation<T> er;
        er.relation = static_cast<Index>(ri);
        er.src_type = r.src_type;
        er.dst_type = r.dst_type;
        const Index n_dst = eg.type_counts[static_cast<size_t>(r.dst_type)];
        const Index n_src = eg.type_counts[static_cast<size_t>(r.src_type)];
        const auto deg = graph::dst_degrees(g, static_cast<Index>(ri));
        std::vector<Eigen::Triplet<T, int>> trips;
        trips.reserve(r.edges.size());
        for (const auto& e : r.edges) {
            const T w = mode == NodeAgg::mean ? T(1) / static_cast<T>(deg[static_cast<size_t>(e.dst)]) : T(1);
            trips.emplace_back(static_cast<int>(e.dst), static_cast<int>(e.src), w);
        }
        er.aggregator.resize(n_dst, n_src);
        er.aggregator.setFromTriplets(trips.begin(), trips.end());
        er.aggregator.makeCompressed();
        er.has_neighbors = Vector<T>::Zero(n_dst);
        for (Index i = 0; i < n_dst; ++i) er.has_neighbors(i) = deg[static_cast<size_t>(i)] > 0 ? T(1) : T(0);
        eg.incoming[static_cast<size_t>(r.dst_type)].push_back(static_cast<Index>(eg.relations.size()));
        eg.relations.push_back(std::move(er));
    }
    return eg;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::create(ParameterSet<T>& set, const std::string& prefix,
                                          const graph::HeteroGraph& g, const EncoderOptions& options,
                                          std::mt19937_64& rng) {
    if (options.hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
    if (options.layers < 0) throw std::invalid_argument("encoder layers must be >= 0");
    EncoderParams p;
    const Index d = options.hidden_dim;
    for (size_t t = 0; t < g.node_types.size(); ++t) {
        p.input.push_back(Linear<T>::create(set, prefix + ".input." + g.node_types[t].name,
                                            g.features[t].cols(), d, true, rng));
    }
    for (int l = 0; l < options.layers; ++l) {
        const std::string lp = prefix + ".layer" + std::to_string(l);
        p.self.emplace_back();
        p.neighbor.emplace_back();
        for (const auto& t : g.node_types) {
            p.self.back().push_back(Linear<T>::create(set, lp + ".self." + t.name, d, d, true, rng));
        }
        for (const auto& r : g.relations) {
            p.neighbor.back().push_back(Linear<T>::create(set, lp + ".rel." + r.name, d, d, false, rng));
        }
    }
    return p;
}

template <typename T>
Var<T> node_aggregate(Tape<T>& tape, const Var<T>& h_dst, const Var<T>& h_src, const EncoderRelation<T>& rel,
                      const Linear<T>& self, const Linear<T>& neighbor, Activation act) {
    const Var<T> messages = diff::spmm(rel.aggregator, neighbor(tape, h_src));
    const Var<T> pre = diff::add(self(tape, h_dst), messages);
    return act == Activation::elu ? diff::elu(pre) : pre;
}

template <typename T>
Var<T> type_aggregate(const std::vector<Var<T>>& reps, const std::vector<const Vector<T>*>& has_neighbors,
                      TypeAgg mode, bool allow_isolated) {
    if (reps.empty()) throw std::invalid_argument("type_aggregate needs at least one relation representation");
    if (reps.size() != has_neighbors.size()) throw std::invalid_argument("type_aggregate: mask count mismatch");
    const Index n = reps.front().rows();
    Vector<T> count = Vector<T>::Zero(n);
    for (const auto* m : has_neighbors) {
        if (m->size() != n) throw std::invalid_argument("type_aggregate: mask length mismatch");
        count += *m;
    }
    for (Index i = 0; i < n; ++i) {
        if (count(i) == T(0) && !allow_isolated) {
            throw std::invalid_argument("node " + std::to_string(i) + " has no neighbours under any relation");
        }
    }
    Var<T> out;
    for (size_t r = 0; r < reps.size(); ++r) {
        Vector<T> f(n);
        for (Index i = 0; i < n; ++i) {
            const bool isolated = count(i) == T(0);
            f(i) = isolated ? T(1) : (*has_neighbors[r])(i);
            if (mode == TypeAgg::mean) f(i) /= isolated ? static_cast<T>(reps.size()) : count(i);
        }
        const Var<T> term = diff::row_scale(reps[r], std::move(f));
        out = r == 0 ? term : diff::add(out, term);
    }
    return out;
}

template <typename T>
std::vector<Var<T>> encode(Tape<T>& tape, const EncoderGraph<T>& eg, const std::vector<Var<T>>& features,
                           const EncoderParams<T>& params, const EncoderOptions& options) {
    if (features.size() != eg.type_counts.size()) throw std::invalid_argument("encode: one feature matrix per type");
    std::vector<Var<T>> h;
    h.reserve(features.size());
    for (size_t t = 0; t < features.size(); ++t) h.push_back(params.input[t](tape, features[t]));
    for (int l = 0; l < options.layers; ++l) {
        std::vector<Var<T>> next = h;
        for (size_t t = 0; t < h.size(); ++t) {
            const auto& in = eg.incoming[t];
            if (in.empty()) continue;
            std::vector<Var<T>> reps;
            std::vector<const Vector<T>*> masks;
            for (Index k : in) {
                const auto& rel = eg.relations[static_cast<size_t>(k)];
                reps.push_back(node_aggregate(tape, h[t], h[static_cast<size_t>(rel.src_type)], rel,
                                              params.self[static_cast<size_t>(l)][t],
                                              params.neighbor[static_cast<size_t>(l)][static_cast<size_t>(rel.relation)],
                                              options.activation));
                masks.push_back(&rel.has_neighbors);
            }
            next[t] = type_aggregate(reps, masks, options.type_agg, true);
        }
        h = std::move(next);
    }
    return h;
}

#define HETSEP_INSTANTIATE_ENCODER(T)                                                                         \
    template EncoderGraph<T> build_encoder_graph<T>(const graph::HeteroGraph&, NodeAgg);                      \
    template struct EncoderParams<T>;                                                                         \
    template Var<T> node_aggregate(Tape<T>&, const Var<T>&, const Var<T>&, const EncoderRelation<T>&,         \
                                   const Linear<T>&, const Linear<T>&, Activation);                           \
    template Var<T> type_aggregate(const std::vector<Var<T>>&, const std::vector<const Vector<T>*>&, TypeAgg, \
                                   bool);                                                                     \
    template std::vector<Var<T>> encode(Tape<T>&, const EncoderGraph<T>&, const std::vector<Var<T>>&,        \
                                        const EncoderParams<T>&, const EncoderOptions&);

HETSEP_INSTANTIATE_ENCODER(float)
HETSEP_INSTANTIATE_ENCODER(double)

}  // namespace hetsep::model
