#pragma once

#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/graph/synthetic.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using hetsep::Index;
using hetsep::Matrix;
using hetsep::graph::Edge;
using hetsep::graph::HeteroGraph;

// Types "a" (target) and "b", one relation "a-b" plus its inverse.
inline HeteroGraph bipartite(Index na, Index nb, std::vector<Edge> edges, Index dim = 2, std::uint64_t seed = 1) {
    HeteroGraph g;
    g.node_types = {{"a", na, dim}, {"b", nb, dim}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    for (Index c : {na, nb}) {
        Matrix<double> x(c, dim);
        for (Index k = 0; k < x.size(); ++k) x.data()[k] = n(rng);
        g.features.push_back(x);
    }
    hetsep::graph::Relation r;
    r.name = "a-b";
    r.src_type = 0;
    r.dst_type = 1;
    r.edges = std::move(edges);
    g.relations.push_back(r);
    g.edge_features.emplace_back();
    g.target_type = 0;
    g.num_classes = 1;
    g.labels.assign(static_cast<size_t>(na), 0);
    hetsep::graph::materialize_inverses(g);
    return g;
}

// Ten nodes: 6 papers (target, two classes), 2 authors, 2 venues.
inline HeteroGraph ten_node(Index dim = 3) {
    HeteroGraph g;
    g.node_types = {{"paper", 6, dim}, {"author", 2, dim}, {"venue", 2, dim}};
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const auto& t : g.node_types) {
        Matrix<double> x(t.count, dim);
        for (Index k = 0; k < x.size(); ++k) x.data()[k] = n(rng);
        g.features.push_back(x);
    }
    hetsep::graph::Relation pa{"paper-author", 0, 1, {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {3, 1}, {4, 1}, {5, 0}, {5, 1}}};
    hetsep::graph::Relation pv{"paper-venue", 0, 2, {{0, 0}, {1, 0}, {2, 1}, {3, 1}, {4, 0}, {5, 1}}};
    g.relations = {pa, pv};
    g.edge_features.resize(2);
    g.target_type = 0;
    g.num_classes = 2;
    g.labels = {0, 0, 0, 1, 1, 1};
    hetsep::graph::materialize_inverses(g);
    hetsep::graph::validate(g);
    return g;
}

inline hetsep::graph::SyntheticConfig small_synthetic(Index targets = 60, std::uint64_t seed = 3) {
    hetsep::graph::SyntheticConfig c;
    c.num_target_nodes = targets;
    c.num_classes = 3;
    c.feature_dim = 8;
    c.seed = seed;
    c.attribute_types = {{"a", targets / 6}, {"b", targets / 5}};
    return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("hetsep_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixtures
