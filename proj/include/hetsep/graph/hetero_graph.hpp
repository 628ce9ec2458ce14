#pragma once

#include "hetsep/diff/matrix.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetsep::graph {

struct NodeType {
    std::string name;
    Index count = 0;
    Index feature_dim = 0;  // 0: featureless on disk, features synthesised at load
};

struct Edge {
    Index src = 0;
    Index dst = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Typed bipartite edge set src_type -> dst_type. Edge order is significant:
// incidence columns and every per-edge tensor follow it.
struct Relation {
    std::string name;
    Index src_type = 0;
    Index dst_type = 0;
    std::vector<Edge> edges;
    Index inverse = -1;    // index of the reversed relation
    bool derived = false;  // materialised by reversing another relation
};

struct PresetSplits {
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
};

// Immutable after construction; safe to share between readers.
struct HeteroGraph {
    std::vector<NodeType> node_types;
    std::vector<Relation> relations;
    std::vector<Matrix<double>> features;                    // one per node type
    std::vector<std::optional<Matrix<double>>> edge_features;  // pass-through only
    Index target_type = 0;
    std::vector<int> labels;  // over target nodes
    int num_classes = 0;
    std::optional<PresetSplits> splits;

    Index type_index(const std::string& name) const;
    Index relation_index(const std::string& name) const;
    const NodeType& target() const { return node_types.at(static_cast<size_t>(target_type)); }

    // Relations whose source is the target type, in relation order. These
    // drive the synthesized homophilic/heterophilic graphs.
    std::vector<Index> target_relations() const;

    // Relations read from input (or generated), excluding materialised inverses
    // and the second member of an explicitly paired inverse.
    std::vector<Index> primary_relations() const;

    Index edge_count() const;
};

// Pairs each relation with an explicit reverse relation when one exists
// (same reversed edge set), otherwise appends "<name>_rev" with the reversed
// edge list in the same order.
void materialize_inverses(HeteroGraph& graph);

// Throws std::invalid_argument on any violated invariant.
void validate(const HeteroGraph& graph, bool allow_empty_relations = false);

// Per-node degree of each endpoint type under one relation.
std::vector<Index> src_degrees(const HeteroGraph& graph, Index relation);
std::vector<Index> dst_degrees(const HeteroGraph& graph, Index relation);

}  // namespace hetsep::graph
