#pragma once

#include "hetsep/graph/hetero_graph.hpp"

#include <filesystem>

namespace hetsep::graph {

// Binary node x edge matrix of one relation. Rows [0, src_count) are the
// source type, rows [src_count, src_count + dst_count) the destination type;
// column e is edge e of the relation.
struct IncidenceMatrix {
    Index relation = -1;
    Index src_count = 0;
    Index dst_count = 0;
    SparseMatrix<double> matrix;

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }
    Vector<double> row_sums() const;
    Vector<double> column_sums() const;
};

// Edges of the original graph become nodes; nodes become hyperedges.
struct DualHypergraph {
    Index relation = -1;
    Index src_count = 0;
    Index dst_count = 0;
    SparseMatrix<double> transposed;  // |E| x (src_count + dst_count)
    Vector<double> node_degree;       // per dual node (original edge): always 2
    Vector<double> hyperedge_degree;  // per hyperedge: original node degree

    Index num_nodes() const { return transposed.rows(); }
    Index num_hyperedges() const { return transposed.cols(); }
};

IncidenceMatrix build_incidence(const HeteroGraph& graph, Index relation);
DualHypergraph dual_transform(const IncidenceMatrix& incidence);
// Inverse direction: transposes the dual back into an incidence matrix.
IncidenceMatrix dual_transform(const DualHypergraph& dual);

// Normalised two-stage propagation D^-1 M W B^-1 M^T with W = I, split as
// to_nodes * to_hyperedges so the |E| x |E| product is never formed.
// 1/0 is taken as 0 for isolated hyperedges.
struct DualPropagation {
    SparseMatrix<double> to_hyperedges;  // B^-1 M^T : hyperedges x dual nodes
    SparseMatrix<double> to_nodes;       // D^-1 M   : dual nodes x hyperedges
};

DualPropagation dual_propagation(const DualHypergraph& dual);

// "node<TAB>edge" per nonzero, edge-major. Node ids are the stacked row ids.
void write_incidence_tsv(const std::filesystem::path& path, const IncidenceMatrix& incidence);
// "hyperedge<TAB>degree<TAB>members" with members the space-separated dual
// node (original edge) ids.
void write_dual_tsv(const std::filesystem::path& path, const DualHypergraph& dual);

}  // namespace hetsep::graph
