#include "hetsep/graph/incidence.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetsep::graph {

Vector<double> IncidenceMatrix::row_sums() const {
    Vector<double> s = Vector<double>::Zero(matrix.rows());
    for (Index r = 0; r < matrix.outerSize(); ++r) {
        for (SparseMatrix<double>::InnerIterator it(matrix, r); it; ++it) s(r) += it.value();
    }
    return s;
}

Vector<double> IncidenceMatrix::column_sums() const {
    Vector<double> s = Vector<double>::Zero(matrix.cols());
    for (Index r = 0; r < matrix.outerSize(); ++r) {
        for (SparseMatrix<double>::InnerIterator it(matrix, r); it; ++it) s(it.col()) += it.value();
    }
    return s;
}

IncidenceMatrix build_incidence(const HeteroGraph& graph, Index relation) {
    const Relation& r = graph.relations.at(static_cast<size_t>(relation));
    IncidenceMatrix inc;
    inc.relation = relation;
    inc.src_count = graph.node_types[static_cast<size_t>(r.src_type)].count;
    inc.dst_count = graph.node_types[static_cast<size_t>(r.dst_type)].count;
    std::vector<Eigen::Triplet<double, int>> trips;
    trips.reserve(r.edges.size() * 2);
    for (size_t e = 0; e < r.edges.size(); ++e) {
        trips.emplace_back(static_cast<int>(r.edges[e].src), static_cast<int>(e), 1.0);
        trips.emplace_back(static_cast<int>(inc.src_count + r.edges[e].dst), static_cast<int>(e), 1.0);
    }
    inc.matrix.resize(inc.src_count + inc.dst_count, static_cast<Index>(r.edges.size()));
    inc.matrix.setFromTriplets(trips.begin(), trips.end());
    inc.matrix.makeCompressed();
    return inc;
}

DualHypergraph dual_transform(const IncidenceMatrix& incidence) {
    DualHypergraph dual;
    dual.relation = incidence.relation;
    dual.src_count = incidence.src_count;
    dual.dst_count = incidence.dst_count;
    dual.transposed = incidence.matrix.transpose();
    dual.transposed.makeCompressed();
    dual.node_degree = incidence.column_sums();
    dual.hyperedge_degree = incidence.row_sums();
    return dual;
}

IncidenceMatrix dual_transform(const DualHypergraph& dual) {
    IncidenceMatrix inc;
    inc.relation = dual.relation;
    inc.src_count = dual.src_count;
    inc.dst_count = dual.dst_count;
    inc.matrix = dual.transposed.transpose();
    inc.matrix.makeCompressed();
    return inc;
}

DualPropagation dual_propagation(const DualHypergraph& dual) {
    auto inverse = [](const Vector<double>& d) {
        Vector<double> out(d.size());
        for (Index i = 0; i < d.size(); ++i) out(i) = d(i) > 0 ? 1.0 / d(i) : 0.0;
        return out;
    };
    DualPropagation p;
    const SparseMatrix<double> m_t = dual.transposed.transpose();
    p.to_hyperedges = inverse(dual.hyperedge_degree).asDiagonal() * m_t;
    p.to_nodes = inverse(dual.node_degree).asDiagonal() * dual.transposed;
    p.to_hyperedges.makeCompressed();
    p.to_nodes.makeCompressed();
    return p;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

}  // namespace

void write_incidence_tsv(const std::filesystem::path& path, const IncidenceMatrix& incidence) {
    auto os = open_out(path);
    os << "node\tedge\n";
    const SparseMatrix<double> t = incidence.matrix.transpose();
    for (Index e = 0; e < t.outerSize(); ++e) {
        for (SparseMatrix<double>::InnerIterator it(t, e); it; ++it) os << it.col() << '\t' << e << '\n';
    }
}

void write_dual_tsv(const std::filesystem::path& path, const DualHypergraph& dual) {
    auto os = open_out(path);
    os << "hyperedge\tdegree\tmembers\n";
    std::vector<std::vector<Index>> members(static_cast<size_t>(dual.num_hyperedges()));
    for (Index v = 0; v < dual.transposed.outerSize(); ++v) {
        for (SparseMatrix<double>::InnerIterator it(dual.transposed, v); it; ++it) {
            members[static_cast<size_t>(it.col())].push_back(v);
        }
    }
    for (size_t h = 0; h < members.size(); ++h) {
        os << h << '\t' << members[h].size() << '\t';
        for (size_t k = 0; k < members[h].size(); ++k) os << (k ? " " : "") << members[h][k];
        os << '\n';
    }
}

}  // namespace hetsep::graph
