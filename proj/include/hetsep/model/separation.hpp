#pragma once

#include "hetsep/graph/hetero_graph.hpp"
#include "hetsep/model/layers.hpp"

#include <filesystem>
#include <string>

namespace hetsep::model {

enum class GraphKind { homophilic, heterophilic };
std::string to_string(GraphKind k);

// Two-hop pattern i -r-> k -r^-1-> j over the source type of `relation`.
// Left indices address the relation's edges, right indices its inverse's.
// Pairs (i, i) are kept when a path returns to i. With top_m > 0 each row
// keeps only the top_m pairs with the most paths (ties: smaller j).
PathPattern build_two_hop_pattern(const graph::HeteroGraph& g, Index relation, Index top_m = 0);

// a_ij = sum_k w_r[i,k] * w_inv[k,j]
template <typename T>
Var<T> build_homo_graph(const Var<T>& w_r, const Var<T>& w_inv, const PathPattern& pattern);

// a_ij = sum_k (1 - w_r[i,k]) * (1 - w_inv[k,j])
template <typename T>
Var<T> build_hete_graph(const Var<T>& w_r, const Var<T>& w_inv, const PathPattern& pattern);

// 1 for rows of the pattern with no pairs.
template <typename T>
Vector<T> isolated_rows(const PathPattern& pattern);

// `layers` rounds of x_i <- mean_{j in N_i} a_ij x_j; isolated rows keep x_i.
template <typename T>
Var<T> low_pass_filter(const Var<T>& x, const PathPattern& pattern, const Var<T>& a, int layers);

// `layers` rounds of x_i <- mean_{j in N_i} (x_i - a_ij x_j); isolated rows keep x_i.
template <typename T>
Var<T> high_pass_filter(const Var<T>& x, const PathPattern& pattern, const Var<T>& a, int layers);

template <typename T>
Var<T> low_pass_encode(Tape<T>& tape, const Var<T>& x0, const PathPattern& pattern, const Var<T>& a, int layers,
                       const Linear<T>& out);

template <typename T>
Var<T> high_pass_encode(Tape<T>& tape, const Var<T>& x0, const PathPattern& pattern, const Var<T>& a, int layers,
                        const Linear<T>& out);

// TSV rows "i<TAB>j<TAB>weight" in pattern order.
void write_synthesized_graph(const std::filesystem::path& path, const PathPattern& pattern, const Vector<double>& a);

}  // namespace hetsep::model
