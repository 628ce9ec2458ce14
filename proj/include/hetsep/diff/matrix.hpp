#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace hetsep {

using Index = Eigen::Index;

// Rows are entities (nodes, edges), columns are feature channels.
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using SparseMatrix = Eigen::SparseMatrix<T, Eigen::RowMajor, int>;

using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sparse pattern of weighted two-step paths. Output entry p (a pair (i, j)
// stored in CSR order) sums left[path_left[q]] * right[path_right[q]] over
// q in [path_ptr[p], path_ptr[p + 1]).
struct PathPattern {
    Index rows = 0;
    Index cols = 0;
    Index left_size = 0;
    Index right_size = 0;
    std::vector<Index> row_ptr;     // rows + 1
    std::vector<Index> col;         // one per pair
    std::vector<Index> path_ptr;    // pairs + 1
    std::vector<Index> path_left;   // one per path
    std::vector<Index> path_right;  // one per path

    Index pairs() const { return static_cast<Index>(col.size()); }
    Index paths() const { return static_cast<Index>(path_left.size()); }
    Index row_degree(Index i) const { return row_ptr[i + 1] - row_ptr[i]; }
};

}  // namespace hetsep
