#pragma once

// Closed operator set. Every op records an exact vector-Jacobian product on
// the tape; new layers must be composed from these or register their own.
//
// Sparse matrices and path patterns are captured by address: they must
// outlive any backward() call on a tape that used them.

#include "hetsep/diff/matrix.hpp"
#include "hetsep/diff/tape.hpp"

#include <vector>

namespace hetsep::diff {

template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> spmm(const SparseMatrix<T>& s, const Var<T>& x);
template <typename T> Var<T> transpose(const Var<T>& a);

template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> hadamard(const Var<T>& a, const Var<T>& b);
// a (n x c) + row (1 x c) broadcast over rows.
template <typename T> Var<T> add_row(const Var<T>& a, const Var<T>& row);
template <typename T> Var<T> scale(const Var<T>& a, T factor);
template <typename T> Var<T> divide(const Var<T>& a, T divisor);
// factor * a + offset, elementwise.
template <typename T> Var<T> affine(const Var<T>& a, T factor, T offset);
// a + c for a constant matrix c of the same shape.
template <typename T> Var<T> add_constant(const Var<T>& a, const Matrix<T>& c);

template <typename T> Var<T> concat_cols(const std::vector<Var<T>>& parts);

template <typename T> Var<T> sigmoid(const Var<T>& a);
template <typename T> Var<T> elu(const Var<T>& a, T alpha = T(1));
// slope is a learnable 1x1 value applied to the non-positive part.
template <typename T> Var<T> prelu(const Var<T>& a, const Var<T>& slope);
template <typename T> Var<T> exp(const Var<T>& a);
template <typename T> Var<T> log(const Var<T>& a);

template <typename T> Var<T> row_l2_normalize(const Var<T>& a, T eps = T(1e-12));
// Row i multiplied by factors[i].
template <typename T> Var<T> row_scale(const Var<T>& a, Vector<T> factors);
// Column vector of log(sum_{j: mask(i,j)} exp(a(i,j))). Every row of the
// mask must select at least one entry.
template <typename T> Var<T> masked_row_logsumexp(const Var<T>& a, Mask mask);
// Column vector of sum_{j: mask(i,j)} a(i,j).
template <typename T> Var<T> masked_row_sum(const Var<T>& a, Mask mask);

template <typename T> Var<T> sum_all(const Var<T>& a);
template <typename T> Var<T> mean_all(const Var<T>& a);

template <typename T> Var<T> gather_rows(const Var<T>& a, std::vector<Index> rows);

// Sums of products along two-step paths: out(p) = sum over the paths q of
// pair p of left(path_left[q]) * right(path_right[q]). left and right are
// column vectors.
template <typename T>
Var<T> path_sum(const Var<T>& left, const Var<T>& right, const PathPattern& pattern);

// Degree-normalised weighted neighbour mean over a pair pattern:
// out(i) = (1 / deg(i)) * sum over pairs (i, j) of values(p) * x(j).
// Rows with no pairs are zero.
template <typename T>
Var<T> pair_mean(const PathPattern& pattern, const Var<T>& values, const Var<T>& x);

}  // namespace hetsep::diff
