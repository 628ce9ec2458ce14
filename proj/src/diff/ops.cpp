#include "hetsep/diff/ops.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hetsep::diff {
namespace {

template <typename T>
Tape<T>& tape_of(const Var<T>& a) {
    if (!a.valid()) throw std::invalid_argument("op applied to an empty Var");
    return *a.tape();
}

template <typename T>
void same_tape(const Var<T>& a, const Var<T>& b) {
    if (a.tape() != b.tape()) throw std::invalid_argument("operands recorded on different tapes");
}

[[noreturn]] void shape_error(const char* op, Index r1, Index c1, Index r2, Index c2) {
    std::ostringstream os;
    os << "shape mismatch in op '" << op << "': " << r1 << "x" << c1 << " vs " << r2 << "x" << c2;
    throw std::invalid_argument(os.str());
}

template <typename T>
void same_shape(const char* op, const Var<T>& a, const Var<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        shape_error(op, a.rows(), a.cols(), b.rows(), b.cols());
    }
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
    same_tape(a, b);
    if (a.cols() != b.rows()) shape_error("matmul", a.rows(), a.cols(), b.rows(), b.cols());
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), ib = b.id();
    Matrix<T> out = a.value() * b.value();
    return t.push(std::move(out), {ia, ib},
                  [ia, ib](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      if (tp.requires_grad(ia)) tp.accumulate(ia, g * tp.value(ib).transpose());
                      if (tp.requires_grad(ib)) tp.accumulate(ib, tp.value(ia).transpose() * g);
                  },
                  "matmul");
}

template <typename T>
Var<T> spmm(const SparseMatrix<T>& s, const Var<T>& x) {
    if (s.cols() != x.rows()) shape_error("spmm", s.rows(), s.cols(), x.rows(), x.cols());
    Tape<T>& t = tape_of(x);
    const int ix = x.id();
    const SparseMatrix<T>* sp = &s;
    Matrix<T> out = s * x.value();
    return t.push(std::move(out), {ix},
                  [ix, sp](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ix, sp->transpose() * g);
                  },
                  "spmm");
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value().transpose();
    return t.push(std::move(out), {ia},
                  [ia](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g.transpose());
                  },
                  "transpose");
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    same_tape(a, b);
    same_shape("add", a, b);
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), ib = b.id();
    Matrix<T> out = a.value() + b.value();
    return t.push(std::move(out), {ia, ib},
                  [ia, ib](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g);
                      tp.accumulate(ib, g);
                  },
                  "add");
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
    same_tape(a, b);
    same_shape("sub", a, b);
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), ib = b.id();
    Matrix<T> out = a.value() - b.value();
    return t.push(std::move(out), {ia, ib},
                  [ia, ib](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g);
                      if (tp.requires_grad(ib)) tp.accumulate(ib, -g);
                  },
                  "sub");
}

template <typename T>
Var<T> hadamard(const Var<T>& a, const Var<T>& b) {
    same_tape(a, b);
    same_shape("hadamard", a, b);
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), ib = b.id();
    Matrix<T> out = a.value().cwiseProduct(b.value());
    return t.push(std::move(out), {ia, ib},
                  [ia, ib](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      if (tp.requires_grad(ia)) tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
                      if (tp.requires_grad(ib)) tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
                  },
                  "hadamard");
}

template <typename T>
Var<T> add_row(const Var<T>& a, const Var<T>& row) {
    same_tape(a, row);
    if (row.rows() != 1 || row.cols() != a.cols()) {
        shape_error("add_row", a.rows(), a.cols(), row.rows(), row.cols());
    }
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), ir = row.id();
    Matrix<T> out = a.value().rowwise() + row.value().row(0);
    return t.push(std::move(out), {ia, ir},
                  [ia, ir](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g);
                      if (tp.requires_grad(ir)) tp.accumulate(ir, g.colwise().sum());
                  },
                  "add_row");
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value() * factor;
    return t.push(std::move(out), {ia},
                  [ia, factor](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g * factor);
                  },
                  "scale");
}

template <typename T>
Var<T> divide(const Var<T>& a, T divisor) {
    if (divisor == T(0)) throw std::invalid_argument("divide by zero");
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value() / divisor;
    return t.push(std::move(out), {ia},
                  [ia, divisor](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g / divisor);
                  },
                  "divide");
}

template <typename T>
Var<T> affine(const Var<T>& a, T factor, T offset) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = (a.value() * factor).array() + offset;
    return t.push(std::move(out), {ia},
                  [ia, factor](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g * factor);
                  },
                  "affine");
}

template <typename T>
Var<T> add_constant(const Var<T>& a, const Matrix<T>& c) {
    if (c.rows() != a.rows() || c.cols() != a.cols()) {
        shape_error("add_constant", a.rows(), a.cols(), c.rows(), c.cols());
    }
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value() + c;
    return t.push(std::move(out), {ia},
                  [ia](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) { tp.accumulate(ia, g); },
                  "add_constant");
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols of zero parts");
    Tape<T>& t = tape_of(parts.front());
    const Index rows = parts.front().rows();
    Index cols = 0;
    std::vector<int> ids;
    std::vector<Index> widths;
    for (const auto& p : parts) {
        same_tape(parts.front(), p);
        if (p.rows() != rows) shape_error("concat_cols", rows, cols, p.rows(), p.cols());
        cols += p.cols();
        ids.push_back(p.id());
        widths.push_back(p.cols());
    }
    Matrix<T> out(rows, cols);
    Index offset = 0;
    for (const auto& p : parts) {
        out.middleCols(offset, p.cols()) = p.value();
        offset += p.cols();
    }
    return t.push(std::move(out), ids,
                  [ids, widths](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      Index off = 0;
                      for (size_t k = 0; k < ids.size(); ++k) {
                          if (tp.requires_grad(ids[k])) tp.accumulate(ids[k], g.middleCols(off, widths[k]));
                          off += widths[k];
                      }
                  },
                  "concat_cols");
}

template <typename T>
Var<T> sigmoid(const Var<T>& a) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    // exp(-x) may overflow to inf for very negative x; 1 / inf is still 0.
    Matrix<T> out = a.value().unaryExpr([](T x) { return T(1) / (T(1) + std::exp(-x)); });
    return t.push(std::move(out), {ia},
                  [ia](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>& y) {
                      tp.accumulate(ia, g.cwiseProduct(y.cwiseProduct((T(1) - y.array()).matrix())));
                  },
                  "sigmoid");
}

template <typename T>
Var<T> elu(const Var<T>& a, T alpha) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value().unaryExpr([alpha](T x) { return x > T(0) ? x : alpha * std::expm1(x); });
    return t.push(std::move(out), {ia},
                  [ia, alpha](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>& y) {
                      const Matrix<T>& x = tp.value(ia);
                      Matrix<T> d(g.rows(), g.cols());
                      for (Index k = 0; k < g.size(); ++k) {
                          d.data()[k] = x.data()[k] > T(0) ? g.data()[k] : g.data()[k] * (y.data()[k] + alpha);
                      }
                      tp.accumulate(ia, d);
                  },
                  "elu");
}

template <typename T>
Var<T> prelu(const Var<T>& a, const Var<T>& slope) {
    same_tape(a, slope);
    if (slope.rows() != 1 || slope.cols() != 1) shape_error("prelu", 1, 1, slope.rows(), slope.cols());
    Tape<T>& t = tape_of(a);
    const int ia = a.id(), is = slope.id();
    const T s = slope.scalar();
    Matrix<T> out = a.value().unaryExpr([s](T x) { return x > T(0) ? x : s * x; });
    return t.push(std::move(out), {ia, is},
                  [ia, is](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      const Matrix<T>& x = tp.value(ia);
                      const T sv = tp.value(is)(0, 0);
                      Matrix<T> dx(g.rows(), g.cols());
                      T ds = 0;
                      for (Index k = 0; k < g.size(); ++k) {
                          const T xv = x.data()[k];
                          if (xv > T(0)) {
                              dx.data()[k] = g.data()[k];
                          } else {
                              dx.data()[k] = sv * g.data()[k];
                              ds += g.data()[k] * xv;
                          }
                      }
                      tp.accumulate(ia, dx);
                      if (tp.requires_grad(is)) tp.accumulate(is, Matrix<T>::Constant(1, 1, ds));
                  },
                  "prelu");
}

template <typename T>
Var<T> exp(const Var<T>& a) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = a.value().array().exp().matrix();
    return t.push(std::move(out), {ia},
                  [ia](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>& y) {
                      tp.accumulate(ia, g.cwiseProduct(y));
                  },
                  "exp");
}

template <typename T>
Var<T> log(const Var<T>& a) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    if ((a.value().array() <= T(0)).any()) throw std::domain_error("log of a non-positive value");
    Matrix<T> out = a.value().array().log().matrix();
    return t.push(std::move(out), {ia},
                  [ia](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, g.cwiseQuotient(tp.value(ia)));
                  },
                  "log");
}

template <typename T>
Var<T> row_l2_normalize(const Var<T>& a, T eps) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Matrix<T>& x = a.value();
    Vector<T> norms(x.rows());
    Matrix<T> out(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        const T n = x.row(i).norm();
        norms(i) = n > eps ? n : eps;
        out.row(i) = x.row(i) / norms(i);
    }
    return t.push(std::move(out), {ia},
                  [ia, norms](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>& y) {
                      Matrix<T> d(g.rows(), g.cols());
                      for (Index i = 0; i < g.rows(); ++i) {
                          const T proj = y.row(i).dot(g.row(i));
                          d.row(i) = (g.row(i) - proj * y.row(i)) / norms(i);
                      }
                      tp.accumulate(ia, d);
                  },
                  "row_l2_normalize");
}

template <typename T>
Var<T> row_scale(const Var<T>& a, Vector<T> factors) {
    if (factors.size() != a.rows()) shape_error("row_scale", a.rows(), a.cols(), factors.size(), 1);
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    Matrix<T> out = factors.asDiagonal() * a.value();
    return t.push(std::move(out), {ia},
                  [ia, f = std::move(factors)](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, f.asDiagonal() * g);
                  },
                  "row_scale");
}

template <typename T>
Var<T> masked_row_logsumexp(const Var<T>& a, Mask mask) {
    if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
        shape_error("masked_row_logsumexp", a.rows(), a.cols(), mask.rows(), mask.cols());
    }
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Matrix<T>& x = a.value();
    Matrix<T> out(x.rows(), 1);
    for (Index i = 0; i < x.rows(); ++i) {
        T mx = -std::numeric_limits<T>::infinity();
        for (Index j = 0; j < x.cols(); ++j) {
            if (mask(i, j) && x(i, j) > mx) mx = x(i, j);
        }
        if (mx == -std::numeric_limits<T>::infinity()) {
            throw std::invalid_argument("masked_row_logsumexp: row " + std::to_string(i) + " selects no entries");
        }
        T acc = 0;
        for (Index j = 0; j < x.cols(); ++j) {
            if (mask(i, j)) acc += std::exp(x(i, j) - mx);
        }
        out(i, 0) = mx + std::log(acc);
    }
    return t.push(std::move(out), {ia},
                  [ia, m = std::move(mask)](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>& y) {
                      const Matrix<T>& xv = tp.value(ia);
                      Matrix<T> d = Matrix<T>::Zero(xv.rows(), xv.cols());
                      for (Index i = 0; i < xv.rows(); ++i) {
                          for (Index j = 0; j < xv.cols(); ++j) {
                              if (m(i, j)) d(i, j) = g(i, 0) * std::exp(xv(i, j) - y(i, 0));
                          }
                      }
                      tp.accumulate(ia, d);
                  },
                  "masked_row_logsumexp");
}

template <typename T>
Var<T> masked_row_sum(const Var<T>& a, Mask mask) {
    if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
        shape_error("masked_row_sum", a.rows(), a.cols(), mask.rows(), mask.cols());
    }
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Matrix<T>& x = a.value();
    Matrix<T> out = Matrix<T>::Zero(x.rows(), 1);
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            if (mask(i, j)) out(i, 0) += x(i, j);
        }
    }
    return t.push(std::move(out), {ia},
                  [ia, m = std::move(mask)](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      Matrix<T> d = m.template cast<T>();
                      d = g.col(0).asDiagonal() * d;
                      tp.accumulate(ia, d);
                  },
                  "masked_row_sum");
}

template <typename T>
Var<T> sum_all(const Var<T>& a) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Index r = a.rows(), c = a.cols();
    Matrix<T> out = Matrix<T>::Constant(1, 1, a.value().sum());
    return t.push(std::move(out), {ia},
                  [ia, r, c](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, Matrix<T>::Constant(r, c, g(0, 0)));
                  },
                  "sum_all");
}

template <typename T>
Var<T> mean_all(const Var<T>& a) {
    if (a.value().size() == 0) throw std::invalid_argument("mean_all of an empty matrix");
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Index r = a.rows(), c = a.cols();
    const T n = static_cast<T>(a.value().size());
    Matrix<T> out = Matrix<T>::Constant(1, 1, a.value().sum() / n);
    return t.push(std::move(out), {ia},
                  [ia, r, c, n](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      tp.accumulate(ia, Matrix<T>::Constant(r, c, g(0, 0) / n));
                  },
                  "mean_all");
}

template <typename T>
Var<T> gather_rows(const Var<T>& a, std::vector<Index> rows) {
    Tape<T>& t = tape_of(a);
    const int ia = a.id();
    const Matrix<T>& x = a.value();
    Matrix<T> out(static_cast<Index>(rows.size()), x.cols());
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= x.rows()) {
            throw std::out_of_range("gather_rows index " + std::to_string(rows[k]) + " out of range");
        }
        out.row(static_cast<Index>(k)) = x.row(rows[k]);
    }
    return t.push(std::move(out), {ia},
                  [ia, idx = std::move(rows)](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      Matrix<T>& slot = tp.grad_slot(ia);
                      for (size_t k = 0; k < idx.size(); ++k) slot.row(idx[k]) += g.row(static_cast<Index>(k));
                  },
                  "gather_rows");
}

template <typename T>
Var<T> path_sum(const Var<T>& left, const Var<T>& right, const PathPattern& pattern) {
    same_tape(left, right);
    if (left.cols() != 1 || left.rows() != pattern.left_size) {
        shape_error("path_sum", left.rows(), left.cols(), pattern.left_size, 1);
    }
    if (right.cols() != 1 || right.rows() != pattern.right_size) {
        shape_error("path_sum", right.rows(), right.cols(), pattern.right_size, 1);
    }
    Tape<T>& t = tape_of(left);
    const int il = left.id(), ir = right.id();
    const PathPattern* pp = &pattern;
    const auto& l = left.value();
    const auto& r = right.value();
    Matrix<T> out(pattern.pairs(), 1);
    for (Index p = 0; p < pattern.pairs(); ++p) {
        T acc = 0;
        for (Index q = pattern.path_ptr[p]; q < pattern.path_ptr[p + 1]; ++q) {
            acc += l(pattern.path_left[q], 0) * r(pattern.path_right[q], 0);
        }
        out(p, 0) = acc;
    }
    return t.push(std::move(out), {il, ir},
                  [il, ir, pp](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      const auto& lv = tp.value(il);
                      const auto& rv = tp.value(ir);
                      Matrix<T> dl = Matrix<T>::Zero(lv.rows(), 1);
                      Matrix<T> dr = Matrix<T>::Zero(rv.rows(), 1);
                      for (Index p = 0; p < pp->pairs(); ++p) {
                          const T gp = g(p, 0);
                          for (Index q = pp->path_ptr[p]; q < pp->path_ptr[p + 1]; ++q) {
                              dl(pp->path_left[q], 0) += gp * rv(pp->path_right[q], 0);
                              dr(pp->path_right[q], 0) += gp * lv(pp->path_left[q], 0);
                          }
                      }
                      if (tp.requires_grad(il)) tp.accumulate(il, dl);
                      if (tp.requires_grad(ir)) tp.accumulate(ir, dr);
                  },
                  "path_sum");
}

template <typename T>
Var<T> pair_mean(const PathPattern& pattern, const Var<T>& values, const Var<T>& x) {
    same_tape(values, x);
    if (values.cols() != 1 || values.rows() != pattern.pairs()) {
        shape_error("pair_mean", values.rows(), values.cols(), pattern.pairs(), 1);
    }
    if (x.rows() != pattern.cols) shape_error("pair_mean", x.rows(), x.cols(), pattern.cols, x.cols());
    Tape<T>& t = tape_of(x);
    const int iv = values.id(), ix = x.id();
    const PathPattern* pp = &pattern;
    const auto& v = values.value();
    const auto& xv = x.value();
    Matrix<T> out = Matrix<T>::Zero(pattern.rows, xv.cols());
    // Square patterns use x_i (sum_p v_p) / deg + sum_p v_p (x_j - x_i) / deg,
    // which returns a constant input bit-for-bit when every v_p = 1.
    const bool centred = pattern.rows == pattern.cols;
    Matrix<T> diff_sum(1, xv.cols());
    for (Index i = 0; i < pattern.rows; ++i) {
        const Index deg = pattern.row_degree(i);
        if (deg == 0) continue;
        if (centred) {
            T vsum = 0;
            diff_sum.setZero();
            for (Index p = pattern.row_ptr[i]; p < pattern.row_ptr[i + 1]; ++p) {
                vsum += v(p, 0);
                diff_sum += v(p, 0) * (xv.row(pattern.col[p]) - xv.row(i));
            }
            out.row(i) = xv.row(i) * (vsum / static_cast<T>(deg)) + diff_sum / static_cast<T>(deg);
            continue;
        }
        for (Index p = pattern.row_ptr[i]; p < pattern.row_ptr[i + 1]; ++p) {
            out.row(i) += v(p, 0) * xv.row(pattern.col[p]);
        }
        out.row(i) /= static_cast<T>(deg);
    }
    return t.push(std::move(out), {iv, ix},
                  [iv, ix, pp](Tape<T>& tp, const Matrix<T>& g, const Matrix<T>&) {
                      const auto& vv = tp.value(iv);
                      const auto& xx = tp.value(ix);
                      const bool need_v = tp.requires_grad(iv);
                      const bool need_x = tp.requires_grad(ix);
                      Matrix<T> dv = Matrix<T>::Zero(vv.rows(), 1);
                      Matrix<T> dx = Matrix<T>::Zero(xx.rows(), xx.cols());
                      for (Index i = 0; i < pp->rows; ++i) {
                          const Index deg = pp->row_degree(i);
                          if (deg == 0) continue;
                          const T inv = T(1) / static_cast<T>(deg);
                          for (Index p = pp->row_ptr[i]; p < pp->row_ptr[i + 1]; ++p) {
                              const Index j = pp->col[p];
                              if (need_v) dv(p, 0) = inv * g.row(i).dot(xx.row(j));
                              if (need_x) dx.row(j) += (vv(p, 0) * inv) * g.row(i);
                          }
                      }
                      if (need_v) tp.accumulate(iv, dv);
                      if (need_x) tp.accumulate(ix, dx);
                  },
                  "pair_mean");
}

#define HETSEP_INSTANTIATE_OPS(T)                                                        \
    template Var<T> matmul(const Var<T>&, const Var<T>&);                                \
    template Var<T> spmm(const SparseMatrix<T>&, const Var<T>&);                          \
    template Var<T> transpose(const Var<T>&);                                             \
    template Var<T> add(const Var<T>&, const Var<T>&);                                    \
    template Var<T> sub(const Var<T>&, const Var<T>&);                                    \
    template Var<T> hadamard(const Var<T>&, const Var<T>&);                               \
    template Var<T> add_row(const Var<T>&, const Var<T>&);                                \
    template Var<T> scale(const Var<T>&, T);                                              \
    template Var<T> divide(const Var<T>&, T);                                             \
    template Var<T> affine(const Var<T>&, T, T);                                          \
    template Var<T> add_constant(const Var<T>&, const Matrix<T>&);                        \
    template Var<T> concat_cols(const std::vector<Var<T>>&);                              \
    template Var<T> sigmoid(const Var<T>&);                                               \
    template Var<T> elu(const Var<T>&, T);                                                \
    template Var<T> prelu(const Var<T>&, const Var<T>&);                                  \
    template Var<T> exp(const Var<T>&);                                                   \
    template Var<T> log(const Var<T>&);                                                   \
    template Var<T> row_l2_normalize(const Var<T>&, T);                                   \
    template Var<T> row_scale(const Var<T>&, Vector<T>);                                  \
    template Var<T> masked_row_logsumexp(const Var<T>&, Mask);                            \
    template Var<T> masked_row_sum(const Var<T>&, Mask);                                  \
    template Var<T> sum_all(const Var<T>&);                                               \
    template Var<T> mean_all(const Var<T>&);                                              \
    template Var<T> gather_rows(const Var<T>&, std::vector<Index>);                       \
    template Var<T> path_sum(const Var<T>&, const Var<T>&, const PathPattern&);           \
    template Var<T> pair_mean(const PathPattern&, const Var<T>&, const Var<T>&);

HETSEP_INSTANTIATE_OPS(float)
HETSEP_INSTANTIATE_OPS(double)

}  // namespace hetsep::diff
