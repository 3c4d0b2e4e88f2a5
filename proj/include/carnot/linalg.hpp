#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

// Dense matrices over an exact field (Rational) or doubles. Sizes here are
// tiny (dim <= 8, binomial spaces <= 70), so plain Gaussian elimination with
// full pivoting is all we need.
template <typename T>
struct FieldTraits {
  static bool is_zero(const T& x) { return x == 0; }
  static double pivot_size(const T&) { return 1.0; }
};

template <>
struct FieldTraits<double> {
  static bool is_zero(double x) { return std::abs(x) < 1e-12; }
  static double pivot_size(double x) { return std::abs(x); }
};

template <typename T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T()) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      assert(rows[i].size() == m.cols_);
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static Matrix column(const std::vector<T>& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  std::vector<T> row(std::size_t i) const {
    std::vector<T> v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
  }

  Matrix transposed() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  Matrix operator*(const Matrix& o) const {
    assert(cols_ == o.rows_);
    Matrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (FieldTraits<T>::is_zero(a)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += a * o(k, j);
      }
    return m;
  }
  std::vector<T> operator*(const std::vector<T>& v) const {
    assert(cols_ == v.size());
    std::vector<T> out(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }
  Matrix operator+(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix m = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] += o.data_[i];
    return m;
  }
  Matrix operator-(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix m = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] -= o.data_[i];
    return m;
  }
  Matrix operator*(const T& s) const {
    Matrix m = *this;
    for (auto& x : m.data_) x *= s;
    return m;
  }
  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool is_zero() const {
    for (const auto& x : data_)
      if (!FieldTraits<T>::is_zero(x)) return false;
    return true;
  }

  // Reduced row echelon form in place; returns pivot column indices.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t best = r;
      double best_size = -1.0;
      for (std::size_t i = r; i < rows_; ++i) {
        if (!FieldTraits<T>::is_zero((*this)(i, c))) {
          double sz = FieldTraits<T>::pivot_size((*this)(i, c));
          if (sz > best_size) {
            best_size = sz;
            best = i;
          }
        }
      }
      if (best_size < 0) continue;
      swap_rows(r, best);
      const T inv = T(1) / (*this)(r, c);
      for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r) continue;
        const T f = (*this)(i, c);
        if (FieldTraits<T>::is_zero(f)) continue;
        for (std::size_t j = c; j < cols_; ++j)
          (*this)(i, j) -= f * (*this)(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  std::size_t rank() const {
    Matrix m = *this;
    return m.rref().size();
  }

  T determinant() const {
    assert(rows_ == cols_);
    Matrix m = *this;
    T det(1);
    for (std::size_t c = 0; c < cols_; ++c) {
      std::size_t best = c;
      double best_size = -1.0;
      for (std::size_t i = c; i < rows_; ++i)
        if (!FieldTraits<T>::is_zero(m(i, c))) {
          double sz = FieldTraits<T>::pivot_size(m(i, c));
          if (sz > best_size) {
            best_size = sz;
            best = i;
          }
        }
      if (best_size < 0) return T(0);
      if (best != c) {
        m.swap_rows(c, best);
        det = -det;
      }
      det *= m(c, c);
      const T inv = T(1) / m(c, c);
      for (std::size_t i = c + 1; i < rows_; ++i) {
        const T f = m(i, c) * inv;
        if (FieldTraits<T>::is_zero(f)) continue;
        for (std::size_t j = c; j < cols_; ++j) m(i, j) -= f * m(c, j);
      }
    }
    return det;
  }

  std::optional<Matrix> inverse() const {
    assert(rows_ == cols_);
    Matrix aug(rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_ + i) = T(1);
    }
    auto pivots = aug.rref();
    if (pivots.size() != rows_) return std::nullopt;
    Matrix inv(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) inv(i, j) = aug(i, cols_ + j);
    return inv;
  }

  // Basis of the null space, one column per basis vector.
  Matrix kernel() const {
    Matrix m = *this;
    auto pivots = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols_; ++c)
      if (!is_pivot[c]) free_cols.push_back(c);
    Matrix basis(cols_, free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      basis(free_cols[k], k) = T(1);
      for (std::size_t r = 0; r < pivots.size(); ++r)
        basis(pivots[r], k) = -m(r, free_cols[k]);
    }
    return basis;
  }

  // One solution of A x = b, if consistent.
  std::optional<std::vector<T>> solve(const std::vector<T>& b) const {
    assert(b.size() == rows_);
    Matrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_) = b[i];
    }
    auto pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
    std::vector<T> x(cols_, T(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, cols_);
    return x;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j)
      std::swap((*this)(a, j), (*this)(b, j));
  }

  Matrix columns(const std::vector<std::size_t>& idx) const {
    Matrix m(rows_, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (std::size_t i = 0; i < rows_; ++i) m(i, k) = (*this)(i, idx[k]);
    return m;
  }

  Matrix hstack(const Matrix& o) const {
    assert(rows_ == o.rows_);
    Matrix m(rows_, cols_ + o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < o.cols_; ++j) m(i, cols_ + j) = o(i, j);
    }
    return m;
  }
  Matrix vstack(const Matrix& o) const {
    assert(cols_ == o.cols_ || rows_ == 0 || o.rows_ == 0);
    if (rows_ == 0) return o;
    if (o.rows_ == 0) return *this;
    Matrix m(rows_ + o.rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
    for (std::size_t i = 0; i < o.rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(rows_ + i, j) = o(i, j);
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> data_;
};

using QMat = Matrix<Rational>;
using QVec = std::vector<Rational>;
using DMat = Matrix<double>;
using DVec = std::vector<double>;

inline QVec operator+(const QVec& a, const QVec& b) {
  assert(a.size() == b.size());
  QVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}
inline QVec operator-(const QVec& a, const QVec& b) {
  assert(a.size() == b.size());
  QVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}
inline QVec operator*(const Rational& s, const QVec& a) {
  QVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
  return c;
}
inline bool is_zero(const QVec& a) {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

// <a, b> with respect to an SPD gram matrix.
template <typename T>
T inner(const std::vector<T>& a, const std::vector<T>& b, const Matrix<T>& w) {
  assert(a.size() == w.rows() && b.size() == w.cols());
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (FieldTraits<T>::is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * w(i, j) * b[j];
  }
  return s;
}

// Orthogonal projection onto span(columns of B) with respect to gram W.
// Columns of B need not be independent.
template <typename T>
Matrix<T> span_projection(const Matrix<T>& basis, const Matrix<T>& w) {
  if (basis.cols() == 0) return Matrix<T>(w.rows(), w.cols());
  // Reduce to an independent subset of columns first.
  std::vector<std::size_t> keep;
  {
    Matrix<T> m = basis;
    keep = m.rref();
  }
  Matrix<T> b = basis.columns(keep);
  Matrix<T> btw = b.transposed() * w;
  Matrix<T> g = btw * b;
  auto ginv = g.inverse();
  assert(ginv.has_value());
  return b * (*ginv) * btw;
}

// Minimal-W-norm solution of A x = b (system must be consistent).
template <typename T>
std::optional<std::vector<T>> least_norm_solve(const Matrix<T>& a,
                                               const std::vector<T>& b,
                                               const Matrix<T>& w) {
  auto x0 = a.solve(b);
  if (!x0) return std::nullopt;
  Matrix<T> k = a.kernel();
  if (k.cols() == 0) return x0;
  Matrix<T> proj = span_projection(k, w);
  auto px = proj * *x0;
  std::vector<T> x = *x0;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= px[i];
  return x;
}

}  // namespace carnot
