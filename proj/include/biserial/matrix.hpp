#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "rng.hpp"

namespace biserial {

/// Dense matrix over an exact scalar field K (Rat or Fp). Carries its field
/// context so zero-sized matrices (empty blocks are routine in the direct-sum
/// constructions) can still produce elements of the right field.
template <class K>
class Matrix {
 public:
  Matrix() : Matrix(0, 0, FieldCtx<K>{}) {}
  Matrix(std::size_t rows, std::size_t cols, FieldCtx<K> ctx)
      : rows_(rows), cols_(cols), ctx_(ctx), a_(rows * cols, ctx.zero()) {}

  static Matrix identity(std::size_t n, FieldCtx<K> ctx) {
    Matrix m(n, n, ctx);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = ctx.one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldCtx<K>& ctx() const { return ctx_; }

  K& at(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }
  const K& at(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return a_[i * cols_ + j];
  }

  bool is_zero() const {
    for (const K& x : a_)
      if (!biserial::is_zero(x)) return false;
    return true;
  }

  bool is_square() const { return rows_ == cols_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_, ctx_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Matrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] = c.a_[k] + b.a_[k];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    Matrix c = a;
    for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] = c.a_[k] - b.a_[k];
    return c;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix c(a.rows_, b.cols_, a.ctx_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const K& aik = a.at(i, k);
        if (biserial::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c.at(i, j) = c.at(i, j) + aik * b.at(k, j);
      }
    return c;
  }
  friend Matrix operator*(const K& s, const Matrix& a) {
    Matrix c = a;
    for (K& x : c.a_) x = s * x;
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t k = 0; k < a.a_.size(); ++k)
      if (!(a.a_[k] == b.a_[k])) return false;
    return true;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

 private:
  std::size_t rows_, cols_;
  FieldCtx<K> ctx_;
  std::vector<K> a_;
};

/// Row-reduces m in place to reduced row echelon form and returns the pivot
/// columns. Works over any exact field.
template <class K>
std::vector<std::size_t> rref_in_place(Matrix<K>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && is_zero(m.at(sel, col))) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(row, j));
    K inv = m.ctx().one() / m.at(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m.at(row, j) = inv * m.at(row, j);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || is_zero(m.at(i, col))) continue;
      K f = m.at(i, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        m.at(i, j) = m.at(i, j) - f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

namespace detail {

/// Clears denominators row by row; row scaling by positive integers preserves
/// rank and row space shape.
inline std::vector<std::vector<Int>> to_integer_rows(const Matrix<Rat>& m) {
  std::vector<std::vector<Int>> rows(m.rows(), std::vector<Int>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j)
      l = boost::multiprecision::lcm(l, rat_den(m.at(i, j)));
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rat& x = m.at(i, j);
      rows[i][j] = rat_num(x) * (l / rat_den(x));
    }
  }
  return rows;
}

/// One-step Bareiss elimination with row pivoting; mutates `a`. When
/// `need_det` the column order is not permuted (zero pivot column means
/// det 0); otherwise zero columns are skipped and the pivot count is the rank.
/// Exact divisions by the previous pivot follow from Sylvester's identity.
inline std::size_t bareiss(std::vector<std::vector<Int>>& a, bool need_det, Int* det_out) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  Int prev = 1;
  int sign = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t sel = rank;
    while (sel < rows && a[sel][col] == 0) ++sel;
    if (sel == rows) {
      if (need_det) {
        if (det_out) *det_out = 0;
        return rank;
      }
      continue;
    }
    if (sel != rank) {
      std::swap(a[sel], a[rank]);
      sign = -sign;
    }
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j)
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  if (need_det && det_out) *det_out = (rank == rows) ? Int(sign) * prev : Int(0);
  return rank;
}

}  // namespace detail

/// Rank over Q via fraction-free elimination on the denominator-cleared
/// integer matrix (keeps intermediate entries polynomially bounded).
inline std::size_t rank(const Matrix<Rat>& m) {
  auto a = detail::to_integer_rows(m);
  return detail::bareiss(a, false, nullptr);
}

inline std::size_t rank(const Matrix<Fp>& m) {
  Matrix<Fp> c = m;
  return rref_in_place(c).size();
}

/// Exact determinant; over Q it is recovered from the Bareiss pivot and the
/// denominator clearing factors.
inline Rat det(const Matrix<Rat>& m) {
  if (!m.is_square()) throw std::invalid_argument("det of non-square matrix");
  if (m.rows() == 0) return Rat(1);
  Rat scale(1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j)
      l = boost::multiprecision::lcm(l, rat_den(m.at(i, j)));
    scale *= Rat(Int(1), l);
  }
  auto a = detail::to_integer_rows(m);
  Int d = 0;
  detail::bareiss(a, true, &d);
  return scale * Rat(d);
}

inline Fp det(const Matrix<Fp>& m) {
  if (!m.is_square()) throw std::invalid_argument("det of non-square matrix");
  if (m.rows() == 0) return m.ctx().one();
  Matrix<Fp> c = m;
  Fp result = m.ctx().one();
  std::size_t n = c.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && c.at(sel, col).is_zero()) ++sel;
    if (sel == n) return m.ctx().zero();
    if (sel != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(c.at(sel, j), c.at(col, j));
      result = -result;
    }
    result *= c.at(col, col);
    Fp inv = c.at(col, col).inverse();
    for (std::size_t i = col + 1; i < n; ++i) {
      if (c.at(i, col).is_zero()) continue;
      Fp f = c.at(i, col) * inv;
      for (std::size_t j = col; j < n; ++j) c.at(i, j) -= f * c.at(col, j);
    }
  }
  return result;
}

template <class K>
bool is_invertible(const Matrix<K>& m) {
  return m.is_square() && !is_zero(det(m));
}

/// Basis of the right kernel {x : m x = 0}, one vector per free column.
template <class K>
std::vector<std::vector<K>> nullspace(const Matrix<K>& m) {
  Matrix<K> r = m;
  std::vector<std::size_t> pivots = rref_in_place(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<K>> basis;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    std::vector<K> v(m.cols(), m.ctx().zero());
    v[j] = m.ctx().one();
    for (std::size_t i = 0; i < pivots.size(); ++i)
      v[pivots[i]] = m.ctx().zero() - r.at(i, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class K>
struct LinearSolution {
  std::vector<K> particular;
  std::vector<std::vector<K>> kernel;
};

/// Solves A x = b exactly; returns nullopt when inconsistent.
template <class K>
std::optional<LinearSolution<K>> solve_linear_system(const Matrix<K>& a,
                                                     const std::vector<K>& b) {
  assert(b.size() == a.rows());
  Matrix<K> aug(a.rows(), a.cols() + 1, a.ctx());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<std::size_t> pivots = rref_in_place(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
  LinearSolution<K> sol;
  sol.particular.assign(a.cols(), a.ctx().zero());
  for (std::size_t i = 0; i < pivots.size(); ++i)
    sol.particular[pivots[i]] = aug.at(i, a.cols());
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (is_pivot[j]) continue;
    std::vector<K> v(a.cols(), a.ctx().zero());
    v[j] = a.ctx().one();
    for (std::size_t i = 0; i < pivots.size(); ++i)
      v[pivots[i]] = a.ctx().zero() - aug.at(i, j);
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

template <class K>
Matrix<K> inverse(const Matrix<K>& m) {
  if (!m.is_square()) throw std::invalid_argument("inverse: matrix is not square");
  const std::size_t n = m.rows();
  Matrix<K> aug(n, 2 * n, m.ctx());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = m.ctx().one();
  }
  std::vector<std::size_t> pivots = rref_in_place(aug);
  if (pivots.size() != n || (n > 0 && pivots.back() != n - 1))
    throw std::invalid_argument("inverse: matrix is singular");
  Matrix<K> inv(n, n, m.ctx());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

/// Block diagonal [a 0; 0 b].
template <class K>
Matrix<K> direct_sum_matrix(const Matrix<K>& a, const Matrix<K>& b) {
  Matrix<K> c(a.rows() + b.rows(), a.cols() + b.cols(), a.ctx());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) c.at(a.rows() + i, a.cols() + j) = b.at(i, j);
  return c;
}

/// Random matrix with entries in [-3, 3], resampled until invertible.
/// The singular locus has measure zero, so rejection terminates fast; the
/// attempt cap only guards against misuse (n = 0 is vacuously invertible).
inline Matrix<Rat> random_invertible(std::size_t n, Rng& rng) {
  FieldCtx<Rat> ctx;
  for (int attempt = 0; attempt < 256; ++attempt) {
    Matrix<Rat> m(n, n, ctx);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) = ctx.from_int(rng.uniform(-3, 3));
    if (n == 0 || !is_zero(det(m))) return m;
  }
  throw DomainError("random_invertible: failed to draw an invertible matrix");
}

template <class K>
std::string matrix_to_string(const Matrix<K>& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? "; " : "";
    for (std::size_t j = 0; j < m.cols(); ++j)
      s += (j ? ", " : "") + scalar_to_string(m.at(i, j));
  }
  return s + "]";
}

}  // namespace biserial
