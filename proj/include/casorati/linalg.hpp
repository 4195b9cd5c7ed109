#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/jet.hpp"

namespace casorati::numkit {

using Vec = std::vector<double>;

/// Dense row-major double matrix.  Dimensions stay small (<= ~12) so all
/// algorithms are plain unblocked loops.
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

private:
  int rows_ = 0, cols_ = 0;
  Vec data_;
};

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

inline Vec matvec(const Mat& a, const Vec& x) {
  Vec r(static_cast<std::size_t>(a.rows()), 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r[static_cast<std::size_t>(i)] += a(i, j) * x[static_cast<std::size_t>(j)];
  return r;
}

inline Mat inverse(Mat a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::logic_error("inverse: square matrix required");
  Mat inv = Mat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-14)
      throw std::domain_error("inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const double d = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Symmetric matrix with a positive-definiteness probe (pivoted LDL^T).
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : m_(dim, dim) {}
  explicit SymMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::logic_error("SymMatrix: square required");
  }

  int dim() const { return m_.rows(); }
  double& operator()(int i, int j) { return m_(i, j); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Mat& mat() const { return m_; }

  double symmetry_defect() const {
    double w = 0.0;
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) w = std::max(w, std::abs(m_(i, j) - m_(j, i)));
    return w;
  }

  bool is_positive_definite(double tol = 1e-12) const {
    const int n = dim();
    Mat a = m_;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int r = k + 1; r < n; ++r)
        if (a(r, r) > a(piv, piv)) piv = r;
      if (piv != k) {
        for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
        for (int i = 0; i < n; ++i) std::swap(a(i, piv), a(i, k));
      }
      if (a(k, k) <= tol) return false;
      for (int i = k + 1; i < n; ++i) {
        const double f = a(i, k) / a(k, k);
        for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        for (int j = 0; j < n; ++j) a(j, i) = a(i, j);  // keep trailing block symmetric
      }
    }
    return true;
  }

private:
  Mat m_;
};

/// Dense matrix of jets, row-major.
class JetMat {
public:
  JetMat() = default;
  JetMat(int rows, int cols, const Jet& fill)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static JetMat identity(int n, int nvars, int order) {
    JetMat m(n, n, Jet::constant(0.0, nvars, order));
    for (int i = 0; i < n; ++i) m(i, i) = Jet::constant(1.0, nvars, order);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Jet& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Jet& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  JetMat transposed() const {
    JetMat t(cols_, rows_, data_.empty() ? Jet() : data_[0]);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat values() const {
    Mat v(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) v(i, j) = (*this)(i, j).value();
    return v;
  }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<Jet> data_;
};

inline JetMat matmul(const JetMat& a, const JetMat& b) {
  if (a.cols() != b.rows()) throw std::logic_error("jet matmul: shape mismatch");
  const Jet zero = Jet::constant(0.0, a(0, 0).vars(), a(0, 0).order());
  JetMat r(a.rows(), b.cols(), zero);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k)
      for (int j = 0; j < b.cols(); ++j) r(i, j) = r(i, j) + a(i, k) * b(k, j);
  return r;
}

inline JetMat inverse(JetMat a) {
  const int n = a.rows();
  if (n != a.cols()) throw std::logic_error("jet inverse: square matrix required");
  JetMat inv = JetMat::identity(n, a(0, 0).vars(), a(0, 0).order());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
    if (std::abs(a(piv, col).value()) < 1e-14)
      throw std::domain_error("jet inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Jet d = reciprocal(a(col, col));
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * d;
      inv(col, j) = inv(col, j) * d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a(r, col);
      if (f.value() == 0.0 && f.is_constant()) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

using JetVec = std::vector<Jet>;

inline Jet dot(const JetVec& u, const JetMat& g, const JetVec& v) {
  Jet acc = Jet::constant(0.0, u[0].vars(), u[0].order());
  const int n = static_cast<int>(u.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc = acc + u[static_cast<std::size_t>(i)] * g(i, j) * v[static_cast<std::size_t>(j)];
  return acc;
}

inline JetVec apply(const JetMat& m, const JetVec& v) {
  JetVec r(static_cast<std::size_t>(m.rows()), Jet::constant(0.0, v[0].vars(), v[0].order()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] + m(i, j) * v[static_cast<std::size_t>(j)];
  return r;
}

struct GramSchmidtError : std::runtime_error {
  int column;
  explicit GramSchmidtError(int col)
      : std::runtime_error("gram_schmidt: rank deficiency at column " + std::to_string(col)),
        column(col) {}
};

/// Classical Gram-Schmidt against the inner product defined by `inner`.
/// Columns are processed in the order given; no pivoting, so the caller
/// controls the resulting frame ordering.
inline std::vector<JetVec> gram_schmidt(const std::vector<JetVec>& columns,
                                        const JetMat& inner,
                                        double rank_tol = 1e-10) {
  std::vector<JetVec> out;
  out.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    JetVec v = columns[c];
    for (const JetVec& e : out) {
      const Jet proj = dot(e, inner, v);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = v[k] - proj * e[k];
    }
    Jet nrm2 = dot(v, inner, v);
    if (nrm2.value() < rank_tol * rank_tol)
      throw GramSchmidtError(static_cast<int>(c));
    Jet inv_nrm = reciprocal(sqrt(nrm2));
    for (Jet& x : v) x = x * inv_nrm;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace casorati::numkit
