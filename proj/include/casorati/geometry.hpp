#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/expr.hpp"
#include "casorati/linalg.hpp"

namespace casorati::geometry {

using numkit::Jet;
using numkit::JetMat;
using numkit::JetVec;
using numkit::Mat;
using numkit::SymMatrix;
using numkit::Vec;

/// Symmetric matrix of expressions over a coordinate chart; only the upper
/// triangle is stored, evaluation mirrors it.
class MetricField {
public:
  MetricField() = default;
  MetricField(std::vector<std::string> coords, std::map<std::pair<int, int>, expr::Expr> upper)
      : coords_(std::move(coords)), upper_(std::move(upper)) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::map<std::pair<int, int>, expr::Expr>& entries() const { return upper_; }

  /// Evaluate all entries on a jet environment (one jet per coordinate).
  JetMat eval(const std::map<std::string, Jet>& env) const {
    const int n = dim();
    const Jet& any = env.begin()->second;
    JetMat g(n, n, Jet::constant(0.0, any.vars(), any.order()));
    for (const auto& [ij, e] : upper_) {
      Jet v = e.eval(env);
      g(ij.first, ij.second) = v;
      if (ij.first != ij.second) g(ij.second, ij.first) = v;
    }
    return g;
  }

  SymMatrix eval_values(const std::map<std::string, double>& env) const {
    const int n = dim();
    SymMatrix g(n);
    for (const auto& [ij, e] : upper_) {
      const double v = e.eval_value(env);
      g(ij.first, ij.second) = v;
      g(ij.second, ij.first) = v;
    }
    return g;
  }

private:
  std::vector<std::string> coords_;
  std::map<std::pair<int, int>, expr::Expr> upper_;
};

/// Christoffel symbols of the Levi-Civita connection,
/// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}),
/// carried as jets one derivative order below the metric entries.
class Christoffel {
public:
  Christoffel() = default;
  Christoffel(int n, std::vector<Jet> data) : n_(n), data_(std::move(data)) {}

  static Christoffel compute(const JetMat& g, const JetMat& g_inv) {
    const int n = g.rows();
    std::vector<std::vector<Jet>> dg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      dg[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(n) * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) dg[static_cast<std::size_t>(i)].push_back(g(a, b).derive(i));
    }
    auto dgat = [&](int i, int a, int b) -> const Jet& {
      return dg[static_cast<std::size_t>(i)][static_cast<std::size_t>(a) * n + b];
    };
    const int order = dgat(0, 0, 0).order();
    const int nvars = dgat(0, 0, 0).vars();
    // g_inv carries one more order than dg; truncation happens inside products.
    std::vector<Jet> out(static_cast<std::size_t>(n) * n * n, Jet::constant(0.0, nvars, order));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet acc = Jet::constant(0.0, nvars, order);
          for (int l = 0; l < n; ++l)
            acc = acc + g_inv(k, l).truncated(order) *
                            (dgat(i, j, l) + dgat(j, i, l) - dgat(l, i, j));
          acc = acc * 0.5;
          out[index(n, k, i, j)] = acc;
          out[index(n, k, j, i)] = acc;
        }
    return Christoffel(n, std::move(out));
  }

  int dim() const { return n_; }
  const Jet& at(int k, int i, int j) const { return data_[index(n_, k, i, j)]; }
  double value(int k, int i, int j) const { return at(k, i, j).value(); }

private:
  static std::size_t index(int n, int k, int i, int j) {
    return (static_cast<std::size_t>(k) * n + i) * n + j;
  }

  int n_ = 0;
  std::vector<Jet> data_;
};

/// Fully lowered Riemann tensor values at a point, convention
/// R(X,Y,Z,W) = g(∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z, W), pinned so that a
/// space of constant sectional curvature c has
/// R(Z1,Z2)Z3 = c {g(Z2,Z3) Z1 − g(Z1,Z3) Z2}.
struct CurvaturePack {
  int n = 0;
  Vec point;
  std::vector<double> gamma;        // Gamma^k_{ij} values, k*n*n + i*n + j
  std::vector<double> riemann_low;  // R_{ijkl}, ((i*n+j)*n+k)*n+l
  double scalar2tau = 0.0;          // sum_{ij} R(e_i, e_j, e_j, e_i), orthonormal

  double gamma_at(int k, int i, int j) const {
    return gamma[(static_cast<std::size_t>(k) * n + i) * n + j];
  }
  double rlow(int i, int j, int k, int l) const {
    return riemann_low[((static_cast<std::size_t>(i) * n + j) * static_cast<std::size_t>(n) + k) * n + l];
  }

  /// R(X,Y,Z,W) for coordinate-component vectors.
  double contract(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (x[static_cast<std::size_t>(i)] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        if (y[static_cast<std::size_t>(j)] == 0.0) continue;
        const double xy = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
        for (int k = 0; k < n; ++k) {
          if (z[static_cast<std::size_t>(k)] == 0.0) continue;
          const double xyz = xy * z[static_cast<std::size_t>(k)];
          for (int l = 0; l < n; ++l)
            acc += xyz * w[static_cast<std::size_t>(l)] * rlow(i, j, k, l);
        }
      }
    }
    return acc;
  }
};

inline CurvaturePack riemann(const JetMat& g, const JetMat& g_inv, const Christoffel& gamma,
                             const Vec& point) {
  const int n = g.rows();
  CurvaturePack pack;
  pack.n = n;
  pack.point = point;
  pack.gamma.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pack.gamma[(static_cast<std::size_t>(k) * n + i) * n + j] = gamma.value(k, i, j);

  // R^m_{kij} = d_i Gamma^m_{jk} - d_j Gamma^m_{ik}
  //           + Gamma^m_{il} Gamma^l_{jk} - Gamma^m_{jl} Gamma^l_{ik}
  std::vector<double> up(static_cast<std::size_t>(n) * n * n * n, 0.0);
  auto upat = [&](int m, int k, int i, int j) -> double& {
    return up[((static_cast<std::size_t>(m) * n + k) * static_cast<std::size_t>(n) + i) * n + j];
  };
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = gamma.at(m, j, k).d(i) - gamma.at(m, i, k).d(j);
          for (int l = 0; l < n; ++l)
            v += gamma.value(m, i, l) * gamma.value(l, j, k) -
                 gamma.value(m, j, l) * gamma.value(l, i, k);
          upat(m, k, i, j) = v;
        }

  pack.riemann_low.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  const Mat gv = g.values();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += gv(m, l) * upat(m, k, i, j);
          pack.riemann_low[((static_cast<std::size_t>(i) * n + j) * static_cast<std::size_t>(n) + k) * n + l] = v;
        }

  // scalar curvature (the "2 tau" convention): g^{ab} g^{jk} R_{a j k b}
  const Mat gi = g_inv.values();
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          s += gi(a, b) * gi(j, k) * pack.rlow(a, j, k, b);
  pack.scalar2tau = s;
  return pack;
}

inline double sectional(const CurvaturePack& pack, const SymMatrix& g_at_p, const Vec& u,
                        const Vec& v) {
  const int n = pack.n;
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      uu += u[static_cast<std::size_t>(i)] * g_at_p(i, j) * u[static_cast<std::size_t>(j)];
      vv += v[static_cast<std::size_t>(i)] * g_at_p(i, j) * v[static_cast<std::size_t>(j)];
      uv += u[static_cast<std::size_t>(i)] * g_at_p(i, j) * v[static_cast<std::size_t>(j)];
    }
  const double denom = uu * vv - uv * uv;
  if (std::abs(denom) < 1e-14)
    throw std::domain_error("sectional: degenerate plane");
  return pack.contract(u, v, v, u) / denom;
}

// -------- residual diagnostics --------

/// max |d_k g_ij - Gamma^l_{ki} g_lj - Gamma^l_{kj} g_il|
inline double metric_compat_residual(const JetMat& g, const Christoffel& gamma) {
  const int n = g.rows();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double r = g(i, j).d(k);
        for (int l = 0; l < n; ++l)
          r -= gamma.value(l, k, i) * g(l, j).value() + gamma.value(l, k, j) * g(i, l).value();
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

inline double riemann_symmetry_residual(const CurvaturePack& p) {
  double worst = 0.0;
  const int n = p.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double r = p.rlow(i, j, k, l);
          worst = std::max(worst, std::abs(r + p.rlow(j, i, k, l)));
          worst = std::max(worst, std::abs(r + p.rlow(i, j, l, k)));
          worst = std::max(worst, std::abs(r - p.rlow(k, l, i, j)));
        }
  return worst;
}

inline double bianchi_residual(const CurvaturePack& p) {
  double worst = 0.0;
  const int n = p.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          worst = std::max(worst, std::abs(p.rlow(i, j, k, l) + p.rlow(j, k, i, l) + p.rlow(k, i, j, l)));
  return worst;
}

}  // namespace casorati::geometry
