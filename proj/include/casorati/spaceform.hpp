#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/expr.hpp"
#include "casorati/submersion.hpp"

namespace casorati::thm {

using numkit::Jet;
using numkit::Mat;
using numkit::SymMatrix;
using numkit::Vec;
using subm::AdaptedFrame;
using subm::Projectors;

enum class SpaceFormKind {
  Generic,
  Real,
  Complex,
  GeneralizedSasakian,
  Sasakian,
  Kenmotsu,
  Cosymplectic,
  CAlpha,
  WarpedGssf,  // warped product R x_f C^m; constants derived from the warp
};

inline std::string kind_name(SpaceFormKind k) {
  switch (k) {
    case SpaceFormKind::Generic: return "generic";
    case SpaceFormKind::Real: return "real";
    case SpaceFormKind::Complex: return "complex";
    case SpaceFormKind::GeneralizedSasakian: return "generalized_sasakian";
    case SpaceFormKind::Sasakian: return "sasakian";
    case SpaceFormKind::Kenmotsu: return "kenmotsu";
    case SpaceFormKind::Cosymplectic: return "cosymplectic";
    case SpaceFormKind::CAlpha: return "c_alpha";
    case SpaceFormKind::WarpedGssf: return "warped_gssf";
  }
  return "?";
}

/// Structure tensors evaluated at a point: the (1,1) tensor as a matrix of
/// coordinate components, plus the Reeb field and its covector for contact
/// kinds.
struct StructureAtPoint {
  Mat phi;        // phi^k_l (or J)
  Vec xi;         // vector components; empty for complex structures
  Vec eta;        // covector components; empty for complex structures
  bool contact = false;
};

/// Space-form declaration: kind plus parameter expressions.  Table-style
/// contact kinds reduce to generalized Sasakian constants (c1, c2, c3); the
/// warped kind derives them from the warp function f as
/// (f'^2/f^2, 0, -f'^2/f^2 + f''/f) evaluated pointwise.
struct SpaceFormModel {
  SpaceFormKind kind = SpaceFormKind::Generic;
  std::optional<expr::Expr> c;      // real / complex / table kinds
  std::optional<expr::Expr> alpha;  // c_alpha
  std::optional<expr::Expr> c1, c2, c3;
  std::optional<expr::Expr> warp;   // warped_gssf
  std::string warp_coord;

  bool has_structure() const {
    return kind != SpaceFormKind::Generic && kind != SpaceFormKind::Real;
  }
};

struct GssfConstants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

/// Evaluate the declared space-form constants at a point.
inline GssfConstants gssf_constants(const SpaceFormModel& m,
                                    const std::map<std::string, double>& env,
                                    const std::map<std::string, Jet>& jet_env) {
  GssfConstants k;
  auto cval = [&](const std::optional<expr::Expr>& e) {
    return e ? e->eval_value(env) : 0.0;
  };
  switch (m.kind) {
    case SpaceFormKind::Generic:
      break;
    case SpaceFormKind::Real:
      k.c1 = cval(m.c);
      break;
    case SpaceFormKind::Complex:
      k.c1 = cval(m.c) / 4.0;
      k.c2 = cval(m.c) / 4.0;
      break;
    case SpaceFormKind::GeneralizedSasakian:
      k.c1 = cval(m.c1);
      k.c2 = cval(m.c2);
      k.c3 = cval(m.c3);
      break;
    case SpaceFormKind::Sasakian:
      k.c1 = (cval(m.c) + 3.0) / 4.0;
      k.c2 = k.c3 = (cval(m.c) - 1.0) / 4.0;
      break;
    case SpaceFormKind::Kenmotsu:
      k.c1 = (cval(m.c) - 3.0) / 4.0;
      k.c2 = k.c3 = (cval(m.c) + 1.0) / 4.0;
      break;
    case SpaceFormKind::Cosymplectic:
      k.c1 = cval(m.c) / 4.0;
      k.c2 = k.c3 = cval(m.c) / 4.0;
      break;
    case SpaceFormKind::CAlpha: {
      const double a = cval(m.alpha);
      k.c1 = (cval(m.c) + 3.0 * a * a) / 4.0;
      k.c2 = k.c3 = (cval(m.c) - a * a) / 4.0;
      break;
    }
    case SpaceFormKind::WarpedGssf: {
      if (!m.warp) throw std::invalid_argument("warped_gssf: missing warp expression");
      const Jet f = m.warp->eval(jet_env);
      // only the warp coordinate direction carries derivatives
      double fp = 0.0, fpp = 0.0;
      for (int i = 0; i < f.vars(); ++i) {
        fp += f.d(i);
        fpp += f.d2(i, i);
      }
      const double fv = f.value();
      k.c1 = fp * fp / (fv * fv);
      k.c2 = 0.0;
      k.c3 = -fp * fp / (fv * fv) + fpp / fv;
      break;
    }
  }
  return k;
}

/// Closed-form model curvature R(Z1, Z2) Z3, per kind:
///   real:     c { g23 Z1 − g13 Z2 }
///   complex:  + c/4 hermitian block with J
///   contact:  c1/c2/c3 blocks with (phi, xi, eta)
/// All contractions use the metric values at the point.
inline Vec model_curvature(const SpaceFormModel& model, const GssfConstants& k,
                           const std::optional<StructureAtPoint>& st, const SymMatrix& g,
                           const Vec& z1, const Vec& z2, const Vec& z3) {
  const int n = g.dim();
  auto ip = [&](const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(i)] * g(i, j) * b[static_cast<std::size_t>(j)];
    return acc;
  };
  auto axpy = [&](Vec& out, double c, const Vec& v) {
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += c * v[static_cast<std::size_t>(i)];
  };

  Vec r(static_cast<std::size_t>(n), 0.0);
  const double g23 = ip(z2, z3), g13 = ip(z1, z3);
  axpy(r, k.c1 * g23, z1);
  axpy(r, -k.c1 * g13, z2);

  const bool needs_structure =
      model.kind == SpaceFormKind::Complex || (model.has_structure() && k.c2 != 0.0) ||
      (st && st->contact);
  if (model.kind != SpaceFormKind::Real && model.kind != SpaceFormKind::Generic) {
    if (!st) {
      if (needs_structure)
        throw std::invalid_argument("model_curvature: structure tensor required for kind " +
                                    kind_name(model.kind));
      return r;
    }
    auto phi_apply = [&](const Vec& v) {
      Vec out(static_cast<std::size_t>(n), 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i)] += st->phi(i, j) * v[static_cast<std::size_t>(j)];
      return out;
    };
    const Vec p1 = phi_apply(z1), p2 = phi_apply(z2), p3 = phi_apply(z3);
    axpy(r, k.c2 * ip(z1, p3), p2);
    axpy(r, -k.c2 * ip(z2, p3), p1);
    axpy(r, 2.0 * k.c2 * ip(z1, p2), p3);

    if (st->contact && k.c3 != 0.0) {
      auto eta_of = [&](const Vec& v) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += st->eta[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        return acc;
      };
      const double e1 = eta_of(z1), e2 = eta_of(z2), e3 = eta_of(z3);
      axpy(r, k.c3 * e1 * e3, z2);
      axpy(r, -k.c3 * e2 * e3, z1);
      axpy(r, k.c3 * ip(z1, z3) * e2, st->xi);
      axpy(r, -k.c3 * ip(z2, z3) * e1, st->xi);
    }
  }
  return r;
}

inline double model_curvature_low(const SpaceFormModel& model, const GssfConstants& k,
                                  const std::optional<StructureAtPoint>& st, const SymMatrix& g,
                                  const Vec& z1, const Vec& z2, const Vec& z3, const Vec& z4) {
  const Vec rz = model_curvature(model, k, st, g, z1, z2, z3);
  double acc = 0.0;
  const int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += rz[static_cast<std::size_t>(i)] * g(i, j) * z4[static_cast<std::size_t>(j)];
  return acc;
}

inline double eta_component(const StructureAtPoint& st, int i) {
  return st.contact ? st.eta[static_cast<std::size_t>(i)] : 0.0;
}

/// Numerical validity probe for the structure tensors at a point.
struct StructureCheck {
  double square_residual = 0.0;      // J² + I  or  phi² + I − xi⊗eta
  double compat_residual = 0.0;      // g(phiX, phiY) − g(X,Y) + eta(X)eta(Y)
  double eta_xi_residual = 0.0;      // |eta(xi) − 1|
};

inline StructureCheck check_structure(const StructureAtPoint& st, const SymMatrix& g) {
  StructureCheck out;
  const int n = g.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double sq = 0.0;
      for (int m = 0; m < n; ++m) sq += st.phi(i, m) * st.phi(m, j);
      double want = -(i == j ? 1.0 : 0.0);
      if (st.contact) want += st.xi[static_cast<std::size_t>(i)] * st.eta[static_cast<std::size_t>(j)];
      out.square_residual = std::max(out.square_residual, std::abs(sq - want));
    }
  // compatibility on the coordinate basis
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double gphi = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gphi += st.phi(i, a) * g(i, j) * st.phi(j, b);
      double want = g(a, b);
      if (st.contact) want -= eta_component(st, a) * eta_component(st, b);
      out.compat_residual = std::max(out.compat_residual, std::abs(gphi - want));
    }
  if (st.contact) {
    double exi = 0.0;
    for (int i = 0; i < n; ++i) exi += st.eta[static_cast<std::size_t>(i)] * st.xi[static_cast<std::size_t>(i)];
    out.eta_xi_residual = std::abs(exi - 1.0);
  }
  return out;
}

enum class XiPosition { None, Vertical, Horizontal, Oblique };

inline std::string xi_position_name(XiPosition p) {
  switch (p) {
    case XiPosition::None: return "none";
    case XiPosition::Vertical: return "vertical";
    case XiPosition::Horizontal: return "horizontal";
    case XiPosition::Oblique: return "oblique";
  }
  return "?";
}

/// Norms of the P/Q decomposition of the structure tensor against the
/// vertical/horizontal splitting, the Reeb position, and pointwise slant
/// angle estimates for the vertical distribution.
struct StructureQuantities {
  double normP_sq = 0.0;    // Σ_i |P h_i|², P = horizontal part of phi
  double normQ_sq = 0.0;    // Σ_i |Q v_i|², Q = vertical part of phi
  double normPV_sq = 0.0;   // Σ_i |P v_i|²
  XiPosition xi_position = XiPosition::None;
  std::vector<double> slant_angles;  // pointwise angles of phi(v_i) against the vertical space
};

inline StructureQuantities structure_quantities(const StructureAtPoint& st, const AdaptedFrame& frame,
                                                const SymMatrix& g, const Projectors& proj) {
  StructureQuantities q;
  const int n = g.dim();
  const Mat pv = proj.Pv.values();
  const Mat ph = proj.Ph.values();

  auto ip = [&](const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(i)] * g(i, j) * b[static_cast<std::size_t>(j)];
    return acc;
  };
  auto tovec = [&](const numkit::JetVec& jv) {
    Vec c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = jv[static_cast<std::size_t>(i)].value();
    return c;
  };
  auto phi_apply = [&](const Vec& v) {
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i)] += st.phi(i, j) * v[static_cast<std::size_t>(j)];
    return out;
  };
  auto project = [&](const Mat& p, const Vec& v) {
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i)] += p(i, j) * v[static_cast<std::size_t>(j)];
    return out;
  };

  for (const auto& vj : frame.vertical) {
    const Vec v = tovec(vj);
    const Vec phiv = phi_apply(v);
    const Vec Q = project(pv, phiv);
    const Vec P = project(ph, phiv);
    q.normQ_sq += ip(Q, Q);
    q.normPV_sq += ip(P, P);
    const double total = ip(phiv, phiv);
    if (total > 1e-16) {
      double c2 = ip(Q, Q) / total;
      c2 = std::min(1.0, std::max(0.0, c2));
      q.slant_angles.push_back(std::acos(std::sqrt(c2)));
    }
  }
  for (const auto& hi : frame.horizontal) {
    const Vec h = tovec(hi);
    const Vec phih = phi_apply(h);
    const Vec P = project(ph, phih);
    q.normP_sq += ip(P, P);
  }

  if (st.contact) {
    const Vec xiv = st.xi;
    const double nrm = std::sqrt(std::max(ip(xiv, xiv), 1e-300));
    const Vec xh = project(ph, xiv);
    const Vec xv = project(pv, xiv);
    const double nh = std::sqrt(ip(xh, xh)), nv = std::sqrt(ip(xv, xv));
    if (nh < 1e-8 * nrm)
      q.xi_position = XiPosition::Vertical;
    else if (nv < 1e-8 * nrm)
      q.xi_position = XiPosition::Horizontal;
    else
      q.xi_position = XiPosition::Oblique;
  }
  return q;
}

/// Ambient scalar contractions of the model curvature over the adapted
/// frame (the "model" counterparts of tau_V_N1, tau_H_N1 and the mixed sum).
struct ModelContractions {
  double two_tau_V = 0.0;
  double two_tau_H = 0.0;
  double mixed_sum = 0.0;
};

inline ModelContractions model_contractions(const SpaceFormModel& model, const GssfConstants& k,
                                            const std::optional<StructureAtPoint>& st,
                                            const SymMatrix& g, const AdaptedFrame& frame) {
  ModelContractions out;
  const int n = g.dim();
  auto tovec = [&](const numkit::JetVec& jv) {
    Vec c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = jv[static_cast<std::size_t>(i)].value();
    return c;
  };
  std::vector<Vec> v, h;
  for (const auto& x : frame.vertical) v.push_back(tovec(x));
  for (const auto& x : frame.horizontal) h.push_back(tovec(x));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (i != j) out.two_tau_V += model_curvature_low(model, k, st, g, v[i], v[j], v[j], v[i]);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      if (i != j) out.two_tau_H += model_curvature_low(model, k, st, g, h[i], h[j], h[j], h[i]);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      out.mixed_sum += model_curvature_low(model, k, st, g, h[i], v[j], v[j], h[i]);
  return out;
}

}  // namespace casorati::thm
