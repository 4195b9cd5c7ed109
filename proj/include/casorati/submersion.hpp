#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/geometry.hpp"
#include "casorati/linalg.hpp"

namespace casorati::subm {

using geometry::Christoffel;
using geometry::CurvaturePack;
using numkit::Jet;
using numkit::JetMat;
using numkit::JetVec;
using numkit::Mat;
using numkit::SymMatrix;
using numkit::Vec;

struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PivotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vertical and horizontal projector fields,
/// P_h = g^{-1} J^T (J g^{-1} J^T)^{-1} J with J = dF, P_v = I - P_h.
struct Projectors {
  JetMat Pv, Ph;
};

inline Projectors projectors(const JetMat& g_inv, const JetMat& dF, double rank_tol = 1e-8) {
  const int n = g_inv.rows();
  const int n2 = dF.rows();
  JetMat A = numkit::matmul(g_inv, dF.transposed());  // n x n2
  JetMat M = numkit::matmul(dF, A);                   // n2 x n2
  {
    // rank probe on values before the jet inverse
    Mat mv = M.values();
    for (int k = 0; k < n2; ++k) {
      double pivot = 0.0;
      for (int i = 0; i < n2; ++i) pivot = std::max(pivot, std::abs(mv(i, k)));
      if (pivot < rank_tol) throw RankError("projectors: dF is rank deficient");
    }
  }
  JetMat Minv;
  try {
    Minv = numkit::inverse(M);
  } catch (const std::domain_error&) {
    throw RankError("projectors: dF is rank deficient");
  }
  JetMat Ph = numkit::matmul(numkit::matmul(A, Minv), dF);
  JetMat Pv = JetMat::identity(n, Ph(0, 0).vars(), Ph(0, 0).order());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Pv(i, j) = Pv(i, j) - Ph(i, j);
  return {std::move(Pv), std::move(Ph)};
}

/// g1-orthonormal frames adapted to the splitting: `vertical` spans ker dF,
/// `horizontal` its orthogonal complement.  Coefficients are jets so the
/// frame acts as a smooth field near the anchor point (pivot selection is
/// frozen at the anchor).
struct AdaptedFrame {
  int n = 0, ell = 0, s = 0;
  std::vector<JetVec> vertical;
  std::vector<JetVec> horizontal;
  std::vector<int> vertical_pivots;
  std::vector<int> horizontal_pivots;
};

struct FramePivots {
  std::vector<int> vertical;
  std::vector<int> horizontal;
};

namespace detail {

inline std::vector<JetVec> projected_columns(const JetMat& P) {
  std::vector<JetVec> cols;
  for (int k = 0; k < P.cols(); ++k) {
    JetVec c;
    c.reserve(static_cast<std::size_t>(P.rows()));
    for (int i = 0; i < P.rows(); ++i) c.push_back(P(i, k));
    cols.push_back(std::move(c));
  }
  return cols;
}

/// Greedy pivoted orthonormalization: at each step pick the unused projected
/// coordinate direction with the largest residual g-norm (ties resolved by
/// lowest coordinate index), then orthonormalize.  Returns the frame and the
/// chosen coordinate indices.
inline std::pair<std::vector<JetVec>, std::vector<int>> greedy_frame(
    const std::vector<JetVec>& candidates, const JetMat& g, int count,
    const std::vector<int>* pinned, double pivot_tol = 1e-8) {
  std::vector<JetVec> frame;
  std::vector<int> order;
  std::vector<JetVec> work = candidates;

  auto orthogonalize = [&](JetVec v) {
    for (const JetVec& e : frame) {
      Jet proj = numkit::dot(e, g, v);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = v[k] - proj * e[k];
    }
    return v;
  };

  if (pinned) {
    if (static_cast<int>(pinned->size()) != count)
      throw PivotError("frame pivots: wrong pivot count");
    for (int k : *pinned) {
      JetVec v = orthogonalize(work[static_cast<std::size_t>(k)]);
      Jet n2 = numkit::dot(v, g, v);
      if (n2.value() < pivot_tol * pivot_tol)
        throw PivotError("frame pivots: pinned column " + std::to_string(k) + " is degenerate");
      Jet inv = numkit::reciprocal(numkit::sqrt(n2));
      for (Jet& x : v) x = x * inv;
      frame.push_back(std::move(v));
      order.push_back(k);
    }
    return {frame, order};
  }

  std::vector<bool> used(work.size(), false);
  for (int step = 0; step < count; ++step) {
    int best = -1;
    double best_norm2 = 0.0;
    JetVec best_vec;
    for (std::size_t k = 0; k < work.size(); ++k) {
      if (used[k]) continue;
      JetVec v = orthogonalize(work[k]);
      const double n2 = numkit::dot(v, g, v).value();
      if (n2 > best_norm2 + 1e-15) {
        best_norm2 = n2;
        best = static_cast<int>(k);
        best_vec = std::move(v);
      }
    }
    if (best < 0 || best_norm2 < pivot_tol * pivot_tol)
      throw PivotError("frame pivots: all candidate norms below threshold");
    Jet n2 = numkit::dot(best_vec, g, best_vec);
    Jet inv = numkit::reciprocal(numkit::sqrt(n2));
    for (Jet& x : best_vec) x = x * inv;
    frame.push_back(std::move(best_vec));
    order.push_back(best);
    used[static_cast<std::size_t>(best)] = true;
  }
  return {frame, order};
}

}  // namespace detail

inline AdaptedFrame build_adapted_frame(const JetMat& g, const Projectors& proj, int ell, int s,
                                        const std::optional<FramePivots>& pivots = std::nullopt) {
  AdaptedFrame f;
  f.n = g.rows();
  f.ell = ell;
  f.s = s;
  auto vcands = detail::projected_columns(proj.Pv);
  auto hcands = detail::projected_columns(proj.Ph);
  const std::vector<int>* vp = pivots ? &pivots->vertical : nullptr;
  const std::vector<int>* hp = pivots ? &pivots->horizontal : nullptr;
  auto [vf, vo] = detail::greedy_frame(vcands, g, ell, vp);
  auto [hf, ho] = detail::greedy_frame(hcands, g, s, hp);
  f.vertical = std::move(vf);
  f.horizontal = std::move(hf);
  f.vertical_pivots = std::move(vo);
  f.horizontal_pivots = std::move(ho);
  return f;
}

/// (∇_X Y)^k = X^m (∂_m Y^k + Γ^k_{ml} Y^l); drops one derivative order.
inline JetVec covariant_derivative(const JetVec& X, const JetVec& Y, const Christoffel& gamma) {
  const int n = static_cast<int>(X.size());
  const int order = std::min(Y[0].order() - 1, X[0].order());
  JetVec out(static_cast<std::size_t>(n), Jet::constant(0.0, X[0].vars(), order));
  for (int k = 0; k < n; ++k) {
    Jet acc = Jet::constant(0.0, X[0].vars(), order);
    for (int m = 0; m < n; ++m) {
      Jet inner = Y[static_cast<std::size_t>(k)].derive(m);
      for (int l = 0; l < n; ++l)
        inner = inner + gamma.at(k, m, l) * Y[static_cast<std::size_t>(l)];
      acc = acc + X[static_cast<std::size_t>(m)] * inner;
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

inline double pair_values(const JetVec& u, const Mat& g_values, const JetVec& w) {
  double acc = 0.0;
  const int n = static_cast<int>(u.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      acc += u[static_cast<std::size_t>(i)].value() * g_values(i, j) * w[static_cast<std::size_t>(j)].value();
  return acc;
}

/// Flattened index helpers for the small block arrays below.
struct Block3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> v;
  Block3() = default;
  Block3(int a, int b, int c) : d0(a), d1(b), d2(c), v(static_cast<std::size_t>(a) * b * c, 0.0) {}
  double& at(int i, int j, int k) { return v[(static_cast<std::size_t>(i) * d1 + j) * d2 + k]; }
  double at(int i, int j, int k) const { return v[(static_cast<std::size_t>(i) * d1 + j) * d2 + k]; }
};

/// All O'Neill data at a point: raw covariant-derivative fields, component
/// blocks, norms, delta(N) and the quadratic/derivative terms entering the
/// mixed curvature identity.  Index order matches the component symbols:
///   T_H(i,j,a)      = g(T_{v_i} v_j, h_a)
///   A_raw(i,j,a)    = g(v ∇_{h_i} h_j, v_a)      (before skew projection)
///   A_V(i,j,a)      = skew part of A_raw
///   T_mixed(j,i,a)  = g(T_{v_j} h_i, v_a)
///   A_mixed_raw(i,j,b) = g(h ∇_{h_i} v_j, h_b)
struct ONeillData {
  int ell = 0, s = 0, n = 0;

  Block3 T_H, A_raw, A_V, T_mixed, A_mixed_raw, A_mixed;
  Vec trace_T;  // horizontal components, length s

  double normTH_sq = 0.0, normTV_sq = 0.0, normAV_sq = 0.0, normAH_sq = 0.0;
  double normAH_raw_sq = 0.0;
  double trace_T_sq = 0.0, trace_A_sq = 0.0, trace_A_raw_sq = 0.0;
  double sigma_max = 0.0;  // symmetric defect of A_raw; zero for honest Riemannian submersions

  double delta_N = 0.0;
  double nablaA_trace = 0.0;  // Σ g((∇_{v_j} A)(h_i,h_i), v_j)
  double A_quad = 0.0;        // Σ g(v_j, A_{A_{h_i} v_j} h_i), raw tensors

  double T_symmetry_residual = 0.0;
  double bracket_residual = 0.0;  // |A_V - (1/2) v[h_i,h_j]| worst component

  // jet fields retained for identity checks (order 1)
  std::vector<std::vector<JetVec>> Tfield;  // ell x ell, h-part of ∇_{v_i} v_j
  std::vector<std::vector<JetVec>> Afield;  // s x s, v-part of ∇_{h_i} h_j
  std::vector<std::vector<JetVec>> nabla_hv;  // s x ell, ∇_{h_i} v_j
  std::vector<std::vector<JetVec>> nabla_vh;  // ell x s, ∇_{v_j} h_i
};

inline ONeillData compute_oneill(const AdaptedFrame& frame, const Christoffel& gamma,
                                 const JetMat& g, const Projectors& proj) {
  ONeillData d;
  d.ell = frame.ell;
  d.s = frame.s;
  d.n = frame.n;
  const Mat gv = g.values();
  const int ell = d.ell, s = d.s;

  std::vector<std::vector<JetVec>> nabla_vv(static_cast<std::size_t>(ell));
  std::vector<std::vector<JetVec>> nabla_hh(static_cast<std::size_t>(s));
  d.nabla_hv.assign(static_cast<std::size_t>(s), {});
  d.nabla_vh.assign(static_cast<std::size_t>(ell), {});
  for (int i = 0; i < ell; ++i) {
    nabla_vv[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(ell));
    for (int j = 0; j < ell; ++j)
      nabla_vv[static_cast<std::size_t>(i)].push_back(covariant_derivative(
          frame.vertical[static_cast<std::size_t>(i)], frame.vertical[static_cast<std::size_t>(j)], gamma));
  }
  for (int i = 0; i < s; ++i) {
    nabla_hh[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j)
      nabla_hh[static_cast<std::size_t>(i)].push_back(covariant_derivative(
          frame.horizontal[static_cast<std::size_t>(i)], frame.horizontal[static_cast<std::size_t>(j)], gamma));
    d.nabla_hv[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(ell));
    for (int j = 0; j < ell; ++j)
      d.nabla_hv[static_cast<std::size_t>(i)].push_back(covariant_derivative(
          frame.horizontal[static_cast<std::size_t>(i)], frame.vertical[static_cast<std::size_t>(j)], gamma));
  }
  for (int j = 0; j < ell; ++j) {
    d.nabla_vh[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i)
      d.nabla_vh[static_cast<std::size_t>(j)].push_back(covariant_derivative(
          frame.vertical[static_cast<std::size_t>(j)], frame.horizontal[static_cast<std::size_t>(i)], gamma));
  }

  d.T_H = Block3(ell, ell, s);
  d.A_raw = Block3(s, s, ell);
  d.A_V = Block3(s, s, ell);
  d.T_mixed = Block3(ell, s, ell);
  d.A_mixed_raw = Block3(s, ell, s);
  d.A_mixed = Block3(s, ell, s);

  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      for (int a = 0; a < s; ++a)
        d.T_H.at(i, j, a) = pair_values(nabla_vv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                        gv, frame.horizontal[static_cast<std::size_t>(a)]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      for (int a = 0; a < ell; ++a)
        d.A_raw.at(i, j, a) = pair_values(nabla_hh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                          gv, frame.vertical[static_cast<std::size_t>(a)]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      for (int a = 0; a < ell; ++a) {
        d.A_V.at(i, j, a) = 0.5 * (d.A_raw.at(i, j, a) - d.A_raw.at(j, i, a));
        d.sigma_max = std::max(d.sigma_max, std::abs(0.5 * (d.A_raw.at(i, j, a) + d.A_raw.at(j, i, a))));
      }
  for (int j = 0; j < ell; ++j)
    for (int i = 0; i < s; ++i)
      for (int a = 0; a < ell; ++a)
        d.T_mixed.at(j, i, a) = pair_values(d.nabla_vh[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)],
                                            gv, frame.vertical[static_cast<std::size_t>(a)]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < ell; ++j)
      for (int b = 0; b < s; ++b) {
        d.A_mixed_raw.at(i, j, b) = pair_values(d.nabla_hv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                                gv, frame.horizontal[static_cast<std::size_t>(b)]);
        d.A_mixed.at(i, j, b) = -d.A_V.at(i, b, j);
      }

  d.trace_T.assign(static_cast<std::size_t>(s), 0.0);
  for (int a = 0; a < s; ++a)
    for (int i = 0; i < ell; ++i) d.trace_T[static_cast<std::size_t>(a)] += d.T_H.at(i, i, a);
  for (int a = 0; a < s; ++a) d.trace_T_sq += d.trace_T[static_cast<std::size_t>(a)] * d.trace_T[static_cast<std::size_t>(a)];
  {
    Vec trA(static_cast<std::size_t>(ell), 0.0), trAraw(static_cast<std::size_t>(ell), 0.0);
    for (int a = 0; a < ell; ++a)
      for (int i = 0; i < s; ++i) {
        trA[static_cast<std::size_t>(a)] += d.A_V.at(i, i, a);
        trAraw[static_cast<std::size_t>(a)] += d.A_raw.at(i, i, a);
      }
    for (int a = 0; a < ell; ++a) {
      d.trace_A_sq += trA[static_cast<std::size_t>(a)] * trA[static_cast<std::size_t>(a)];
      d.trace_A_raw_sq += trAraw[static_cast<std::size_t>(a)] * trAraw[static_cast<std::size_t>(a)];
    }
  }

  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      for (int a = 0; a < s; ++a) {
        d.normTH_sq += d.T_H.at(i, j, a) * d.T_H.at(i, j, a);
        d.T_symmetry_residual = std::max(d.T_symmetry_residual,
                                         std::abs(d.T_H.at(i, j, a) - d.T_H.at(j, i, a)));
      }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      for (int a = 0; a < ell; ++a) d.normAV_sq += d.A_V.at(i, j, a) * d.A_V.at(i, j, a);
  for (int j = 0; j < ell; ++j)
    for (int i = 0; i < s; ++i)
      for (int a = 0; a < ell; ++a) d.normTV_sq += d.T_mixed.at(j, i, a) * d.T_mixed.at(j, i, a);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < ell; ++j)
      for (int b = 0; b < s; ++b) {
        d.normAH_sq += d.A_mixed.at(i, j, b) * d.A_mixed.at(i, j, b);
        d.normAH_raw_sq += d.A_mixed_raw.at(i, j, b) * d.A_mixed_raw.at(i, j, b);
      }

  // h/v-projected derivative fields
  d.Tfield.assign(static_cast<std::size_t>(ell), std::vector<JetVec>());
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      d.Tfield[static_cast<std::size_t>(i)].push_back(
          numkit::apply(proj.Ph, nabla_vv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
  d.Afield.assign(static_cast<std::size_t>(s), std::vector<JetVec>());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      d.Afield[static_cast<std::size_t>(i)].push_back(
          numkit::apply(proj.Pv, nabla_hh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));

  // delta(N) = Σ_{j,i} g((∇_{h_i} T)(v_j, v_j), h_i)
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < ell; ++j) {
      const JetVec covW = covariant_derivative(frame.horizontal[static_cast<std::size_t>(i)],
                                               d.Tfield[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)], gamma);
      double term = pair_values(covW, gv, frame.horizontal[static_cast<std::size_t>(i)]);
      const JetVec vpart = numkit::apply(proj.Pv, d.nabla_hv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      for (int b = 0; b < ell; ++b) {
        const double ub = pair_values(vpart, gv, frame.vertical[static_cast<std::size_t>(b)]);
        term -= 2.0 * ub * d.T_H.at(b, j, i);
      }
      d.delta_N += term;
    }

  // Σ_{j,i} g((∇_{v_j} A)(h_i, h_i), v_j)
  for (int j = 0; j < ell; ++j)
    for (int i = 0; i < s; ++i) {
      const JetVec covA = covariant_derivative(frame.vertical[static_cast<std::size_t>(j)],
                                               d.Afield[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)], gamma);
      double term = pair_values(covA, gv, frame.vertical[static_cast<std::size_t>(j)]);
      const JetVec hpart = numkit::apply(proj.Ph, d.nabla_vh[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
      for (int b = 0; b < s; ++b) {
        const double yb = pair_values(hpart, gv, frame.horizontal[static_cast<std::size_t>(b)]);
        term -= yb * (d.A_raw.at(b, i, j) + d.A_raw.at(i, b, j));
      }
      d.nablaA_trace += term;
    }

  // Σ_{j,i} g(v_j, A_{A_{h_i} v_j} h_i)
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < ell; ++j)
      for (int b = 0; b < s; ++b)
        d.A_quad += d.A_mixed_raw.at(i, j, b) * d.A_raw.at(b, i, j);

  // bracket identity: A_V(i,j,·) = (1/2) v[h_i, h_j]
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      const JetVec& hi = frame.horizontal[static_cast<std::size_t>(i)];
      const JetVec& hj = frame.horizontal[static_cast<std::size_t>(j)];
      JetVec br(static_cast<std::size_t>(d.n), Jet::constant(0.0, hi[0].vars(), hi[0].order() - 1));
      for (int k = 0; k < d.n; ++k) {
        Jet acc = Jet::constant(0.0, hi[0].vars(), hi[0].order() - 1);
        for (int m = 0; m < d.n; ++m)
          acc = acc + hi[static_cast<std::size_t>(m)] * hj[static_cast<std::size_t>(k)].derive(m) -
                hj[static_cast<std::size_t>(m)] * hi[static_cast<std::size_t>(k)].derive(m);
        br[static_cast<std::size_t>(k)] = acc;
      }
      const JetVec vbr = numkit::apply(proj.Pv, br);
      for (int a = 0; a < ell; ++a) {
        const double cmp = pair_values(vbr, gv, frame.vertical[static_cast<std::size_t>(a)]);
        d.bracket_residual = std::max(d.bracket_residual,
                                      std::abs(d.A_V.at(i, j, a) - 0.5 * cmp));
      }
    }

  return d;
}

/// Frame-level residual diagnostics, all evaluated on jet values.
struct FrameResiduals {
  double orthonormal = 0.0;     // g(e_a, e_b) - delta_ab
  double vertical_in_ker = 0.0; // |dF v_a|
  double projector_idem = 0.0;
  double projector_selfadj = 0.0;
};

inline FrameResiduals frame_residuals(const AdaptedFrame& f, const JetMat& g, const JetMat& dF,
                                      const Projectors& proj) {
  FrameResiduals r;
  const Mat gv = g.values();
  auto all = f.vertical;
  all.insert(all.end(), f.horizontal.begin(), f.horizontal.end());
  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = 0; b < all.size(); ++b) {
      const double want = a == b ? 1.0 : 0.0;
      r.orthonormal = std::max(r.orthonormal, std::abs(pair_values(all[a], gv, all[b]) - want));
    }
  const Mat dFv = dF.values();
  for (const JetVec& v : f.vertical)
    for (int row = 0; row < dF.rows(); ++row) {
      double acc = 0.0;
      for (int k = 0; k < dF.cols(); ++k) acc += dFv(row, k) * v[static_cast<std::size_t>(k)].value();
      r.vertical_in_ker = std::max(r.vertical_in_ker, std::abs(acc));
    }
  const Mat pv = proj.Pv.values();
  const Mat pvpv = numkit::matmul(pv, pv);
  for (int i = 0; i < pv.rows(); ++i)
    for (int j = 0; j < pv.cols(); ++j)
      r.projector_idem = std::max(r.projector_idem, std::abs(pvpv(i, j) - pv(i, j)));
  // g-self-adjointness: g P symmetric
  const Mat gp = numkit::matmul(gv, pv);
  for (int i = 0; i < gp.rows(); ++i)
    for (int j = 0; j < gp.cols(); ++j)
      r.projector_selfadj = std::max(r.projector_selfadj, std::abs(gp(i, j) - gp(j, i)));
  return r;
}

/// Worst-case defect of the mixed-curvature identity
///   R(X,V,V,X) = g((∇_X T)(V,V), X) − |T_V X|² + g((∇_V A)(X,X), V)
///                + g(V, A_{A_X V} X)
/// over a spanning set of directions X in the horizontal frame and V in the
/// vertical frame (plain frame vectors plus normalized pair sums, which pins
/// the full biquadratic form).  Raw O'Neill tensors throughout; the identity
/// holds for any orthogonal splitting, Riemannian-submersion or not.
class MixedIdentity {
public:
  MixedIdentity(const AdaptedFrame& frame, const ONeillData& d, const Christoffel& gamma,
                const JetMat& g, const Projectors& proj, const CurvaturePack& pack)
      : ell_(frame.ell), s_(frame.s) {
    const Mat gv = g.values();
    gradT_.assign(size4(s_, s_, ell_, ell_), 0.0);
    gradA_.assign(size4(ell_, ell_, s_, s_), 0.0);
    U_.assign(static_cast<std::size_t>(s_) * ell_ * ell_, 0.0);
    Y_.assign(static_cast<std::size_t>(ell_) * s_ * s_, 0.0);

    for (int i = 0; i < s_; ++i)
      for (int j = 0; j < ell_; ++j) {
        const JetVec vpart = numkit::apply(proj.Pv, d.nabla_hv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        for (int b = 0; b < ell_; ++b)
          U_[(static_cast<std::size_t>(i) * ell_ + j) * ell_ + b] =
              pair_values(vpart, gv, frame.vertical[static_cast<std::size_t>(b)]);
      }
    for (int j = 0; j < ell_; ++j)
      for (int i = 0; i < s_; ++i) {
        const JetVec hpart = numkit::apply(proj.Ph, d.nabla_vh[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        for (int b = 0; b < s_; ++b)
          Y_[(static_cast<std::size_t>(j) * s_ + i) * s_ + b] =
              pair_values(hpart, gv, frame.horizontal[static_cast<std::size_t>(b)]);
      }

    for (int i = 0; i < s_; ++i)
      for (int k = 0; k < s_; ++k)
        for (int j = 0; j < ell_; ++j)
          for (int l = 0; l < ell_; ++l) {
            const JetVec cov = covariant_derivative(frame.horizontal[static_cast<std::size_t>(i)],
                                                    d.Tfield[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)], gamma);
            gradT_[idx4(i, k, j, l, s_, ell_, ell_)] =
                pair_values(cov, gv, frame.horizontal[static_cast<std::size_t>(k)]);
          }
    for (int j = 0; j < ell_; ++j)
      for (int m = 0; m < ell_; ++m)
        for (int i = 0; i < s_; ++i)
          for (int k = 0; k < s_; ++k) {
            const JetVec cov = covariant_derivative(frame.vertical[static_cast<std::size_t>(j)],
                                                    d.Afield[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], gamma);
            gradA_[idx4(j, m, i, k, ell_, s_, s_)] =
                pair_values(cov, gv, frame.vertical[static_cast<std::size_t>(m)]);
          }

    // coordinate components of the frame for curvature contraction
    hcoord_.assign(static_cast<std::size_t>(s_), Vec());
    vcoord_.assign(static_cast<std::size_t>(ell_), Vec());
    for (int i = 0; i < s_; ++i) {
      Vec c(static_cast<std::size_t>(frame.n));
      for (int k = 0; k < frame.n; ++k)
        c[static_cast<std::size_t>(k)] = frame.horizontal[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].value();
      hcoord_[static_cast<std::size_t>(i)] = std::move(c);
    }
    for (int j = 0; j < ell_; ++j) {
      Vec c(static_cast<std::size_t>(frame.n));
      for (int k = 0; k < frame.n; ++k)
        c[static_cast<std::size_t>(k)] = frame.vertical[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].value();
      vcoord_[static_cast<std::size_t>(j)] = std::move(c);
    }
    d_ = &d;
    pack_ = &pack;
  }

  double defect(const Vec& x, const Vec& u) const {
    const ONeillData& d = *d_;
    // LHS: R(X, U, U, X)
    Vec X(hcoord_[0].size(), 0.0), Uc(vcoord_[0].size(), 0.0);
    for (int i = 0; i < s_; ++i)
      for (std::size_t k = 0; k < X.size(); ++k) X[k] += x[static_cast<std::size_t>(i)] * hcoord_[static_cast<std::size_t>(i)][k];
    for (int j = 0; j < ell_; ++j)
      for (std::size_t k = 0; k < Uc.size(); ++k) Uc[k] += u[static_cast<std::size_t>(j)] * vcoord_[static_cast<std::size_t>(j)][k];
    const double lhs = pack_->contract(X, Uc, Uc, X);

    double gradT_term = 0.0;
    for (int i = 0; i < s_; ++i)
      for (int k = 0; k < s_; ++k)
        for (int j = 0; j < ell_; ++j)
          for (int l = 0; l < ell_; ++l) {
            double t = gradT_[idx4(i, k, j, l, s_, ell_, ell_)];
            for (int b = 0; b < ell_; ++b)
              t -= U_[(static_cast<std::size_t>(i) * ell_ + j) * ell_ + b] * d.T_H.at(b, l, k) +
                   U_[(static_cast<std::size_t>(i) * ell_ + l) * ell_ + b] * d.T_H.at(j, b, k);
            gradT_term += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(k)] *
                          u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(l)] * t;
          }

    double gradA_term = 0.0;
    for (int j = 0; j < ell_; ++j)
      for (int m = 0; m < ell_; ++m)
        for (int i = 0; i < s_; ++i)
          for (int k = 0; k < s_; ++k) {
            double t = gradA_[idx4(j, m, i, k, ell_, s_, s_)];
            for (int b = 0; b < s_; ++b)
              t -= Y_[(static_cast<std::size_t>(j) * s_ + i) * s_ + b] * d.A_raw.at(b, k, m) +
                   Y_[(static_cast<std::size_t>(j) * s_ + k) * s_ + b] * d.A_raw.at(i, b, m);
            gradA_term += u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(m)] *
                          x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(k)] * t;
          }

    double tmix_term = 0.0;
    for (int b = 0; b < ell_; ++b) {
      double m = 0.0;
      for (int j = 0; j < ell_; ++j)
        for (int i = 0; i < s_; ++i)
          m += u[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(i)] * d.T_mixed.at(j, i, b);
      tmix_term += m * m;
    }

    double aquad_term = 0.0;
    for (int b = 0; b < s_; ++b) {
      double z = 0.0;
      for (int i = 0; i < s_; ++i)
        for (int j = 0; j < ell_; ++j)
          z += x[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] * d.A_mixed_raw.at(i, j, b);
      double w = 0.0;
      for (int k = 0; k < s_; ++k)
        for (int m = 0; m < ell_; ++m)
          w += x[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(m)] * d.A_raw.at(b, k, m);
      aquad_term += z * w;
    }

    return lhs - (gradT_term - tmix_term + gradA_term + aquad_term);
  }

  double residual() const {
    std::vector<Vec> xs = spanning(s_), us = spanning(ell_);
    double worst = 0.0;
    for (const Vec& x : xs)
      for (const Vec& u : us) worst = std::max(worst, std::abs(defect(x, u)));
    return worst;
  }

private:
  static std::vector<Vec> spanning(int k) {
    std::vector<Vec> out;
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < k; ++i) {
      Vec e(static_cast<std::size_t>(k), 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      out.push_back(e);
    }
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        Vec e(static_cast<std::size_t>(k), 0.0);
        e[static_cast<std::size_t>(i)] = r;
        e[static_cast<std::size_t>(j)] = r;
        out.push_back(e);
      }
    return out;
  }

  static std::size_t size4(int a, int b, int c, int d) {
    return static_cast<std::size_t>(a) * b * c * d;
  }
  static std::size_t idx4(int i, int k, int j, int l, int d0, int d2, int d3) {
    return ((static_cast<std::size_t>(i) * d0 + k) * d2 + j) * d3 + l;
  }

  int ell_, s_;
  std::vector<double> gradT_, gradA_, U_, Y_;
  std::vector<Vec> hcoord_, vcoord_;
  const ONeillData* d_ = nullptr;
  const CurvaturePack* pack_ = nullptr;
};

}  // namespace casorati::subm
