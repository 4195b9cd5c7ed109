#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "casorati/optimize.hpp"
#include "casorati/submersion.hpp"

namespace casorati::curv {

using geometry::CurvaturePack;
using numkit::Mat;
using numkit::Vec;
using subm::AdaptedFrame;
using subm::ONeillData;

/// Distribution and ambient scalar curvatures.  tau_* fields follow the
/// "tau" normalization (half the frame-pair sum); mixed_sum is the plain
/// double sum over horizontal x vertical frame pairs.
struct ScalarCurvatures {
  double tau_V_ker = 0.0;   // fiber distribution, from the contracted Gauss relation
  double tau_H_perp = 0.0;  // horizontal distribution, from the contracted relation
  double tau_V_N1 = 0.0;
  double tau_H_N1 = 0.0;
  double rho_V = 0.0;
  double rho_H = 0.0;
  double rho_V_N1 = 0.0;
  double rho_H_N1 = 0.0;
  double mixed_sum = 0.0;  // Σ_{i,j} R(h_i, v_j, v_j, h_i)
  double tau_M1 = 0.0;     // half the full scalar curvature
  double scalN1_residual = 0.0;  // tau_M1 vs frame decomposition
};

inline ScalarCurvatures scalar_curvatures(const CurvaturePack& pack, const AdaptedFrame& frame,
                                          const ONeillData& oneill) {
  const int ell = frame.ell, s = frame.s;
  ScalarCurvatures sc;

  std::vector<Vec> v(frame.vertical.size()), h(frame.horizontal.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec c(static_cast<std::size_t>(frame.n));
    for (int k = 0; k < frame.n; ++k) c[static_cast<std::size_t>(k)] = frame.vertical[i][static_cast<std::size_t>(k)].value();
    v[i] = std::move(c);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    Vec c(static_cast<std::size_t>(frame.n));
    for (int k = 0; k < frame.n; ++k) c[static_cast<std::size_t>(k)] = frame.horizontal[i][static_cast<std::size_t>(k)].value();
    h[i] = std::move(c);
  }

  double two_tau_V = 0.0, two_tau_H = 0.0, mixed = 0.0;
  for (int i = 0; i < ell; ++i)
    for (int j = 0; j < ell; ++j)
      if (i != j) two_tau_V += pack.contract(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)],
                                             v[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(i)]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) two_tau_H += pack.contract(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)],
                                             h[static_cast<std::size_t>(j)], h[static_cast<std::size_t>(i)]);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < ell; ++j)
      mixed += pack.contract(h[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)],
                             v[static_cast<std::size_t>(j)], h[static_cast<std::size_t>(i)]);

  sc.tau_V_N1 = 0.5 * two_tau_V;
  sc.tau_H_N1 = 0.5 * two_tau_H;
  sc.mixed_sum = mixed;
  sc.tau_M1 = 0.5 * pack.scalar2tau;
  sc.scalN1_residual = std::abs(sc.tau_M1 - (sc.tau_V_N1 + sc.tau_H_N1 + mixed));

  const double C_V = ell > 0 ? oneill.normTH_sq / ell : 0.0;
  const double C_H = s > 0 ? oneill.normAV_sq / s : 0.0;
  // contracted Gauss relations
  sc.tau_V_ker = 0.5 * (two_tau_V + oneill.trace_T_sq - ell * C_V);
  sc.tau_H_perp = 0.5 * (two_tau_H + 3.0 * s * C_H);

  if (ell >= 2) {
    sc.rho_V = 2.0 * sc.tau_V_ker / (ell * (ell - 1.0));
    sc.rho_V_N1 = 2.0 * sc.tau_V_N1 / (ell * (ell - 1.0));
  }
  if (s >= 2) {
    sc.rho_H = 2.0 * sc.tau_H_perp / (s * (s - 1.0));
    sc.rho_H_N1 = 2.0 * sc.tau_H_N1 / (s * (s - 1.0));
  }
  return sc;
}

/// ||Pi M Pi||_F^2 for Pi = I - w w^T; valid for symmetric and skew slices.
inline double projected_frobenius_sq(const Mat& m, const Vec& w) {
  const int n = m.rows();
  double frob = 0.0, mw2 = 0.0, mtw2 = 0.0, wmw = 0.0, wmtw = 0.0;
  Vec mw(static_cast<std::size_t>(n), 0.0), mtw(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      frob += m(i, j) * m(i, j);
      mw[static_cast<std::size_t>(i)] += m(i, j) * w[static_cast<std::size_t>(j)];
      mtw[static_cast<std::size_t>(i)] += m(j, i) * w[static_cast<std::size_t>(j)];
    }
  for (int i = 0; i < n; ++i) {
    mw2 += mw[static_cast<std::size_t>(i)] * mw[static_cast<std::size_t>(i)];
    mtw2 += mtw[static_cast<std::size_t>(i)] * mtw[static_cast<std::size_t>(i)];
    wmw += w[static_cast<std::size_t>(i)] * mw[static_cast<std::size_t>(i)];
    wmtw += w[static_cast<std::size_t>(i)] * mtw[static_cast<std::size_t>(i)];
  }
  return frob - mw2 - mtw2 + wmw * wmtw;
}

/// Casorati curvature of the hyperplane w^⊥ inside a distribution whose
/// second-fundamental slices are `slices` (each dim x dim).
inline double hyperplane_casorati(const std::vector<Mat>& slices, const Vec& w) {
  if (slices.empty()) return 0.0;
  const int dim = slices[0].rows();
  if (dim < 3) throw std::invalid_argument("hyperplane_casorati: distribution dimension must be >= 3");
  double acc = 0.0;
  for (const Mat& m : slices) acc += projected_frobenius_sq(m, w);
  return acc / (dim - 1);
}

struct HyperplaneExtrema {
  double inf = 0.0, sup = 0.0;
  Vec w_inf, w_sup;
  numkit::SphereExtremum diag_inf, diag_sup;
};

inline HyperplaneExtrema hyperplane_extrema(const std::vector<Mat>& slices, int dim,
                                            std::uint64_t seed = 0x5EED) {
  numkit::SphereObjective obj;
  obj.value = [&slices](const Vec& w) { return hyperplane_casorati(slices, w); };
  obj.value_grad = [&slices, dim](const Vec& w, Vec& grad) {
    grad.assign(w.size(), 0.0);
    double val = 0.0;
    for (const Mat& m : slices) {
      val += projected_frobenius_sq(m, w);
      // d/dw [ -|Mw|² - |Mᵀw|² + (wᵀMw)² ] = -2MᵀMw - 2MMᵀw + 2(wᵀMw)(M+Mᵀ)w
      const int n = m.rows();
      Vec mw(static_cast<std::size_t>(n), 0.0), mtw(static_cast<std::size_t>(n), 0.0);
      double wmw = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          mw[static_cast<std::size_t>(i)] += m(i, j) * w[static_cast<std::size_t>(j)];
          mtw[static_cast<std::size_t>(i)] += m(j, i) * w[static_cast<std::size_t>(j)];
        }
      for (int i = 0; i < n; ++i) wmw += w[static_cast<std::size_t>(i)] * mw[static_cast<std::size_t>(i)];
      for (int i = 0; i < n; ++i) {
        double gi = 2.0 * wmw * (mw[static_cast<std::size_t>(i)] + mtw[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n; ++j)
          gi -= 2.0 * (m(j, i) * mw[static_cast<std::size_t>(j)] + m(i, j) * mtw[static_cast<std::size_t>(j)]);
        grad[static_cast<std::size_t>(i)] += gi;
      }
    }
    for (double& x : grad) x /= (dim - 1);
    return val / (dim - 1);
  };

  HyperplaneExtrema ext;
  ext.diag_inf = numkit::sphere_extremize(dim, obj, numkit::ExtremizeMode::Min, seed);
  ext.diag_sup = numkit::sphere_extremize(dim, obj, numkit::ExtremizeMode::Max, seed + 1);
  ext.inf = ext.diag_inf.value;
  ext.sup = ext.diag_sup.value;
  ext.w_inf = ext.diag_inf.w;
  ext.w_sup = ext.diag_sup.w;
  return ext;
}

/// Casorati curvatures and the four normalized delta-Casorati curvatures.
struct CasoratiSet {
  double C_V = 0.0, C_H = 0.0;
  double inf_CL_V = 0.0, sup_CL_V = 0.0;
  double inf_CL_H = 0.0, sup_CL_H = 0.0;
  double delta_C_V = 0.0, hat_delta_C_V = 0.0;
  double delta_C_H = 0.0, hat_delta_C_H = 0.0;
  numkit::SphereExtremum opt_inf_V, opt_sup_V, opt_inf_H, opt_sup_H;
};

inline std::vector<Mat> vertical_slices(const ONeillData& d) {
  std::vector<Mat> slices;
  for (int a = 0; a < d.s; ++a) {
    Mat m(d.ell, d.ell);
    for (int i = 0; i < d.ell; ++i)
      for (int j = 0; j < d.ell; ++j) m(i, j) = d.T_H.at(i, j, a);
    slices.push_back(std::move(m));
  }
  return slices;
}

inline std::vector<Mat> horizontal_slices(const ONeillData& d) {
  std::vector<Mat> slices;
  for (int a = 0; a < d.ell; ++a) {
    Mat m(d.s, d.s);
    for (int i = 0; i < d.s; ++i)
      for (int j = 0; j < d.s; ++j) m(i, j) = d.A_V.at(i, j, a);
    slices.push_back(std::move(m));
  }
  return slices;
}

inline CasoratiSet delta_casorati(const ONeillData& d, std::uint64_t seed = 0x5EED) {
  if (d.ell < 3 || d.s < 3)
    throw std::invalid_argument("delta_casorati: requires ell >= 3 and s >= 3");
  CasoratiSet cs;
  cs.C_V = d.normTH_sq / d.ell;
  cs.C_H = d.normAV_sq / d.s;

  const auto vs = vertical_slices(d);
  const auto hs = horizontal_slices(d);
  auto ev = hyperplane_extrema(vs, d.ell, seed);
  auto eh = hyperplane_extrema(hs, d.s, seed + 2);
  cs.inf_CL_V = ev.inf;
  cs.sup_CL_V = ev.sup;
  cs.inf_CL_H = eh.inf;
  cs.sup_CL_H = eh.sup;
  cs.opt_inf_V = ev.diag_inf;
  cs.opt_sup_V = ev.diag_sup;
  cs.opt_inf_H = eh.diag_inf;
  cs.opt_sup_H = eh.diag_sup;

  const double ell = d.ell, s = d.s;
  cs.delta_C_V = 0.5 * cs.C_V + (ell + 1.0) / (2.0 * ell) * cs.inf_CL_V;
  cs.hat_delta_C_V = 2.0 * cs.C_V - (2.0 * ell - 1.0) / (2.0 * ell) * cs.sup_CL_V;
  cs.delta_C_H = 0.5 * cs.C_H + (s + 1.0) / (2.0 * s) * cs.inf_CL_H;
  cs.hat_delta_C_H = 2.0 * cs.C_H - (2.0 * s - 1.0) / (2.0 * s) * cs.sup_CL_H;
  return cs;
}

/// Residual of the scalar decomposition identity that ties the full scalar
/// curvature to the distribution curvatures and the O'Neill invariants:
///   2 tau_M1 = 2 tau_H_perp + 2 tau_V_ker − ||trace T||² + ℓ C_V − 3 s C_H
///              + 2 delta(N) − 2 ||T_V||² + 2 (∇A-trace) + 2 (A-quad).
/// This is the corrected counterpart of the textbook-style display (which the
/// report also carries, see `scal_decomposition_display`).
inline double scal_decomposition_residual(const ScalarCurvatures& sc, const ONeillData& d) {
  const double C_V = d.ell > 0 ? d.normTH_sq / d.ell : 0.0;
  const double C_H = d.s > 0 ? d.normAV_sq / d.s : 0.0;
  const double rhs = 2.0 * sc.tau_H_perp + 2.0 * sc.tau_V_ker - d.trace_T_sq + d.ell * C_V -
                     3.0 * d.s * C_H + 2.0 * d.delta_N - 2.0 * d.normTV_sq +
                     2.0 * d.nablaA_trace + 2.0 * d.A_quad;
  return std::abs(2.0 * sc.tau_M1 - rhs);
}

/// Value of the display-form tail (2 delta(N) − ||T_V||² + ||A_H||²) and the
/// residual the display would produce; kept for report diagnostics.
inline double scal_decomposition_display(const ScalarCurvatures& sc, const ONeillData& d) {
  const double C_V = d.ell > 0 ? d.normTH_sq / d.ell : 0.0;
  const double C_H = d.s > 0 ? d.normAV_sq / d.s : 0.0;
  const double rhs = 2.0 * sc.tau_H_perp + 2.0 * sc.tau_V_ker - d.trace_T_sq + d.ell * C_V +
                     3.0 * d.s * C_H - d.trace_A_sq - 2.0 * d.delta_N + d.normTV_sq -
                     d.normAH_sq;
  return 2.0 * sc.tau_M1 - rhs;
}

}  // namespace casorati::curv
