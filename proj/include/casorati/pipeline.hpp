#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/curvatures.hpp"
#include "casorati/geometry.hpp"
#include "casorati/submersion.hpp"
#include "casorati/submersion_spec.hpp"
#include "casorati/theorems.hpp"

namespace casorati::pipeline {

using curv::CasoratiSet;
using curv::ScalarCurvatures;
using geometry::Christoffel;
using geometry::CurvaturePack;
using io::SubmersionSpec;
using numkit::Jet;
using numkit::JetMat;
using numkit::Mat;
using numkit::SymMatrix;
using numkit::Vec;
using subm::AdaptedFrame;
using subm::ONeillData;
using subm::Projectors;

struct PipelineError : std::runtime_error {
  std::string stage;
  PipelineError(std::string st, const std::string& msg)
      : std::runtime_error("[" + st + "] " + msg), stage(std::move(st)) {}
};

struct AnalysisOptions {
  std::uint64_t seed = 0x5EED;
  bool with_delta_casorati = true;
  bool greedy_pivots = false;  // ignore pinned frame pivots in the SubmersionSpec
};

/// Everything the engine computes at one point, plus residual diagnostics.
struct PointAnalysis {
  Vec point;
  int n1 = 0, n2 = 0, ell = 0, s = 0;

  SymMatrix g_val;
  Mat dF_val;
  AdaptedFrame frame;
  ONeillData oneill;
  CurvaturePack pack;
  ScalarCurvatures sc;
  std::optional<CasoratiSet> cs;

  std::optional<thm::GssfConstants> constants;
  std::optional<thm::StructureAtPoint> structure;
  std::optional<thm::StructureQuantities> structq;
  std::optional<thm::ModelContractions> model_contr;

  std::map<std::string, double> residuals;
  std::vector<std::string> warnings;

  double fiber_intrinsic_2tau = 0.0;
  bool has_fiber_check = false;
};

namespace detail {

inline JetMat map_differential(const SubmersionSpec& spec,
                               const std::map<std::string, Jet>& env) {
  const int n1 = spec.n1(), n2 = spec.n2();
  std::vector<Jet> comps;
  comps.reserve(static_cast<std::size_t>(n2));
  for (const auto& e : spec.map_components) comps.push_back(e.eval(env));
  JetMat dF(n2, n1, Jet::constant(0.0, n1, comps[0].order() - 1));
  for (int a = 0; a < n2; ++a)
    for (int k = 0; k < n1; ++k) dF(a, k) = comps[static_cast<std::size_t>(a)].derive(k);
  return dF;
}

inline double rs_property_residual(const SubmersionSpec& spec, const PointAnalysis& an,
                                   const Vec& point) {
  // evaluate the base metric at F(p); warped bases may reference total coords
  std::map<std::string, double> env = spec.value_env(point);
  for (int a = 0; a < spec.n2(); ++a)
    env[spec.base_coords[static_cast<std::size_t>(a)]] =
        spec.map_components[static_cast<std::size_t>(a)].eval_value(spec.value_env(point));
  SymMatrix g2(spec.n2());
  for (const auto& [ij, e] : spec.base_metric) {
    const double v = e.eval_value(env);
    g2(ij.first, ij.second) = v;
    g2(ij.second, ij.first) = v;
  }
  double worst = 0.0;
  const int s = an.s, n2 = spec.n2();
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      // push the horizontal frame through dF
      Vec fi(static_cast<std::size_t>(n2), 0.0), fj(static_cast<std::size_t>(n2), 0.0);
      for (int a = 0; a < n2; ++a)
        for (int k = 0; k < an.n1; ++k) {
          fi[static_cast<std::size_t>(a)] += an.dF_val(a, k) *
              an.frame.horizontal[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].value();
          fj[static_cast<std::size_t>(a)] += an.dF_val(a, k) *
              an.frame.horizontal[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].value();
        }
      double g2ij = 0.0;
      for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) g2ij += fi[static_cast<std::size_t>(a)] * g2(a, b) * fj[static_cast<std::size_t>(b)];
      const double g1ij = subm::pair_values(an.frame.horizontal[static_cast<std::size_t>(i)],
                                            an.g_val.mat(), an.frame.horizontal[static_cast<std::size_t>(j)]);
      worst = std::max(worst, std::abs(g1ij - g2ij));
    }
  return worst;
}

/// Intrinsic scalar curvature (2tau convention) of the coordinate-slice
/// fiber through the point: the metric restricted to the fiber coordinates,
/// other coordinates held constant.
inline double fiber_intrinsic_2tau(const SubmersionSpec& spec, const Vec& point) {
  const int m = static_cast<int>(spec.fiber_coords.size());
  std::map<std::string, Jet> env;
  for (int i = 0; i < spec.n1(); ++i)
    env[spec.coords[static_cast<std::size_t>(i)]] =
        Jet::constant(point[static_cast<std::size_t>(i)], m, 2);
  for (int k = 0; k < m; ++k) {
    const int ci = spec.fiber_coords[static_cast<std::size_t>(k)];
    env[spec.coords[static_cast<std::size_t>(ci)]] =
        Jet::variable(point[static_cast<std::size_t>(ci)], m, k, 2);
  }
  JetMat gf(m, m, Jet::constant(0.0, m, 2));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      int i = spec.fiber_coords[static_cast<std::size_t>(a)];
      int j = spec.fiber_coords[static_cast<std::size_t>(b)];
      if (i > j) std::swap(i, j);
      auto it = spec.metric.find({i, j});
      gf(a, b) = it == spec.metric.end() ? Jet::constant(0.0, m, 2) : it->second.eval(env);
    }
  if (m == 1) return 0.0;
  const JetMat gfi = numkit::inverse(gf);
  const Christoffel gam = Christoffel::compute(gf, gfi);
  Vec sub(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k)
    sub[static_cast<std::size_t>(k)] = point[static_cast<std::size_t>(spec.fiber_coords[static_cast<std::size_t>(k)])];
  return geometry::riemann(gf, gfi, gam, sub).scalar2tau;
}

inline thm::StructureAtPoint eval_structure(const io::StructureSpec& st,
                                            const std::map<std::string, double>& env, int n) {
  thm::StructureAtPoint out;
  out.phi = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.phi(i, j) = expr::Expr::parse(st.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]).eval_value(env);
  out.contact = st.kind == "phi";
  if (out.contact) {
    out.xi.resize(static_cast<std::size_t>(n));
    out.eta.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      out.xi[static_cast<std::size_t>(i)] = expr::Expr::parse(st.xi[static_cast<std::size_t>(i)]).eval_value(env);
      out.eta[static_cast<std::size_t>(i)] = expr::Expr::parse(st.eta[static_cast<std::size_t>(i)]).eval_value(env);
    }
  }
  return out;
}

}  // namespace detail

inline PointAnalysis analyze_point(const SubmersionSpec& spec, const Vec& point,
                                   const AnalysisOptions& opt = {}) {
  if (static_cast<int>(point.size()) != spec.n1())
    throw PipelineError("input", "point has wrong dimension");
  if (!spec.in_domain(point)) throw PipelineError("domain", "point violates the chart domain");

  PointAnalysis an;
  an.point = point;
  an.n1 = spec.n1();
  an.n2 = spec.n2();
  an.ell = spec.ell();
  an.s = spec.n2();

  const auto env3 = spec.jet_env(point, 3);
  const auto venv = spec.value_env(point);

  JetMat g, g_inv;
  try {
    g = spec.metric_field().eval(env3);
    an.g_val = SymMatrix(g.values());
    if (!an.g_val.is_positive_definite())
      throw PipelineError("metric", "metric is not positive definite at the point");
    g_inv = numkit::inverse(g);
  } catch (const expr::EvalError& e) {
    throw PipelineError("metric", e.what());
  } catch (const std::domain_error& e) {
    throw PipelineError("metric", e.what());
  }

  JetMat dF;
  try {
    dF = detail::map_differential(spec, env3);
    an.dF_val = dF.values();
  } catch (const expr::EvalError& e) {
    throw PipelineError("map", e.what());
  }

  Christoffel gamma = Christoffel::compute(g, g_inv);
  an.pack = geometry::riemann(g, g_inv, gamma, point);

  Projectors proj;
  try {
    proj = subm::projectors(g_inv, dF);
  } catch (const subm::RankError& e) {
    throw PipelineError("projectors", e.what());
  }

  try {
    const auto pivots = opt.greedy_pivots ? std::nullopt : spec.frame_pivots;
    an.frame = subm::build_adapted_frame(g, proj, an.ell, an.s, pivots);
  } catch (const subm::PivotError& e) {
    throw PipelineError("frame", e.what());
  }

  an.oneill = subm::compute_oneill(an.frame, gamma, g, proj);
  an.sc = curv::scalar_curvatures(an.pack, an.frame, an.oneill);

  if (opt.with_delta_casorati && an.ell >= 3 && an.s >= 3)
    an.cs = curv::delta_casorati(an.oneill, opt.seed);

  // residual suite
  const auto fr = subm::frame_residuals(an.frame, g, dF, proj);
  an.residuals["frame_orthonormal"] = fr.orthonormal;
  an.residuals["frame_vertical_in_kernel"] = fr.vertical_in_ker;
  an.residuals["projector_idempotent"] = fr.projector_idem;
  an.residuals["projector_self_adjoint"] = fr.projector_selfadj;
  an.residuals["metric_compatibility"] = geometry::metric_compat_residual(g, gamma);
  an.residuals["riemann_symmetries"] = geometry::riemann_symmetry_residual(an.pack);
  an.residuals["first_bianchi"] = geometry::bianchi_residual(an.pack);
  an.residuals["riemannian_submersion"] = detail::rs_property_residual(spec, an, point);
  an.residuals["T_symmetry"] = an.oneill.T_symmetry_residual;
  an.residuals["A_bracket"] = an.oneill.bracket_residual;
  an.residuals["scal_frame_decomposition"] = an.sc.scalN1_residual;
  an.residuals["scal_oneill_decomposition"] = curv::scal_decomposition_residual(an.sc, an.oneill);
  an.residuals["scal_oneill_display_gap"] =
      std::abs(curv::scal_decomposition_display(an.sc, an.oneill));
  {
    subm::MixedIdentity mixed(an.frame, an.oneill, gamma, g, proj, an.pack);
    an.residuals["mixed_codazzi"] = mixed.residual();
  }
  if (an.oneill.sigma_max > 1e-8)
    an.warnings.push_back(
        "horizontal distribution has nonzero second fundamental form (|sigma| = " +
        std::to_string(an.oneill.sigma_max) +
        "); the map is a quasi-submersion, O'Neill blocks use the skew part");

  if (!spec.fiber_coords.empty() || spec.fiber_flat) {
    an.has_fiber_check = true;
    an.fiber_intrinsic_2tau =
        spec.fiber_flat ? 0.0 : detail::fiber_intrinsic_2tau(spec, point);
    an.residuals["gauss_fiber"] = std::abs(2.0 * an.sc.tau_V_ker - an.fiber_intrinsic_2tau);
  }

  if (spec.structure) {
    an.structure = detail::eval_structure(*spec.structure, venv, an.n1);
    const auto sc_check = thm::check_structure(*an.structure, an.g_val);
    an.residuals["structure_square"] = sc_check.square_residual;
    an.residuals["structure_compat"] = sc_check.compat_residual;
    an.residuals["structure_eta_xi"] = sc_check.eta_xi_residual;
    an.structq = thm::structure_quantities(*an.structure, an.frame, an.g_val, proj);
  }
  if (spec.space_form) {
    an.constants = thm::gssf_constants(*spec.space_form, venv, env3);
    if (spec.space_form->kind != thm::SpaceFormKind::Generic) {
      std::optional<thm::StructureAtPoint> st = an.structure;
      an.model_contr = thm::model_contractions(*spec.space_form, *an.constants, st, an.g_val, an.frame);
    }
  }
  return an;
}

/// Theorem evaluation on an analyzed point.
struct TheoremOutcome {
  thm::RhsEvaluation rhs;
  thm::InequalityVerdict verdict;
  thm::ProofPolynomials polys;
};

inline TheoremOutcome evaluate_theorem(const SubmersionSpec& spec, const PointAnalysis& an,
                                       const thm::TheoremKind& kind) {
  if (!an.cs)
    throw PipelineError("theorem", "delta-Casorati values unavailable (requires ell >= 3 and s >= 3)");
  thm::TheoremKind k = kind;
  if (k.family == thm::TheoremFamily::Corollary && !k.slant && spec.slant) k.slant = spec.slant;
  const thm::SpaceFormModel* model = spec.space_form ? &*spec.space_form : nullptr;
  const thm::GssfConstants* kc = an.constants ? &*an.constants : nullptr;
  const thm::StructureQuantities* q = an.structq ? &*an.structq : nullptr;
  const thm::ModelContractions* mc = an.model_contr ? &*an.model_contr : nullptr;
  TheoremOutcome out;
  out.rhs = thm::theorem_rhs(k, an.sc, *an.cs, an.oneill, model, kc, q, mc);
  out.verdict = thm::check_inequality(an.sc, out.rhs, an.oneill);
  out.polys = thm::proof_polynomials(*an.cs, an.oneill);
  return out;
}

}  // namespace casorati::pipeline
