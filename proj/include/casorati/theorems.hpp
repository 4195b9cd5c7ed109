#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casorati/curvatures.hpp"
#include "casorati/spaceform.hpp"

namespace casorati::thm {

using curv::CasoratiSet;
using curv::ScalarCurvatures;
using subm::ONeillData;

enum class TheoremFamily { General, Rsf, Csf, Gssf, Corollary };

struct SlantDeclaration {
  std::string cls;  // invariant | anti_invariant | slant | semi_slant | hemi_slant | bi_slant
  double theta = 0.0, theta1 = 0.0, theta2 = 0.0;
  double d1 = 0.0, d2 = 0.0;
};

struct TheoremKind {
  TheoremFamily family = TheoremFamily::General;
  std::optional<SlantDeclaration> slant;  // for corollaries

  static TheoremKind parse(const std::string& text);
  std::string name() const;
};

inline TheoremKind TheoremKind::parse(const std::string& text) {
  TheoremKind k;
  if (text == "general") {
    k.family = TheoremFamily::General;
  } else if (text == "rsf") {
    k.family = TheoremFamily::Rsf;
  } else if (text == "csf") {
    k.family = TheoremFamily::Csf;
  } else if (text == "gssf") {
    k.family = TheoremFamily::Gssf;
  } else if (text.rfind("corollary:", 0) == 0) {
    k.family = TheoremFamily::Corollary;
    SlantDeclaration sd;
    std::string rest = text.substr(10);
    const auto colon = rest.find(':');
    sd.cls = rest.substr(0, colon);
    if (colon != std::string::npos) {
      // key=value pairs separated by commas, e.g. corollary:slant:theta=0.5
      std::string params = rest.substr(colon + 1);
      std::size_t pos = 0;
      while (pos < params.size()) {
        auto comma = params.find(',', pos);
        std::string kv = params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad corollary parameter: " + kv);
        const std::string key = kv.substr(0, eq);
        const double val = std::stod(kv.substr(eq + 1));
        if (key == "theta") sd.theta = val;
        else if (key == "theta1") sd.theta1 = val;
        else if (key == "theta2") sd.theta2 = val;
        else if (key == "d1") sd.d1 = val;
        else if (key == "d2") sd.d2 = val;
        else throw std::invalid_argument("unknown corollary parameter: " + key);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    k.slant = sd;
  } else {
    throw std::invalid_argument("unknown theorem kind: " + text);
  }
  return k;
}

inline std::string TheoremKind::name() const {
  switch (family) {
    case TheoremFamily::General: return "general";
    case TheoremFamily::Rsf: return "rsf";
    case TheoremFamily::Csf: return "csf";
    case TheoremFamily::Gssf: return "gssf";
    case TheoremFamily::Corollary: return "corollary:" + (slant ? slant->cls : std::string("?"));
  }
  return "?";
}

/// Proof polynomials evaluated from the tensor components: both are
/// non-negative and vanish exactly in the equality case.  P uses the
/// infimum hyperplane Casorati values, Q the supremum ones.
struct ProofPolynomials {
  double P_HV = 0.0;
  double Q_HV = 0.0;
};

inline ProofPolynomials proof_polynomials(const CasoratiSet& cs, const ONeillData& d) {
  const double ell = d.ell, s = d.s;
  ProofPolynomials p;
  const double common = -d.trace_T_sq + ell * cs.C_V + 3.0 * s * cs.C_H - d.trace_A_sq;
  p.P_HV = 0.5 * ell * (ell - 1.0) * cs.C_V + 0.5 * s * (s - 1.0) * cs.C_H +
           0.5 * (ell * ell - 1.0) * cs.inf_CL_V + 0.5 * (s * s - 1.0) * cs.inf_CL_H + common;
  p.Q_HV = 2.0 * ell * (ell - 1.0) * cs.C_V + 2.0 * s * (s - 1.0) * cs.C_H -
           0.5 * (ell - 1.0) * (2.0 * ell - 1.0) * cs.sup_CL_V -
           0.5 * (s - 1.0) * (2.0 * s - 1.0) * cs.sup_CL_H + common;
  return p;
}

/// Right-hand sides for one theorem kind.  `rhs_delta`/`rhs_hat` are the
/// operational values used for verdicts: the general inequality reduced
/// through the contracted Gauss relations, whose gap against the left side
/// equals the proof polynomial divided by s(s-1)l(l-1).  The display_*
/// fields carry the literal display-shaped right sides for reporting, and the
/// kind_* fields the space-form specializations (with both variants where
/// the printed theorem deviates from the substitution).
struct RhsEvaluation {
  std::string kind;
  double rhs_delta = 0.0, rhs_hat = 0.0;
  double display_delta = 0.0, display_hat = 0.0;

  bool has_kind_display = false;
  double kind_delta = 0.0, kind_hat = 0.0;            // corrected specialization
  double kind_delta_printed = 0.0, kind_hat_printed = 0.0;  // verbatim printed form
  double general_model_delta = 0.0, general_model_hat = 0.0;
  double crosscheck_delta = 0.0, crosscheck_hat = 0.0;  // corrected kind vs general-with-model
  double printed_vs_corrected_delta = 0.0, printed_vs_corrected_hat = 0.0;
};

namespace detail {

struct Denoms {
  double ss1;   // s(s-1)
  double ll1;   // l(l-1)
  double D;     // product
};

inline Denoms denoms(const ONeillData& d) {
  const double ell = d.ell, s = d.s;
  return {s * (s - 1.0), ell * (ell - 1.0), s * (s - 1.0) * ell * (ell - 1.0)};
}

inline double display_tail(const ONeillData& d) {
  return 2.0 * d.delta_N - d.normTV_sq + d.normAH_sq;
}

}  // namespace detail

inline double inequality_lhs(const ScalarCurvatures& sc, const ONeillData& d) {
  const auto dn = detail::denoms(d);
  return (2.0 * sc.tau_H_perp + 2.0 * sc.tau_V_ker) / dn.D;
}

/// Operational general right side (the reduced, identity-free assembly).
inline void general_rhs(const ScalarCurvatures& sc, const CasoratiSet& cs, const ONeillData& d,
                        double& rhs_delta, double& rhs_hat) {
  const auto dn = detail::denoms(d);
  const double tail = (2.0 * sc.tau_V_N1 + 2.0 * sc.tau_H_N1 + 6.0 * d.s * cs.C_H - d.trace_A_sq) / dn.D;
  rhs_delta = cs.delta_C_V / dn.ss1 + cs.delta_C_H / dn.ll1 + tail;
  rhs_hat = cs.hat_delta_C_V / dn.ss1 + cs.hat_delta_C_H / dn.ll1 + tail;
}

/// Display-shaped general right side with a pluggable ambient-curvature source.
inline void general_display_rhs(double two_tau_V, double two_tau_H, double mixed,
                                const CasoratiSet& cs, const ONeillData& d, double& out_delta,
                                double& out_hat) {
  const auto dn = detail::denoms(d);
  const double tail = (two_tau_V + two_tau_H + 2.0 * mixed + detail::display_tail(d)) / dn.D;
  out_delta = cs.delta_C_V / dn.ss1 + cs.delta_C_H / dn.ll1 + tail;
  out_hat = cs.hat_delta_C_V / dn.ss1 + cs.hat_delta_C_H / dn.ll1 + tail;
}

/// Substituted structure-norm combination for the slant corollaries,
/// replacing ||Q||^2 + 2||P^V||^2 by its class value.  `contact_vertical`
/// selects the (l-1)-dimension variants used when the Reeb field is
/// vertical.
inline double corollary_combo(const SlantDeclaration& sd, int ell, double normP_sq,
                              bool contact_vertical) {
  const double m = contact_vertical ? ell - 1.0 : ell;
  const double c2t = std::cos(sd.theta) * std::cos(sd.theta);
  const double s2t = std::sin(sd.theta) * std::sin(sd.theta);
  const double c2t1 = std::cos(sd.theta1) * std::cos(sd.theta1);
  const double s2t1 = std::sin(sd.theta1) * std::sin(sd.theta1);
  const double c2t2 = std::cos(sd.theta2) * std::cos(sd.theta2);
  const double s2t2 = std::sin(sd.theta2) * std::sin(sd.theta2);
  if (sd.cls == "invariant") return normP_sq + m;
  if (sd.cls == "anti_invariant") return normP_sq + 2.0 * m;
  if (sd.cls == "slant") return normP_sq + m * c2t + 2.0 * m * s2t;
  if (sd.cls == "semi_slant")
    return normP_sq + 2.0 * sd.d1 + 2.0 * sd.d2 * c2t2 + 4.0 * sd.d2 * s2t2;
  if (sd.cls == "hemi_slant")
    return normP_sq + 2.0 * sd.d2 * c2t2 + 4.0 * sd.d1 + 4.0 * sd.d2 * s2t2;
  if (sd.cls == "bi_slant")
    return normP_sq + 2.0 * sd.d1 * c2t1 + 2.0 * sd.d2 * c2t2 + 4.0 * sd.d1 * s2t1 +
           4.0 * sd.d2 * s2t2;
  throw std::invalid_argument("unknown corollary class: " + sd.cls);
}

/// Evaluate every right-hand-side variant for the requested theorem kind.
inline RhsEvaluation theorem_rhs(const TheoremKind& kind, const ScalarCurvatures& sc,
                                 const CasoratiSet& cs, const ONeillData& d,
                                 const SpaceFormModel* model, const GssfConstants* k,
                                 const StructureQuantities* q, const ModelContractions* mc) {
  RhsEvaluation out;
  out.kind = kind.name();
  general_rhs(sc, cs, d, out.rhs_delta, out.rhs_hat);
  general_display_rhs(2.0 * sc.tau_V_N1, 2.0 * sc.tau_H_N1, sc.mixed_sum, cs, d,
                      out.display_delta, out.display_hat);
  if (kind.family == TheoremFamily::General) return out;

  if (!model || !k)
    throw std::invalid_argument("theorem kind " + kind.name() + " needs a space-form declaration");
  const auto dn = detail::denoms(d);
  const double ell = d.ell, s = d.s;
  const double tail = detail::display_tail(d) / dn.D;
  const double delta_terms = cs.delta_C_V / dn.ss1 + cs.delta_C_H / dn.ll1;
  const double hat_terms = cs.hat_delta_C_V / dn.ss1 + cs.hat_delta_C_H / dn.ll1;

  if (mc) {
    general_display_rhs(mc->two_tau_V, mc->two_tau_H, mc->mixed_sum, cs, d,
                        out.general_model_delta, out.general_model_hat);
  }

  double core = 0.0;         // curvature block of the specialization, corrected
  double core_printed_delta = 0.0, core_printed_hat = 0.0;  // verbatim printed block

  switch (kind.family) {
    case TheoremFamily::Rsf: {
      const double c = k->c1;
      const double base = c / dn.ss1 + c / dn.ll1;
      core = base + 2.0 * c / ((s - 1.0) * (ell - 1.0));
      // printed form drops the factor c in the mixed term
      core_printed_delta = core_printed_hat = base + 2.0 / ((s - 1.0) * (ell - 1.0));
      break;
    }
    case TheoremFamily::Csf:
    case TheoremFamily::Gssf:
    case TheoremFamily::Corollary: {
      if (!q) throw std::invalid_argument("space-form kind needs structure quantities");
      double c1 = k->c1, c2 = k->c2, c3 = k->c3;
      bool contact = model->has_structure() && model->kind != SpaceFormKind::Complex;
      double combo = q->normQ_sq + q->normP_sq + 2.0 * q->normPV_sq;
      bool contact_vertical = q->xi_position == XiPosition::Vertical;
      if (kind.family == TheoremFamily::Corollary && kind.slant)
        combo = corollary_combo(*kind.slant, d.ell, q->normP_sq, contact && contact_vertical);
      if (contact && q->xi_position == XiPosition::Oblique)
        throw std::invalid_argument("oblique Reeb field: contact theorem kinds need xi vertical or horizontal");
      core = c1 * (ell * ell + s * s + 2.0 * s * ell - ell - s) / dn.D + 3.0 * c2 * combo / dn.D;
      if (contact) core += -2.0 * c3 * (ell + s - 1.0) / (ell * s * (s - 1.0) * (ell - 1.0));
      core_printed_delta = core;
      core_printed_hat = core;
      if (kind.family == TheoremFamily::Gssf || (kind.family == TheoremFamily::Corollary && contact)) {
        // printed hat inequality carries a stray + rho_V^{N1}/(s(s-1)) term
        core_printed_hat = core + sc.rho_V_N1 / dn.ss1;
      }
      break;
    }
    default:
      break;
  }

  out.has_kind_display = true;
  out.kind_delta = delta_terms + core + tail;
  out.kind_hat = hat_terms + core + tail;
  out.kind_delta_printed = delta_terms + core_printed_delta + tail;
  out.kind_hat_printed = hat_terms + core_printed_hat + tail;
  if (mc) {
    out.crosscheck_delta = out.kind_delta - out.general_model_delta;
    out.crosscheck_hat = out.kind_hat - out.general_model_hat;
  }
  out.printed_vs_corrected_delta = out.kind_delta_printed - out.kind_delta;
  out.printed_vs_corrected_hat = out.kind_hat_printed - out.kind_hat;
  return out;
}

struct EqualityFlags {
  bool quasi_umbilical = false;
  bool off_diagonal_zero = false;
  bool A_zero = false;
  bool all() const { return quasi_umbilical && off_diagonal_zero && A_zero; }
};

inline EqualityFlags equality_flags(const ONeillData& d, double tol = 1e-7) {
  EqualityFlags f;
  double scale = 1.0;
  for (int i = 0; i < d.ell; ++i)
    for (int j = 0; j < d.ell; ++j)
      for (int a = 0; a < d.s; ++a) scale = std::max(scale, std::abs(d.T_H.at(i, j, a)));
  const double t = tol * scale;

  f.quasi_umbilical = true;
  for (int a = 0; a < d.s; ++a) {
    const double first = d.T_H.at(0, 0, a);
    for (int i = 1; i + 1 < d.ell; ++i)
      if (std::abs(d.T_H.at(i, i, a) - first) > t) f.quasi_umbilical = false;
    if (std::abs(d.T_H.at(d.ell - 1, d.ell - 1, a) - 2.0 * first) > t) f.quasi_umbilical = false;
  }
  f.off_diagonal_zero = true;
  for (int i = 0; i < d.ell; ++i)
    for (int j = 0; j < d.ell; ++j)
      if (i != j)
        for (int a = 0; a < d.s; ++a)
          if (std::abs(d.T_H.at(i, j, a)) > t) f.off_diagonal_zero = false;
  f.A_zero = true;
  for (int i = 0; i < d.s; ++i)
    for (int j = 0; j < d.s; ++j)
      for (int a = 0; a < d.ell; ++a)
        if (std::abs(d.A_V.at(i, j, a)) > t) f.A_zero = false;
  return f;
}

struct InequalityVerdict {
  double lhs = 0.0;
  double rhs_delta = 0.0, rhs_hat = 0.0;
  double gap_delta = 0.0, gap_hat = 0.0;
  EqualityFlags flags;
  bool strict = false;
  bool holds_delta = true, holds_hat = true;
  double tol_report = 0.0;
};

inline InequalityVerdict check_inequality(const ScalarCurvatures& sc, const RhsEvaluation& rhs,
                                          const ONeillData& d) {
  InequalityVerdict v;
  v.lhs = inequality_lhs(sc, d);
  v.rhs_delta = rhs.rhs_delta;
  v.rhs_hat = rhs.rhs_hat;
  v.gap_delta = v.rhs_delta - v.lhs;
  v.gap_hat = v.rhs_hat - v.lhs;
  v.tol_report = 1e-8 * std::max(1.0, std::max(std::abs(v.rhs_delta), std::abs(v.rhs_hat)));
  v.flags = equality_flags(d);
  v.holds_delta = v.lhs <= v.rhs_delta + v.tol_report;
  v.holds_hat = v.lhs <= v.rhs_hat + v.tol_report;
  v.strict = std::min(v.gap_delta, v.gap_hat) > v.tol_report;
  return v;
}

}  // namespace casorati::thm
