#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casorati/pipeline.hpp"

namespace casorati::report {

using json = nlohmann::json;
using pipeline::PointAnalysis;
using pipeline::TheoremOutcome;

inline json frame_json(const subm::AdaptedFrame& f) {
  auto vecs = [&](const std::vector<numkit::JetVec>& vs) {
    json out = json::array();
    for (const auto& v : vs) {
      json c = json::array();
      for (const auto& x : v) c.push_back(x.value());
      out.push_back(c);
    }
    return out;
  };
  return {{"vertical", vecs(f.vertical)},
          {"horizontal", vecs(f.horizontal)},
          {"vertical_pivots", f.vertical_pivots},
          {"horizontal_pivots", f.horizontal_pivots}};
}

inline json block_json(const subm::Block3& b) {
  json out = json::array();
  for (int i = 0; i < b.d0; ++i) {
    json mi = json::array();
    for (int j = 0; j < b.d1; ++j) {
      json mij = json::array();
      for (int k = 0; k < b.d2; ++k) mij.push_back(b.at(i, j, k));
      mi.push_back(mij);
    }
    out.push_back(mi);
  }
  return out;
}

inline json tensors_json(const PointAnalysis& an) {
  json j;
  j["frame"] = frame_json(an.frame);
  j["T_H"] = block_json(an.oneill.T_H);
  j["A_V"] = block_json(an.oneill.A_V);
  j["A_raw"] = block_json(an.oneill.A_raw);
  j["T_mixed"] = block_json(an.oneill.T_mixed);
  j["A_mixed"] = block_json(an.oneill.A_mixed);
  j["trace_T"] = an.oneill.trace_T;
  j["sigma_max"] = an.oneill.sigma_max;
  return j;
}

inline json norms_json(const subm::ONeillData& d) {
  return {{"normTH_sq", d.normTH_sq},   {"normTV_sq", d.normTV_sq},
          {"normAV_sq", d.normAV_sq},   {"normAH_sq", d.normAH_sq},
          {"trace_T_sq", d.trace_T_sq}, {"trace_A_sq", d.trace_A_sq}};
}

inline json optimizer_json(const numkit::SphereExtremum& e) {
  return {{"value", e.value},
          {"iterations", e.iterations},
          {"converged", e.converged},
          {"dense_samples", e.dense_samples}};
}

/// The per-point report document (schema 1).
inline json report_json(const io::SubmersionSpec& spec, const PointAnalysis& an,
                        const std::optional<TheoremOutcome>& outcome,
                        const std::string& theorem_kind, bool include_tensors = false) {
  json j;
  j["schema"] = 1;
  j["spec"] = spec.name.empty() ? json(nullptr) : json(spec.name);
  j["point"] = an.point;
  j["n1"] = an.n1;
  j["n2"] = an.n2;
  j["l"] = an.ell;
  j["s"] = an.s;

  j["scalar_curvatures"] = {
      {"tau_V_ker", an.sc.tau_V_ker},   {"tau_H_perp", an.sc.tau_H_perp},
      {"tau_V_N1", an.sc.tau_V_N1},     {"tau_H_N1", an.sc.tau_H_N1},
      {"rho_V", an.sc.rho_V},           {"rho_H", an.sc.rho_H},
      {"rho_V_N1", an.sc.rho_V_N1},     {"rho_H_N1", an.sc.rho_H_N1},
      {"mixed_sum", an.sc.mixed_sum},   {"tau_M1", an.sc.tau_M1}};
  j["norms"] = norms_json(an.oneill);
  j["delta_N"] = an.oneill.delta_N;

  if (an.cs) {
    const auto& cs = *an.cs;
    j["casorati"] = {{"C_V", cs.C_V},
                     {"C_H", cs.C_H},
                     {"inf_CL_V", cs.inf_CL_V},
                     {"sup_CL_V", cs.sup_CL_V},
                     {"inf_CL_H", cs.inf_CL_H},
                     {"sup_CL_H", cs.sup_CL_H},
                     {"delta_C_V", cs.delta_C_V},
                     {"hat_delta_C_V", cs.hat_delta_C_V},
                     {"delta_C_H", cs.delta_C_H},
                     {"hat_delta_C_H", cs.hat_delta_C_H}};
    j["optimizer"] = {{"inf_CL_V", optimizer_json(cs.opt_inf_V)},
                      {"sup_CL_V", optimizer_json(cs.opt_sup_V)},
                      {"inf_CL_H", optimizer_json(cs.opt_inf_H)},
                      {"sup_CL_H", optimizer_json(cs.opt_sup_H)}};
  }

  if (an.constants)
    j["space_form_constants"] = {{"c1", an.constants->c1}, {"c2", an.constants->c2}, {"c3", an.constants->c3}};
  if (an.structq) {
    json sq = {{"normP_sq", an.structq->normP_sq},
               {"normQ_sq", an.structq->normQ_sq},
               {"normPV_sq", an.structq->normPV_sq},
               {"xi_position", thm::xi_position_name(an.structq->xi_position)}};
    sq["slant_angles"] = an.structq->slant_angles;
    j["structure"] = sq;
  }

  if (outcome) {
    const auto& v = outcome->verdict;
    json ineq = {{"theorem", theorem_kind},
                 {"lhs", v.lhs},
                 {"rhs_delta", v.rhs_delta},
                 {"rhs_hat", v.rhs_hat},
                 {"gap_delta", v.gap_delta},
                 {"gap_hat", v.gap_hat},
                 {"strict", v.strict},
                 {"holds_delta", v.holds_delta},
                 {"holds_hat", v.holds_hat},
                 {"equality_flags",
                  {{"quasi_umbilical", v.flags.quasi_umbilical},
                   {"off_diagonal_zero", v.flags.off_diagonal_zero},
                   {"A_zero", v.flags.A_zero}}}};
    const auto& r = outcome->rhs;
    ineq["display_rhs_delta"] = r.display_delta;
    ineq["display_rhs_hat"] = r.display_hat;
    if (r.has_kind_display) {
      ineq["kind_rhs_delta"] = r.kind_delta;
      ineq["kind_rhs_hat"] = r.kind_hat;
      ineq["kind_rhs_delta_printed"] = r.kind_delta_printed;
      ineq["kind_rhs_hat_printed"] = r.kind_hat_printed;
      ineq["general_model_rhs_delta"] = r.general_model_delta;
      ineq["general_model_rhs_hat"] = r.general_model_hat;
      ineq["crosscheck_delta"] = r.crosscheck_delta;
      ineq["crosscheck_hat"] = r.crosscheck_hat;
      ineq["printed_vs_corrected_delta"] = r.printed_vs_corrected_delta;
      ineq["printed_vs_corrected_hat"] = r.printed_vs_corrected_hat;
    }
    j["inequality"] = ineq;
    j["proof_polynomials"] = {{"P_HV", outcome->polys.P_HV}, {"Q_HV", outcome->polys.Q_HV}};
  }

  json res = json::object();
  for (const auto& [k, v] : an.residuals) res[k] = v;
  if (an.has_fiber_check) res["fiber_intrinsic_2tau"] = an.fiber_intrinsic_2tau;
  j["residuals"] = res;
  j["warnings"] = an.warnings;
  if (include_tensors) j["tensors"] = tensors_json(an);
  return j;
}

inline double max_residual(const PointAnalysis& an) {
  double worst = 0.0;
  for (const auto& [k, v] : an.residuals)
    if (k != "scal_oneill_display_gap" && k != "fiber_intrinsic_2tau")
      worst = std::max(worst, v);
  return worst;
}

/// RFC 4180 style CSV field quoting.
inline std::string csv_quote(const std::string& s) {
  bool needs = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string format_double(double v) {
  // shortest round-trip decimal form
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

}  // namespace casorati::report
