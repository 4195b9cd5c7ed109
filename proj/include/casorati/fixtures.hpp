#pragma once

#include <map>
#include <string>
#include <vector>

#include "casorati/submersion_spec.hpp"

namespace casorati::fixtures {

using io::SubmersionSpec;
using numkit::Vec;

enum class Verdict { Equality, Strict, NotApplicable };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equality: return "equality";
    case Verdict::Strict: return "strict";
    case Verdict::NotApplicable: return "n/a";
  }
  return "?";
}

/// A built-in spec with default evaluation points, the expected verdict of
/// the inequality check and a small table of expected named quantities
/// (value, tolerance) at the first default point.
struct Fixture {
  std::string name;
  SubmersionSpec spec;
  std::vector<Vec> default_points;
  Verdict expected_verdict = Verdict::NotApplicable;
  std::string default_theorem = "general";
  std::map<std::string, std::pair<double, double>> expected;
};

namespace detail {

inline expr::Expr E(const std::string& s) { return expr::Expr::parse(s); }

inline void diag_metric(std::map<std::pair<int, int>, expr::Expr>& m,
                        const std::vector<std::string>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i)
    m.emplace(std::make_pair(static_cast<int>(i), static_cast<int>(i)), E(entries[i]));
}

inline std::vector<std::string> names(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

/// Block-diagonal complex structure on consecutive coordinate pairs
/// starting at `first`, zero elsewhere: J(e_{2k}) = e_{2k+1}, J(e_{2k+1}) = -e_{2k}.
inline std::vector<std::vector<std::string>> pair_J(int n, int first) {
  std::vector<std::vector<std::string>> m(static_cast<std::size_t>(n),
                                          std::vector<std::string>(static_cast<std::size_t>(n), "0"));
  for (int k = first; k + 1 < n; k += 2) {
    m[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(k)] = "1";
    m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k + 1)] = "-1";
  }
  return m;
}

inline Fixture example1() {
  Fixture f;
  f.name = "example1";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 6);
  s.base_coords = names("y", 3);
  diag_metric(s.metric, {"x6^2", "x6^2", "x6^2", "x6^2", "x6^2", "1"});
  diag_metric(s.base_metric, {"y3^2", "y3^2", "1"});
  for (const char* c : {"x4", "x5", "x6"}) s.map_components.push_back(E(c));
  s.domain.push_back(E("x6"));
  s.frame_pivots = subm::FramePivots{{0, 1, 2}, {3, 4, 5}};
  s.fiber_coords = {0, 1, 2};
  f.default_points = {{0, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 0, 0.5}, {0, 0, 0, 0, 0, 2}};
  f.expected_verdict = Verdict::Strict;
  f.expected = {
      {"C_V", {1.0, 1e-9}},          {"C_H", {0.0, 1e-12}},
      {"delta_N", {-3.0, 1e-8}},     {"normTV_sq", {3.0, 1e-9}},
      {"normAH_sq", {0.0, 1e-12}},   {"inf_CL_V", {1.0, 1e-6}},
      {"sup_CL_V", {1.0, 1e-6}},     {"delta_C_V", {7.0 / 6.0, 1e-6}},
      {"hat_delta_C_V", {7.0 / 6.0, 1e-6}},
      {"gap_delta", {1.0 / 36.0, 1e-6}},
      {"gap_hat", {1.0 / 36.0, 1e-6}},
  };
  return f;
}

inline Fixture example2() {
  Fixture f;
  f.name = "example2";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 6);
  s.base_coords = names("y", 3);
  diag_metric(s.metric, {"1", "x2^2", "1", "x4^2", "1", "x6^2"});
  diag_metric(s.base_metric, {"1", "1", "1"});
  for (const char* c : {"x1", "x3", "x5"}) s.map_components.push_back(E(c));
  for (const char* c : {"x2", "x4", "x6"}) s.domain.push_back(E(c));
  s.frame_pivots = subm::FramePivots{{1, 3, 5}, {0, 2, 4}};
  s.fiber_coords = {1, 3, 5};
  f.default_points = {{0.7, 1.1, -0.4, 0.9, 0.3, 1.3}};
  f.expected_verdict = Verdict::Equality;
  f.expected = {{"C_V", {0.0, 1e-12}}, {"C_H", {0.0, 1e-12}}, {"delta_N", {0.0, 1e-10}},
                {"gap_delta", {0.0, 1e-10}}, {"gap_hat", {0.0, 1e-10}}};
  return f;
}

inline Fixture example3() {
  Fixture f;
  f.name = "example3";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 6);
  s.base_coords = names("y", 3);
  diag_metric(s.metric, {"1", "1", "1", "1", "1", "1"});
  diag_metric(s.base_metric, {"1", "1", "1"});
  s.map_components.push_back(E("(x1 - x3)/sqrt(2)"));
  s.map_components.push_back(E("x4"));
  s.map_components.push_back(E("(x5 + x6)/sqrt(2)"));
  s.frame_pivots = subm::FramePivots{{0, 1, 4}, {0, 3, 4}};
  s.fiber_flat = true;
  thm::SpaceFormModel sf;
  sf.kind = thm::SpaceFormKind::Real;
  sf.c = E("0");
  s.space_form = sf;
  f.default_points = {{0.2, -0.5, 0.8, 0.1, -0.3, 0.6}};
  f.expected_verdict = Verdict::Equality;
  f.expected = {{"C_V", {0.0, 1e-12}}, {"C_H", {0.0, 1e-12}},
                {"gap_delta", {0.0, 1e-10}}, {"gap_hat", {0.0, 1e-10}}};
  f.default_theorem = "rsf";
  return f;
}

inline Fixture example4() {
  Fixture f;
  f.name = "example4";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 8);
  s.base_coords = names("y", 4);
  diag_metric(s.metric, {"1", "1", "1", "1", "1", "1", "1", "1"});
  diag_metric(s.base_metric, {"1", "1", "1", "1"});
  for (int k = 0; k < 4; ++k) {
    const std::string a = "x" + std::to_string(2 * k + 1), b = "x" + std::to_string(2 * k + 2);
    s.map_components.push_back(E("sqrt(" + a + "^2 + " + b + "^2)"));
    s.domain.push_back(E(a + "^2 + " + b + "^2"));
  }
  s.frame_pivots = subm::FramePivots{{0, 2, 4, 6}, {1, 3, 5, 7}};
  io::StructureSpec st;
  st.kind = "J";
  st.matrix = pair_J(8, 0);
  s.structure = st;
  thm::SpaceFormModel sf;
  sf.kind = thm::SpaceFormKind::Complex;
  sf.c = E("0");
  s.space_form = sf;
  f.default_points = {{0.6, 0.8, 0.6, 0.8, 0.6, 0.8, 0.6, 0.8}};
  f.expected_verdict = Verdict::Strict;
  f.default_theorem = "csf";
  f.expected = {
      {"C_V", {1.0, 1e-9}},        {"C_H", {0.0, 1e-12}},
      {"trace_T_sq", {4.0, 1e-9}}, {"normTV_sq", {4.0, 1e-9}},
      {"delta_N", {4.0, 1e-8}},    {"inf_CL_V", {0.75, 1e-5}},
      {"sup_CL_V", {1.0, 1e-5}},   {"gap_delta", {11.625 / 144.0, 1e-5}},
      {"gap_hat", {13.5 / 144.0, 1e-5}},
  };
  return f;
}

inline Fixture example5() {
  Fixture f;
  f.name = "example5";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = {"t", "u1", "v1", "u2", "v2", "u3", "v3", "u4", "v4"};
  s.base_coords = {"z1", "z2", "z3", "z4"};
  std::vector<std::string> diag(9, "exp(2*t)");
  diag[0] = "1";
  diag_metric(s.metric, diag);
  diag_metric(s.base_metric, {"exp(2*t)", "exp(2*t)", "exp(2*t)", "exp(2*t)"});
  for (const char* c : {"u1", "v1", "u2", "v2"}) s.map_components.push_back(E(c));
  s.frame_pivots = subm::FramePivots{{0, 5, 6, 7, 8}, {1, 2, 3, 4}};
  s.fiber_coords = {0, 5, 6, 7, 8};
  io::StructureSpec st;
  st.kind = "phi";
  st.matrix = pair_J(9, 1);
  st.xi.assign(9, "0");
  st.xi[0] = "1";
  st.eta.assign(9, "0");
  st.eta[0] = "1";
  s.structure = st;
  thm::SpaceFormModel sf;
  sf.kind = thm::SpaceFormKind::WarpedGssf;
  sf.warp = E("exp(t)");
  sf.warp_coord = "t";
  s.space_form = sf;
  const Vec spatial = {0.3, -0.2, 0.5, 0.1, -0.4, 0.7, 0.2, -0.6};
  for (double t : {0.0, -1.0, 1.0}) {
    Vec p = {t};
    p.insert(p.end(), spatial.begin(), spatial.end());
    f.default_points.push_back(p);
  }
  f.expected_verdict = Verdict::Equality;
  f.default_theorem = "gssf";
  f.expected = {
      {"C_V", {0.0, 1e-12}},      {"C_H", {0.0, 1e-12}},
      {"normTV_sq", {0.0, 1e-12}}, {"normAH_sq", {0.0, 1e-12}},
      {"delta_N", {0.0, 1e-9}},   {"gap_delta", {0.0, 1e-9}},
      {"gap_hat", {0.0, 1e-9}},   {"c1", {1.0, 1e-10}},
      {"c2", {0.0, 1e-12}},       {"c3", {0.0, 1e-10}},
      {"normQ_sq", {4.0, 1e-9}},  {"normP_sq", {4.0, 1e-9}},
      {"normPV_sq", {0.0, 1e-12}},
  };
  return f;
}

inline Fixture example6() {
  Fixture f;
  f.name = "example6";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 6);
  s.base_coords = names("y", 3);
  diag_metric(s.metric, {"1", "1", "1", "1", "1", "1"});
  diag_metric(s.base_metric, {"1", "1", "1"});
  s.map_components.push_back(E("(x1 + 2*x2 + 2*x3)/3"));
  s.map_components.push_back(E("(2*x1 + x2 - 2*x3)/3"));
  s.map_components.push_back(E("(2*x4 - x5 + 2*x6)/3"));
  s.fiber_flat = true;
  f.default_points = {{0.4, -0.2, 0.7, 0.1, 0.9, -0.5}};
  f.expected_verdict = Verdict::Equality;
  f.expected = {{"C_V", {0.0, 1e-12}}, {"gap_delta", {0.0, 1e-10}}};
  return f;
}

inline Fixture flat_product() {
  Fixture f;
  f.name = "flat_product";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = names("x", 6);
  s.base_coords = names("y", 3);
  diag_metric(s.metric, {"1", "1", "1", "1", "1", "1"});
  diag_metric(s.base_metric, {"1", "1", "1"});
  for (const char* c : {"x4", "x5", "x6"}) s.map_components.push_back(E(c));
  s.frame_pivots = subm::FramePivots{{0, 1, 2}, {3, 4, 5}};
  s.fiber_coords = {0, 1, 2};
  thm::SpaceFormModel sf;
  sf.kind = thm::SpaceFormKind::Real;
  sf.c = E("0");
  s.space_form = sf;
  f.default_points = {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
  f.expected_verdict = Verdict::Equality;
  f.default_theorem = "rsf";
  f.expected = {{"C_V", {0.0, 1e-12}}, {"gap_delta", {0.0, 1e-12}}};
  return f;
}

inline Fixture heisenberg() {
  Fixture f;
  f.name = "heisenberg";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = {"x", "y", "z"};
  s.base_coords = {"y1", "y2"};
  s.metric.emplace(std::make_pair(0, 0), E("1"));
  s.metric.emplace(std::make_pair(1, 1), E("1 + x^2"));
  s.metric.emplace(std::make_pair(1, 2), E("-x"));
  s.metric.emplace(std::make_pair(2, 2), E("1"));
  diag_metric(s.base_metric, {"1", "1"});
  s.map_components.push_back(E("x"));
  s.map_components.push_back(E("y"));
  s.frame_pivots = subm::FramePivots{{2}, {0, 1}};
  s.fiber_coords = {2};
  f.default_points = {{0.4, 0.1, -0.2}};
  f.expected_verdict = Verdict::NotApplicable;
  f.expected = {{"A_V_010", {0.5, 1e-10}}, {"normAV_sq", {0.5, 1e-10}}};
  return f;
}

inline Fixture sphere_block() {
  Fixture f;
  f.name = "sphere_block";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = {"th", "ph", "z1", "z2", "z3", "z4"};
  s.base_coords = {"w1", "w2", "w3", "w4"};
  diag_metric(s.metric, {"1.69", "1.69*sin(th)^2", "1", "1", "1", "1"});
  diag_metric(s.base_metric, {"1", "1", "1", "1"});
  for (const char* c : {"z1", "z2", "z3", "z4"}) s.map_components.push_back(E(c));
  s.domain.push_back(E("sin(th)"));
  s.frame_pivots = subm::FramePivots{{0, 1}, {2, 3, 4, 5}};
  s.fiber_coords = {0, 1};
  f.default_points = {{0.9, 0.5, 0.1, -0.2, 0.3, 0.4}};
  f.expected_verdict = Verdict::NotApplicable;
  f.expected = {{"C_V", {0.0, 1e-12}}};
  return f;
}

inline Fixture hyperbolic6() {
  Fixture f;
  f.name = "hyperbolic6";
  SubmersionSpec& s = f.spec;
  s.name = f.name;
  s.coords = {"x1", "x2", "x3", "x4", "x5", "r"};
  s.base_coords = {"y1", "y2", "y3"};
  diag_metric(s.metric, {"exp(2*r)", "exp(2*r)", "exp(2*r)", "exp(2*r)", "exp(2*r)", "1"});
  diag_metric(s.base_metric, {"exp(2*y3)", "exp(2*y3)", "1"});
  for (const char* c : {"x4", "x5", "r"}) s.map_components.push_back(E(c));
  s.frame_pivots = subm::FramePivots{{0, 1, 2}, {3, 4, 5}};
  s.fiber_coords = {0, 1, 2};
  thm::SpaceFormModel sf;
  sf.kind = thm::SpaceFormKind::Real;
  sf.c = E("-1");
  s.space_form = sf;
  f.default_points = {{0.2, -0.3, 0.4, 0.1, -0.2, 0.5}};
  f.expected_verdict = Verdict::Strict;
  f.default_theorem = "rsf";
  f.expected = {
      {"C_V", {1.0, 1e-9}},
      {"rho_V_N1", {-1.0, 1e-9}},
      {"rho_H_N1", {-1.0, 1e-9}},
      {"gap_delta", {1.0 / 36.0, 1e-6}},
  };
  return f;
}

}  // namespace detail

inline std::vector<Fixture> catalog() {
  std::vector<Fixture> out;
  out.push_back(detail::example1());
  out.push_back(detail::example2());
  out.push_back(detail::example3());
  out.push_back(detail::example4());
  out.push_back(detail::example5());
  out.push_back(detail::example6());
  out.push_back(detail::flat_product());
  out.push_back(detail::heisenberg());
  out.push_back(detail::sphere_block());
  out.push_back(detail::hyperbolic6());
  for (auto& f : out) f.spec.validate();
  return out;
}

inline const Fixture& find(const std::vector<Fixture>& cat, const std::string& name) {
  for (const auto& f : cat)
    if (f.name == name) return f;
  throw std::invalid_argument("unknown fixture: " + name);
}

}  // namespace casorati::fixtures
