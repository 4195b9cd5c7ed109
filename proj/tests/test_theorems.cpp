#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "casorati/fixtures.hpp"
#include "casorati/pipeline.hpp"

using namespace casorati;
using numkit::Mat;
using numkit::SymMatrix;
using numkit::Vec;
using thm::GssfConstants;
using thm::SpaceFormKind;
using thm::SpaceFormModel;
using thm::StructureAtPoint;

namespace {

pipeline::PointAnalysis analyze_fixture(const std::string& name, int point_index = 0) {
  const auto cat = fixtures::catalog();
  const auto& f = fixtures::find(cat, name);
  return pipeline::analyze_point(f.spec, f.default_points.at(static_cast<std::size_t>(point_index)));
}

pipeline::TheoremOutcome outcome_for(const std::string& name, const std::string& kind,
                                     int point_index = 0) {
  const auto cat = fixtures::catalog();
  const auto& f = fixtures::find(cat, name);
  auto an = pipeline::analyze_point(f.spec, f.default_points.at(static_cast<std::size_t>(point_index)));
  return pipeline::evaluate_theorem(f.spec, an, thm::TheoremKind::parse(kind));
}

SymMatrix euclidean(int n) {
  SymMatrix g(n);
  for (int i = 0; i < n; ++i) g(i, i) = 1.0;
  return g;
}

// phi acting as J on consecutive pairs starting at coordinate `first`
StructureAtPoint pair_structure(int n, int first, bool contact, int xi_index = -1) {
  StructureAtPoint st;
  st.phi = Mat(n, n);
  for (int k = first; k + 1 < n; k += 2) {
    if (contact && (k == xi_index || k + 1 == xi_index)) continue;
    st.phi(k + 1, k) = 1.0;
    st.phi(k, k + 1) = -1.0;
  }
  st.contact = contact;
  if (contact) {
    st.xi.assign(static_cast<std::size_t>(n), 0.0);
    st.eta.assign(static_cast<std::size_t>(n), 0.0);
    st.xi[static_cast<std::size_t>(xi_index)] = 1.0;
    st.eta[static_cast<std::size_t>(xi_index)] = 1.0;
  }
  return st;
}

// Euclidean-orthonormal synthetic frame wrapped as jets, plus matching
// projectors, for structure-quantity unit tests that need no submersion.
struct SyntheticSplit {
  subm::AdaptedFrame frame;
  subm::Projectors proj;
};

SyntheticSplit make_split(int n, const std::vector<Vec>& vertical,
                          const std::vector<Vec>& horizontal) {
  SyntheticSplit out;
  out.frame.n = n;
  out.frame.ell = static_cast<int>(vertical.size());
  out.frame.s = static_cast<int>(horizontal.size());
  auto tojets = [&](const std::vector<Vec>& vs) {
    std::vector<numkit::JetVec> o;
    for (const auto& v : vs) {
      numkit::JetVec jv;
      for (double x : v) jv.push_back(numkit::Jet::constant(x, n, 0));
      o.push_back(jv);
    }
    return o;
  };
  out.frame.vertical = tojets(vertical);
  out.frame.horizontal = tojets(horizontal);
  auto projector = [&](const std::vector<Vec>& vs) {
    numkit::JetMat p(n, n, numkit::Jet::constant(0.0, n, 0));
    for (const auto& v : vs)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          p(i, j) = p(i, j) + numkit::Jet::constant(v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)], n, 0);
    return p;
  };
  out.proj.Pv = projector(vertical);
  out.proj.Ph = projector(horizontal);
  return out;
}

}  // namespace

TEST(ModelCurvature, RealZeroAndConstant) {
  SpaceFormModel m;
  m.kind = SpaceFormKind::Real;
  GssfConstants k{0.0, 0.0, 0.0};
  const SymMatrix g = euclidean(4);
  Vec z1 = {1, 0, 0, 0}, z2 = {0, 1, 0, 0}, z3 = {0, 1, 0, 0}, z4 = {1, 0, 0, 0};
  EXPECT_NEAR(thm::model_curvature_low(m, k, std::nullopt, g, z1, z2, z3, z4), 0.0, 1e-15);
  k.c1 = -2.5;
  EXPECT_NEAR(thm::model_curvature_low(m, k, std::nullopt, g, z1, z2, z3, z4), -2.5, 1e-14);
}

TEST(ModelCurvature, ComplexHolomorphicSectional) {
  // R(Z, JZ, JZ, Z) = c |Z|^4
  SpaceFormModel m;
  m.kind = SpaceFormKind::Complex;
  const double c = 1.7;
  GssfConstants k{c / 4.0, c / 4.0, 0.0};
  const SymMatrix g = euclidean(4);
  auto st = pair_structure(4, 0, false);
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    Vec z(4);
    double n2 = 0;
    for (double& x : z) {
      x = gauss(rng);
      n2 += x * x;
    }
    Vec jz(4, 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) jz[static_cast<std::size_t>(i)] += st.phi(i, j) * z[static_cast<std::size_t>(j)];
    const double r = thm::model_curvature_low(m, k, st, g, z, jz, jz, z);
    EXPECT_NEAR(r, c * n2 * n2, 1e-10);
  }
}

TEST(ModelCurvature, GssfReebPlane) {
  // R(X, xi, xi, X) = c1 - c3 for unit X orthogonal to xi
  SpaceFormModel m;
  m.kind = SpaceFormKind::GeneralizedSasakian;
  GssfConstants k{0.8, 0.3, -0.4};
  const SymMatrix g = euclidean(5);
  auto st = pair_structure(5, 0, true, 4);
  Vec x = {1, 0, 0, 0, 0};
  EXPECT_NEAR(thm::model_curvature_low(m, k, st, g, x, st.xi, st.xi, x), k.c1 - k.c3, 1e-13);
  // and phi xi = 0 kills the c2 block there
  GssfConstants k2{0.8, 123.0, -0.4};
  EXPECT_NEAR(thm::model_curvature_low(m, k2, st, g, x, st.xi, st.xi, x), k.c1 - k.c3, 1e-13);
}

TEST(ModelCurvature, MatchesRiemannOnModelFixtures) {
  // flat (c = 0) and hyperbolic (c = -1) real space forms
  for (const char* name : {"flat_product", "hyperbolic6"}) {
    auto an = analyze_fixture(name);
    ASSERT_TRUE(an.constants.has_value());
    ASSERT_TRUE(an.model_contr.has_value());
    EXPECT_NEAR(an.model_contr->two_tau_V, 2 * an.sc.tau_V_N1, 1e-7) << name;
    EXPECT_NEAR(an.model_contr->two_tau_H, 2 * an.sc.tau_H_N1, 1e-7) << name;
    EXPECT_NEAR(an.model_contr->mixed_sum, an.sc.mixed_sum, 1e-7) << name;
  }
}

TEST(ModelCurvature, Example5WarpedConstantsHaveFlippedSign) {
  // The declared warped-product constants follow the printed recipe
  // (f'^2/f^2, 0, ...) = (1, 0, 0), but the metric dt^2 + e^{2t} sum dz^2 is
  // hyperbolic: the curvature actually realized is the c1 = -1 model.  The
  // engine keeps the declared values for the printed-theorem displays and
  // the sign-corrected ones validate geometry.riemann here.
  auto an = analyze_fixture("example5");
  ASSERT_TRUE(an.constants.has_value());
  EXPECT_NEAR(an.constants->c1, 1.0, 1e-10);
  EXPECT_NEAR(an.constants->c2, 0.0, 1e-12);
  EXPECT_NEAR(an.constants->c3, 0.0, 1e-10);

  const auto cat = fixtures::catalog();
  const auto& f = fixtures::find(cat, "example5");
  GssfConstants flipped{-an.constants->c1, an.constants->c2, an.constants->c3};
  auto mc = thm::model_contractions(*f.spec.space_form, flipped, an.structure, an.g_val, an.frame);
  EXPECT_NEAR(mc.two_tau_V, 2 * an.sc.tau_V_N1, 1e-8);
  EXPECT_NEAR(mc.two_tau_H, 2 * an.sc.tau_H_N1, 1e-8);
  EXPECT_NEAR(mc.mixed_sum, an.sc.mixed_sum, 1e-8);
}

TEST(StructureQuantities, InvariantAndAntiInvariantLimits) {
  // invariant split: vertical = one full J-pair + another: ||Q||^2 = ell
  const int n = 8;
  auto st = pair_structure(n, 0, false);
  std::vector<Vec> vert, hor;
  for (int i : {0, 1, 2, 3}) {
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    vert.push_back(v);
  }
  for (int i : {4, 5, 6, 7}) {
    Vec h(static_cast<std::size_t>(n), 0.0);
    h[static_cast<std::size_t>(i)] = 1.0;
    hor.push_back(h);
  }
  auto split = make_split(n, vert, hor);
  auto q = thm::structure_quantities(st, split.frame, euclidean(n), split.proj);
  EXPECT_NEAR(q.normQ_sq, 4.0, 1e-13);  // ell cos^2(0)
  EXPECT_NEAR(q.normPV_sq, 0.0, 1e-13);
  for (double a : q.slant_angles) EXPECT_NEAR(a, 0.0, 1e-7);

  // anti-invariant: vertical = one coordinate from each pair
  std::vector<Vec> vert2, hor2;
  for (int i : {0, 2, 4, 6}) {
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    vert2.push_back(v);
  }
  for (int i : {1, 3, 5, 7}) {
    Vec h(static_cast<std::size_t>(n), 0.0);
    h[static_cast<std::size_t>(i)] = 1.0;
    hor2.push_back(h);
  }
  auto split2 = make_split(n, vert2, hor2);
  auto q2 = thm::structure_quantities(st, split2.frame, euclidean(n), split2.proj);
  EXPECT_NEAR(q2.normQ_sq, 0.0, 1e-13);  // ell cos^2(pi/2)
  for (double a : q2.slant_angles) EXPECT_NEAR(a, M_PI / 2, 1e-7);
}

TEST(StructureQuantities, ContactSlantLemmaValue) {
  // two slant-theta planes plus the Reeb direction: ell = 5, theta = pi/3,
  // ||Q||^2 = (ell-1) cos^2 theta = 1
  const int n = 9;
  const double theta = M_PI / 3;
  auto st = pair_structure(n, 0, true, 8);
  const double c = std::cos(theta), s = std::sin(theta);
  auto unit = [&](int i) {
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    return v;
  };
  Vec w1(static_cast<std::size_t>(n), 0.0), w2(static_cast<std::size_t>(n), 0.0);
  w1[1] = c;
  w1[2] = s;
  w2[5] = c;
  w2[6] = s;
  std::vector<Vec> vert = {unit(8), unit(0), w1, unit(4), w2};
  Vec h1(static_cast<std::size_t>(n), 0.0), h2(static_cast<std::size_t>(n), 0.0);
  h1[1] = -s;
  h1[2] = c;
  h2[5] = -s;
  h2[6] = c;
  std::vector<Vec> hor = {h1, unit(3), h2, unit(7)};
  auto split = make_split(n, vert, hor);
  auto q = thm::structure_quantities(st, split.frame, euclidean(n), split.proj);
  EXPECT_EQ(q.xi_position, thm::XiPosition::Vertical);
  EXPECT_NEAR(q.normQ_sq, 1.0, 1e-12);
  EXPECT_NEAR(q.normPV_sq, 4.0 * s * s, 1e-12);
  // pointwise angle estimates: 0 for xi (skipped: phi xi = 0), theta for the rest
  for (double a : q.slant_angles) EXPECT_NEAR(a, theta, 1e-9);

  // the corollary substitution reproduces the measured combination
  thm::SlantDeclaration sd;
  sd.cls = "slant";
  sd.theta = theta;
  const double combo = thm::corollary_combo(sd, 5, q.normP_sq, true);
  EXPECT_NEAR(combo, q.normQ_sq + q.normP_sq + 2 * q.normPV_sq, 1e-12);
}

TEST(ModelContractions, ComplexSpaceFormScalarSums) {
  // invariant split of a complex space form: the ambient vertical sum is
  // (c/4) l(l-1) + (3c/4) ||Q||^2
  const int n = 8;
  const double c = 1.3;
  SpaceFormModel m;
  m.kind = SpaceFormKind::Complex;
  GssfConstants k{c / 4.0, c / 4.0, 0.0};
  auto st = pair_structure(n, 0, false);
  std::vector<Vec> vert, hor;
  for (int i : {0, 1, 2, 3}) {
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    vert.push_back(v);
  }
  for (int i : {4, 5, 6, 7}) {
    Vec h(static_cast<std::size_t>(n), 0.0);
    h[static_cast<std::size_t>(i)] = 1.0;
    hor.push_back(h);
  }
  auto split = make_split(n, vert, hor);
  auto q = thm::structure_quantities(st, split.frame, euclidean(n), split.proj);
  auto mc = thm::model_contractions(m, k, st, euclidean(n), split.frame);
  EXPECT_NEAR(mc.two_tau_V, c / 4.0 * 4 * 3 + 3 * c / 4.0 * q.normQ_sq, 1e-12);
  EXPECT_NEAR(mc.two_tau_H, c / 4.0 * 4 * 3 + 3 * c / 4.0 * q.normP_sq, 1e-12);
  EXPECT_NEAR(mc.mixed_sum, c / 4.0 * 16 + 3 * c / 4.0 * q.normPV_sq, 1e-12);
}

TEST(ModelContractions, GssfHorizontalReebBranch) {
  // contact split with the Reeb field horizontal: the c3 terms land on the
  // horizontal and mixed sums only
  const int n = 7;
  const double theta = 0.6;
  auto st = pair_structure(n, 0, true, 6);
  SpaceFormModel m;
  m.kind = SpaceFormKind::GeneralizedSasakian;
  GssfConstants k{0.7, -0.4, 0.9};
  const double c = std::cos(theta), s = std::sin(theta);
  auto unit = [&](int i) {
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    return v;
  };
  Vec w(static_cast<std::size_t>(n), 0.0), hperp(static_cast<std::size_t>(n), 0.0);
  w[1] = c;
  w[2] = s;
  hperp[1] = -s;
  hperp[2] = c;
  std::vector<Vec> vert = {unit(0), w, unit(4)};
  std::vector<Vec> hor = {hperp, unit(3), unit(5), unit(6)};
  auto split = make_split(n, vert, hor);
  auto q = thm::structure_quantities(st, split.frame, euclidean(n), split.proj);
  EXPECT_EQ(q.xi_position, thm::XiPosition::Horizontal);
  auto mc = thm::model_contractions(m, k, st, euclidean(n), split.frame);
  const int ell = 3, ss = 4;
  EXPECT_NEAR(mc.two_tau_V, k.c1 * ell * (ell - 1) + 3 * k.c2 * q.normQ_sq, 1e-12);
  EXPECT_NEAR(mc.two_tau_H,
              k.c1 * ss * (ss - 1) + 3 * k.c2 * q.normP_sq - 2 * (ss - 1) * k.c3, 1e-12);
  EXPECT_NEAR(mc.mixed_sum, k.c1 * ss * ell + 3 * k.c2 * q.normPV_sq - k.c3 * ell, 1e-12);
}

TEST(TheoremRhs, GeneralEqualityOnExample2) {
  auto out = outcome_for("example2", "general");
  EXPECT_NEAR(out.verdict.rhs_delta, out.verdict.lhs, 1e-12);
  EXPECT_NEAR(out.verdict.gap_delta, 0.0, 1e-12);
  EXPECT_NEAR(out.verdict.gap_hat, 0.0, 1e-12);
  EXPECT_TRUE(out.verdict.flags.all());
}

TEST(TheoremRhs, RsfFlatReducesToGeneral) {
  auto out = outcome_for("flat_product", "rsf");
  ASSERT_TRUE(out.rhs.has_kind_display);
  // corrected specialization agrees with the general form under the model
  EXPECT_NEAR(out.rhs.crosscheck_delta, 0.0, 1e-12);
  EXPECT_NEAR(out.rhs.crosscheck_hat, 0.0, 1e-12);
  // printed form drops the c factor in the mixed term: flagged difference
  EXPECT_NEAR(out.rhs.printed_vs_corrected_delta, 2.0 / ((3 - 1.0) * (3 - 1.0)), 1e-12);
}

TEST(TheoremRhs, RsfHyperbolicCrossCheck) {
  auto out = outcome_for("hyperbolic6", "rsf");
  ASSERT_TRUE(out.rhs.has_kind_display);
  EXPECT_NEAR(out.rhs.crosscheck_delta, 0.0, 1e-9);
  EXPECT_NEAR(out.rhs.crosscheck_hat, 0.0, 1e-9);
  // c = -1: printed mixed term 2/((s-1)(l-1)), corrected 2c/((s-1)(l-1))
  EXPECT_NEAR(out.rhs.printed_vs_corrected_delta, 2.0 / 4.0 - (-2.0 / 4.0), 1e-12);
  // the operational verdict is strict with the expected gap
  EXPECT_NEAR(out.verdict.gap_delta, 1.0 / 36.0, 1e-6);
  EXPECT_TRUE(out.verdict.strict);
}

TEST(TheoremRhs, CsfFlatExample4) {
  auto out = outcome_for("example4", "csf");
  ASSERT_TRUE(out.rhs.has_kind_display);
  EXPECT_NEAR(out.rhs.crosscheck_delta, 0.0, 1e-10);
  EXPECT_NEAR(out.rhs.crosscheck_hat, 0.0, 1e-10);
  EXPECT_FALSE(out.verdict.flags.quasi_umbilical);
  EXPECT_TRUE(out.verdict.strict);
  EXPECT_NEAR(out.verdict.gap_delta, 11.625 / 144.0, 1e-5);
  EXPECT_NEAR(out.verdict.gap_hat, 13.5 / 144.0, 1e-5);
}

TEST(TheoremRhs, GssfExample5CrossCheckAndStrayTerm) {
  auto out = outcome_for("example5", "gssf");
  ASSERT_TRUE(out.rhs.has_kind_display);
  // specialized display equals the general display under model curvature
  EXPECT_NEAR(out.rhs.crosscheck_delta, 0.0, 1e-9);
  EXPECT_NEAR(out.rhs.crosscheck_hat, 0.0, 1e-9);
  // printed hat form carries the stray rho_V^{N1}/(s(s-1)) term
  EXPECT_NEAR(out.rhs.printed_vs_corrected_hat, -1.0 / 12.0, 1e-9);
  EXPECT_NEAR(out.rhs.printed_vs_corrected_delta, 0.0, 1e-12);
  // operational verdict: equality
  EXPECT_NEAR(out.verdict.gap_delta, 0.0, 1e-9);
  EXPECT_NEAR(out.verdict.gap_hat, 0.0, 1e-9);
  EXPECT_TRUE(out.verdict.flags.all());
}

TEST(TheoremRhs, OperationalGapMatchesProofPolynomials) {
  // rhs - lhs = P_HV / (s(s-1) l(l-1)) and likewise for the hat pair
  for (const char* name : {"example1", "example2", "example4", "example5", "hyperbolic6"}) {
    auto out = outcome_for(name, "general");
    auto an = analyze_fixture(name);
    const double D = an.s * (an.s - 1.0) * an.ell * (an.ell - 1.0);
    EXPECT_NEAR(out.verdict.gap_delta, out.polys.P_HV / D, 1e-10) << name;
    EXPECT_NEAR(out.verdict.gap_hat, out.polys.Q_HV / D, 1e-10) << name;
  }
}

TEST(TheoremRhs, EqualityFlagPatterns) {
  {
    auto out = outcome_for("example1", "general");
    EXPECT_FALSE(out.verdict.flags.quasi_umbilical);  // T_ll = T_11, not 2 T_11
    EXPECT_TRUE(out.verdict.flags.off_diagonal_zero);
    EXPECT_TRUE(out.verdict.flags.A_zero);
    EXPECT_TRUE(out.verdict.strict);
  }
  {
    auto out = outcome_for("example4", "csf");
    EXPECT_FALSE(out.verdict.flags.quasi_umbilical);
    EXPECT_TRUE(out.verdict.flags.off_diagonal_zero);
  }
  {
    auto out = outcome_for("example3", "rsf");
    EXPECT_TRUE(out.verdict.flags.all());
    EXPECT_NEAR(out.verdict.gap_delta, 0.0, 1e-12);
  }
}

TEST(ProofPolynomials, NonNegativeOnRandomTensorFamilies) {
  std::mt19937 rng(777);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 30; ++trial) {
    const int ell = 3 + trial % 3, s = 3 + (trial / 3) % 2;
    subm::ONeillData d;
    d.ell = ell;
    d.s = s;
    d.T_H = subm::Block3(ell, ell, s);
    d.A_V = subm::Block3(s, s, ell);
    for (int a = 0; a < s; ++a)
      for (int i = 0; i < ell; ++i)
        for (int j = i; j < ell; ++j) {
          const double v = gauss(rng);
          d.T_H.at(i, j, a) = v;
          d.T_H.at(j, i, a) = v;
        }
    for (int a = 0; a < ell; ++a)
      for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) {
          const double v = gauss(rng);
          d.A_V.at(i, j, a) = v;
          d.A_V.at(j, i, a) = -v;
        }
    for (int i = 0; i < ell; ++i)
      for (int j = 0; j < ell; ++j)
        for (int a = 0; a < s; ++a) d.normTH_sq += d.T_H.at(i, j, a) * d.T_H.at(i, j, a);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        for (int a = 0; a < ell; ++a) d.normAV_sq += d.A_V.at(i, j, a) * d.A_V.at(i, j, a);
    Vec trT(static_cast<std::size_t>(s), 0.0);
    for (int a = 0; a < s; ++a)
      for (int i = 0; i < ell; ++i) trT[static_cast<std::size_t>(a)] += d.T_H.at(i, i, a);
    for (double t : trT) d.trace_T_sq += t * t;

    auto cs = curv::delta_casorati(d, 1234 + static_cast<std::uint64_t>(trial));
    auto polys = thm::proof_polynomials(cs, d);
    EXPECT_GE(polys.P_HV, -1e-9) << trial;
    EXPECT_GE(polys.Q_HV, -1e-9) << trial;
  }
}

TEST(TheoremRhs, CorollaryClassesEvaluate) {
  // the slant corollary on example4's complex structure with theta = 0
  // (invariant-style declaration) produces a finite RHS and the same
  // operational verdict
  auto out = outcome_for("example4", "corollary:slant:theta=0");
  ASSERT_TRUE(out.rhs.has_kind_display);
  EXPECT_TRUE(std::isfinite(out.rhs.kind_delta));
  EXPECT_NEAR(out.verdict.gap_delta, 11.625 / 144.0, 1e-5);
  auto out2 = outcome_for("example4", "corollary:bi_slant:theta1=0.3,theta2=0.9,d1=1,d2=1");
  EXPECT_TRUE(std::isfinite(out2.rhs.kind_delta));
}

TEST(TheoremRhs, StructureChecksOnFixtures) {
  for (const char* name : {"example4", "example5"}) {
    auto an = analyze_fixture(name);
    EXPECT_LT(an.residuals.at("structure_square"), 1e-12) << name;
    EXPECT_LT(an.residuals.at("structure_compat"), 1e-12) << name;
  }
  auto an5 = analyze_fixture("example5");
  ASSERT_TRUE(an5.structq.has_value());
  EXPECT_EQ(an5.structq->xi_position, thm::XiPosition::Vertical);
  EXPECT_NEAR(an5.structq->normQ_sq, 4.0, 1e-10);
  EXPECT_NEAR(an5.structq->normP_sq, 4.0, 1e-10);
  EXPECT_NEAR(an5.structq->normPV_sq, 0.0, 1e-12);
}
