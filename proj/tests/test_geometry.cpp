#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "casorati/geometry.hpp"

using namespace casorati::geometry;
using casorati::expr::Expr;
using casorati::numkit::Jet;

namespace {

MetricField diag_field(const std::vector<std::string>& coords,
                       const std::vector<std::string>& entries) {
  std::map<std::pair<int, int>, Expr> m;
  for (std::size_t i = 0; i < entries.size(); ++i)
    m.emplace(std::make_pair(static_cast<int>(i), static_cast<int>(i)), Expr::parse(entries[i]));
  return MetricField(coords, m);
}

std::map<std::string, Jet> jet_env(const std::vector<std::string>& coords, const Vec& p,
                                   int order = 3) {
  std::map<std::string, Jet> env;
  for (std::size_t i = 0; i < coords.size(); ++i)
    env[coords[i]] = Jet::variable(p[i], static_cast<int>(coords.size()), static_cast<int>(i), order);
  return env;
}

struct Geo {
  JetMat g, ginv;
  Christoffel gamma;
  CurvaturePack pack;
};

Geo build(const MetricField& f, const Vec& p) {
  Geo geo;
  geo.g = f.eval(jet_env(f.coords(), p));
  geo.ginv = casorati::numkit::inverse(geo.g);
  geo.gamma = Christoffel::compute(geo.g, geo.ginv);
  geo.pack = riemann(geo.g, geo.ginv, geo.gamma, p);
  return geo;
}

// Independent oracle: Christoffel symbols from value-level metric
// evaluations and central finite differences of the entries.
std::vector<double> fd_christoffel(const MetricField& f, const Vec& p, double h = 1e-6) {
  const int n = f.dim();
  auto metric_at = [&](const Vec& q) {
    std::map<std::string, double> env;
    for (int i = 0; i < n; ++i) env[f.coords()[static_cast<std::size_t>(i)]] = q[static_cast<std::size_t>(i)];
    return f.eval_values(env);
  };
  std::vector<SymMatrix> dg;
  for (int k = 0; k < n; ++k) {
    Vec hi = p, lo = p;
    hi[static_cast<std::size_t>(k)] += h;
    lo[static_cast<std::size_t>(k)] -= h;
    SymMatrix ghi = metric_at(hi), glo = metric_at(lo), d(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = (ghi(i, j) - glo(i, j)) / (2 * h);
    dg.push_back(d);
  }
  const Mat gi = casorati::numkit::inverse(metric_at(p).mat());
  std::vector<double> gamma(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += gi(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                             dg[static_cast<std::size_t>(l)](i, j));
        gamma[(static_cast<std::size_t>(k) * n + i) * n + j] = 0.5 * acc;
      }
  return gamma;
}

// Independent curvature oracle: lowered Riemann entry from finite
// differences of the FD Christoffel symbols.
double fd_riemann_low(const MetricField& f, const Vec& p, int i, int j, int k, int l,
                      double h = 1e-4) {
  const int n = f.dim();
  auto gam = [&](const Vec& q) { return fd_christoffel(f, q, 1e-5); };
  auto at = [&](const std::vector<double>& g, int a, int b, int c) {
    return g[(static_cast<std::size_t>(a) * n + b) * n + c];
  };
  Vec pi = p, mi = p, pj = p, mj = p;
  pi[static_cast<std::size_t>(i)] += h;
  mi[static_cast<std::size_t>(i)] -= h;
  pj[static_cast<std::size_t>(j)] += h;
  mj[static_cast<std::size_t>(j)] -= h;
  const auto gpi = gam(pi), gmi = gam(mi), gpj = gam(pj), gmj = gam(mj), g0 = gam(p);
  std::map<std::string, double> env;
  for (int a = 0; a < n; ++a) env[f.coords()[static_cast<std::size_t>(a)]] = p[static_cast<std::size_t>(a)];
  const SymMatrix gv = f.eval_values(env);
  double acc = 0.0;
  for (int m = 0; m < n; ++m) {
    double up = (at(gpi, m, j, k) - at(gmi, m, j, k)) / (2 * h) -
                (at(gpj, m, i, k) - at(gmj, m, i, k)) / (2 * h);
    for (int s = 0; s < n; ++s)
      up += at(g0, m, i, s) * at(g0, s, j, k) - at(g0, m, j, s) * at(g0, s, i, k);
    acc += gv(m, l) * up;
  }
  return acc;
}

}  // namespace

TEST(Christoffel, EuclideanVanishes) {
  auto f = diag_field({"x", "y", "z"}, {"1", "1", "1"});
  auto geo = build(f, {0.3, -0.7, 1.2});
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(geo.gamma.value(k, i, j), 0.0, 1e-15);
}

TEST(Christoffel, WarpedMetricClosedForm) {
  // g = x6^2 (dx1^2 + ... + dx5^2) + dx6^2:
  // Gamma^{xi}_{xi x6} = 1/x6, Gamma^{x6}_{xi xi} = -x6 for i <= 5
  std::vector<std::string> coords = {"x1", "x2", "x3", "x4", "x5", "x6"};
  auto f = diag_field(coords, {"x6^2", "x6^2", "x6^2", "x6^2", "x6^2", "1"});
  const double x6 = 1.7;
  auto geo = build(f, {0, 0, 0, 0, 0, x6});
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(geo.gamma.value(i, i, 5), 1.0 / x6, 1e-13);
    EXPECT_NEAR(geo.gamma.value(i, 5, i), 1.0 / x6, 1e-13);
    EXPECT_NEAR(geo.gamma.value(5, i, i), -x6, 1e-13);
  }
  EXPECT_NEAR(geo.gamma.value(5, 5, 5), 0.0, 1e-14);
  EXPECT_NEAR(geo.gamma.value(0, 1, 5), 0.0, 1e-14);
}

TEST(Christoffel, SquaredCoordinateMetric) {
  // g = dx1^2 + x2^2 dx2^2 + ... : Gamma^{xi}_{xi xi} = 1/xi for i in {2,4,6}
  std::vector<std::string> coords = {"x1", "x2", "x3", "x4", "x5", "x6"};
  auto f = diag_field(coords, {"1", "x2^2", "1", "x4^2", "1", "x6^2"});
  auto geo = build(f, {0.3, 1.1, -0.2, 0.9, 0.5, 1.4});
  EXPECT_NEAR(geo.gamma.value(1, 1, 1), 1.0 / 1.1, 1e-13);
  EXPECT_NEAR(geo.gamma.value(3, 3, 3), 1.0 / 0.9, 1e-13);
  EXPECT_NEAR(geo.gamma.value(5, 5, 5), 1.0 / 1.4, 1e-13);
  EXPECT_NEAR(geo.gamma.value(0, 0, 0), 0.0, 1e-14);
}

TEST(Christoffel, MatchesFiniteDifferenceOracle) {
  std::vector<std::string> coords = {"x1", "x2", "x3", "x6"};
  std::map<std::pair<int, int>, Expr> entries;
  entries.emplace(std::make_pair(0, 0), Expr::parse("1 + x2^2"));
  entries.emplace(std::make_pair(0, 1), Expr::parse("-x1*x3/4"));
  entries.emplace(std::make_pair(1, 1), Expr::parse("exp(x6/2)"));
  entries.emplace(std::make_pair(2, 2), Expr::parse("2 + sin(x1)"));
  entries.emplace(std::make_pair(3, 3), Expr::parse("1"));
  MetricField f(coords, entries);
  const Vec p = {0.4, 0.6, -0.3, 0.8};
  auto geo = build(f, p);
  auto oracle = fd_christoffel(f, p);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        EXPECT_NEAR(geo.gamma.value(k, i, j),
                    oracle[(static_cast<std::size_t>(k) * 4 + i) * 4 + j], 1e-5);
}

TEST(Riemann, EuclideanFlat) {
  auto f = diag_field({"x", "y", "z"}, {"1", "1", "1"});
  auto geo = build(f, {0.3, -0.7, 1.2});
  for (double v : geo.pack.riemann_low) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(geo.pack.scalar2tau, 0.0, 1e-15);
}

TEST(Riemann, RoundSphereBlockSectional) {
  // r^2 (dth^2 + sin^2 th dph^2) + flat factor: K(th, ph plane) = 1/r^2
  const double r = 1.3;
  std::vector<std::string> coords = {"th", "ph", "z1", "z2"};
  auto f = diag_field(coords, {"1.69", "1.69*sin(th)^2", "1", "1"});
  const Vec p = {0.9, 0.5, 0.0, 0.0};
  auto geo = build(f, p);
  Vec u = {1, 0, 0, 0}, v = {0, 1, 0, 0};
  const double K = sectional(geo.pack, SymMatrix(geo.g.values()), u, v);
  EXPECT_NEAR(K, 1.0 / (r * r), 1e-10);
  // against the independent FD curvature oracle
  const double num = fd_riemann_low(f, p, 0, 1, 1, 0);
  double uu = geo.g(0, 0).value(), vv = geo.g(1, 1).value();
  EXPECT_NEAR(num / (uu * vv), 1.0 / (r * r), 1e-4);
  // mixed planes flat
  Vec w = {0, 0, 1, 0};
  EXPECT_NEAR(sectional(geo.pack, SymMatrix(geo.g.values()), u, w), 0.0, 1e-12);
}

TEST(Riemann, ConstantCurvatureModelConvention) {
  // g = e^{2r} sum dx_i^2 + dr^2 is hyperbolic with c = -1; the convention is
  // pinned so that R(e1, e2, e2, e1) = c for orthonormal e1, e2.
  std::vector<std::string> coords = {"x1", "x2", "x3", "r"};
  auto f = diag_field(coords, {"exp(2*r)", "exp(2*r)", "exp(2*r)", "1"});
  auto geo = build(f, {0.2, -0.1, 0.4, 0.3});
  const SymMatrix gv(geo.g.values());
  const double s = std::exp(-0.3);  // normalizes coordinate directions
  Vec e1 = {s, 0, 0, 0}, e2 = {0, s, 0, 0}, e4 = {0, 0, 0, 1};
  EXPECT_NEAR(geo.pack.contract(e1, e2, e2, e1), -1.0, 1e-10);
  EXPECT_NEAR(geo.pack.contract(e1, e4, e4, e1), -1.0, 1e-10);
  EXPECT_NEAR(sectional(geo.pack, gv, e1, e2), -1.0, 1e-10);
  EXPECT_NEAR(geo.pack.scalar2tau, -12.0, 1e-9);  // n(n-1)c
}

TEST(Riemann, WarpedExampleSectionalAgainstOracle) {
  std::vector<std::string> coords = {"x1", "x2", "x3", "x4", "x5", "x6"};
  auto f = diag_field(coords, {"x6^2", "x6^2", "x6^2", "x6^2", "x6^2", "1"});
  const Vec p = {0, 0, 0, 0, 0, 1.0};
  auto geo = build(f, p);
  const SymMatrix gv(geo.g.values());
  // plane (e1, e6): K = -f''/f = 0; plane (e1, e2): K = -(f'/f)^2 = -1
  Vec e1 = {1, 0, 0, 0, 0, 0}, e2 = {0, 1, 0, 0, 0, 0}, e6 = {0, 0, 0, 0, 0, 1};
  EXPECT_NEAR(sectional(geo.pack, gv, e1, e6), 0.0, 1e-12);
  EXPECT_NEAR(sectional(geo.pack, gv, e1, e2), -1.0, 1e-11);
  EXPECT_NEAR(fd_riemann_low(f, p, 0, 1, 1, 0), geo.pack.rlow(0, 1, 1, 0), 1e-4);
  EXPECT_NEAR(fd_riemann_low(f, p, 0, 5, 5, 0), geo.pack.rlow(0, 5, 5, 0), 1e-4);
}

TEST(Riemann, SymmetriesAndBianchi) {
  std::vector<std::string> coords = {"x1", "x2", "x3", "x6"};
  std::map<std::pair<int, int>, Expr> entries;
  entries.emplace(std::make_pair(0, 0), Expr::parse("1 + x2^2/3"));
  entries.emplace(std::make_pair(0, 2), Expr::parse("x1*x6/5"));
  entries.emplace(std::make_pair(1, 1), Expr::parse("exp(x6/2)"));
  entries.emplace(std::make_pair(2, 2), Expr::parse("2 + sin(x1)"));
  entries.emplace(std::make_pair(3, 3), Expr::parse("1 + x1^2/4"));
  MetricField f(coords, entries);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    Vec p = {uni(rng), uni(rng), uni(rng), uni(rng)};
    auto geo = build(f, p);
    EXPECT_LT(metric_compat_residual(geo.g, geo.gamma), 1e-12);
    EXPECT_LT(riemann_symmetry_residual(geo.pack), 1e-9);
    EXPECT_LT(bianchi_residual(geo.pack), 1e-9);
  }
}

TEST(Sectional, InvariantUnderPlaneBasisChange) {
  std::vector<std::string> coords = {"x1", "x2", "x3", "r"};
  auto f = diag_field(coords, {"exp(2*r)", "exp(2*r)", "exp(2*r)", "1"});
  auto geo = build(f, {0.1, 0.2, -0.1, 0.25});
  const SymMatrix gv(geo.g.values());
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(-1, 1);
  Vec u = {uni(rng), uni(rng), uni(rng), uni(rng)};
  Vec v = {uni(rng), uni(rng), uni(rng), uni(rng)};
  const double K = sectional(geo.pack, gv, u, v);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = uni(rng) + 1.5, b = uni(rng), c = uni(rng), d = uni(rng) + 1.5;
    Vec u2(4), v2(4);
    for (int i = 0; i < 4; ++i) {
      u2[static_cast<std::size_t>(i)] = a * u[static_cast<std::size_t>(i)] + b * v[static_cast<std::size_t>(i)];
      v2[static_cast<std::size_t>(i)] = c * u[static_cast<std::size_t>(i)] + d * v[static_cast<std::size_t>(i)];
    }
    EXPECT_NEAR(sectional(geo.pack, gv, u2, v2), K, 1e-9);
  }
}

TEST(Sectional, DegeneratePlaneRejected) {
  auto f = diag_field({"x", "y"}, {"1", "1"});
  auto geo = build(f, {0, 0});
  Vec u = {1, 1}, v = {2, 2};
  EXPECT_THROW(sectional(geo.pack, SymMatrix(geo.g.values()), u, v), std::domain_error);
}

TEST(Scalar, FrameIndependence) {
  // coordinate contraction vs an explicit g-orthonormal frame sum
  std::vector<std::string> coords = {"x1", "x2", "x6"};
  auto f = diag_field(coords, {"x6^2", "x6^2", "1"});
  const Vec p = {0.0, 0.0, 1.3};
  auto geo = build(f, p);
  std::vector<Vec> frame = {{1 / 1.3, 0, 0}, {0, 1 / 1.3, 0}, {0, 0, 1}};
  double sum = 0.0;
  for (const auto& a : frame)
    for (const auto& b : frame) sum += geo.pack.contract(a, b, b, a);
  EXPECT_NEAR(sum, geo.pack.scalar2tau, 1e-9);
}
