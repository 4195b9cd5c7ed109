#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "casorati/linalg.hpp"

namespace casorati::numkit {

/// Constrained extremum problem for the quadratic form
///   f(t) = lambda1 * sum_{i<n} t_i^2 + lambda2 * t_n^2 - 2 sum_{i<j} t_i t_j
/// on the hyperplane t_1 + ... + t_n = k.  The closed-form branch requires
/// lambda2 = (n-1)/(lambda1 - n + 2) with lambda1 > n - 2.
struct QuadraticExtremumProblem {
  int n;
  double lambda1;
  double lambda2;
  double k;

  double eval(const Vec& t) const {
    double sq = 0.0, cross = 0.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ti = t[static_cast<std::size_t>(i)];
      sq += (i == n - 1 ? lambda2 : lambda1) * ti * ti;
      cross += ti * sum;
      sum += ti;
    }
    return sq - 2.0 * cross;
  }

  bool closed_form_valid(double rel_tol = 1e-12) const {
    if (n < 3 || lambda1 <= n - 2 || lambda2 <= 0) return false;
    const double expected = (n - 1) / (lambda1 - n + 2);
    return std::abs(lambda2 - expected) <= rel_tol * std::max(1.0, std::abs(expected));
  }
};

struct TripathiResult {
  Vec argmin;
  double min_value;
  bool used_closed_form;
};

/// Minimize the Tripathi quadratic form on its hyperplane.  The closed form
/// gives t_1 = ... = t_{n-1} = k/(lambda1+1), t_n = k(lambda1-n+2)/(lambda1+1)
/// with minimum value 0.  If the lambda constraint fails, the KKT system of
/// the equality-constrained problem is solved numerically instead and the
/// result is flagged.
inline TripathiResult tripathi_minimum(const QuadraticExtremumProblem& p) {
  const int n = p.n;
  if (n < 2) throw std::invalid_argument("tripathi_minimum: n >= 2 required");
  if (p.closed_form_valid()) {
    Vec t(static_cast<std::size_t>(n), p.k / (p.lambda1 + 1.0));
    t[static_cast<std::size_t>(n - 1)] = p.k * (p.lambda1 - n + 2.0) / (p.lambda1 + 1.0);
    return {t, p.eval(t), true};
  }
  // KKT system: [H 1; 1^T 0] [t; mu] = [0; k], H = Hessian/2 of f.
  Mat kkt(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) kkt(i, j) = (i == j) ? (i == n - 1 ? p.lambda2 : p.lambda1) : -1.0;
    kkt(i, n) = 1.0;
    kkt(n, i) = 1.0;
  }
  Vec rhs(static_cast<std::size_t>(n + 1), 0.0);
  rhs[static_cast<std::size_t>(n)] = p.k;
  const Vec sol = matvec(inverse(kkt), rhs);
  Vec t(sol.begin(), sol.begin() + n);
  return {t, p.eval(t), false};
}

enum class ExtremizeMode { Min, Max };

struct SphereObjective {
  // value at w
  std::function<double(const Vec&)> value;
  // value at w, also writing the Euclidean gradient
  std::function<double(const Vec&, Vec&)> value_grad;
};

struct SphereExtremum {
  Vec w;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  int dense_samples = 0;
};

namespace detail {

inline void normalize(Vec& w) {
  double n2 = 0.0;
  for (double x : w) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : w) x *= inv;
}

inline double tangent_grad_norm(const Vec& w, const Vec& g, Vec& tg) {
  double wg = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) wg += w[i] * g[i];
  double n2 = 0.0;
  tg.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    tg[i] = g[i] - wg * w[i];
    n2 += tg[i] * tg[i];
  }
  return std::sqrt(n2);
}

}  // namespace detail

/// Extremize a smooth objective over the unit sphere S^{d-1}: seeded dense
/// sampling (normalized Gaussians), then projected-gradient refinement with
/// Armijo backtracking from the best few samples.
inline SphereExtremum sphere_extremize(int dim, const SphereObjective& objective,
                                       ExtremizeMode mode,
                                       std::uint64_t seed = 0x5EED,
                                       int dense_samples = 2000,
                                       int refine_starts = 5,
                                       int max_iterations = 200,
                                       double grad_tol = 1e-10) {
  if (dim < 1) throw std::invalid_argument("sphere_extremize: dim >= 1 required");
  const double sign = (mode == ExtremizeMode::Min) ? 1.0 : -1.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::pair<double, Vec>> best;
  for (int i = 0; i < dense_samples; ++i) {
    Vec w(static_cast<std::size_t>(dim));
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& x : w) {
        x = gauss(rng);
        n2 += x * x;
      }
    } while (n2 < 1e-12);
    detail::normalize(w);
    const double v = sign * objective.value(w);
    best.emplace_back(v, w);
  }
  std::partial_sort(best.begin(),
                    best.begin() + std::min<std::size_t>(best.size(), static_cast<std::size_t>(refine_starts)),
                    best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  best.resize(std::min<std::size_t>(best.size(), static_cast<std::size_t>(refine_starts)));

  SphereExtremum result;
  result.dense_samples = dense_samples;
  double best_val = best.empty() ? sign * objective.value(Vec(static_cast<std::size_t>(dim), 0.0)) : best[0].first;
  Vec best_w = best.empty() ? Vec(static_cast<std::size_t>(dim), 0.0) : best[0].second;

  for (auto& [v0, w0] : best) {
    Vec w = w0;
    Vec g, tg;
    double f = v0;
    int it = 0;
    bool conv = false;
    for (; it < max_iterations; ++it) {
      Vec raw_g;
      const double fv = sign * objective.value_grad(w, raw_g);
      g.resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) g[i] = sign * raw_g[i];
      f = fv;
      const double gn = detail::tangent_grad_norm(w, g, tg);
      if (gn < grad_tol) {
        conv = true;
        break;
      }
      // line search along the projected path: dyadic step ladder, keep the
      // best candidate (plain first-accept backtracking can cycle on sign
      // flips of symmetric objectives)
      double best_step_f = f;
      Vec best_step_w = w;
      double step = 4.0 / std::max(gn, 1e-8);
      for (int bt = 0; bt < 48; ++bt, step *= 0.5) {
        Vec cand(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) cand[i] = w[i] - step * tg[i];
        detail::normalize(cand);
        const double fc = sign * objective.value(cand);
        if (fc < best_step_f) {
          best_step_f = fc;
          best_step_w = cand;
        }
      }
      if (best_step_f >= f - 1e-15 * std::max(1.0, std::abs(f))) {
        conv = true;  // no descent at line-search resolution
        break;
      }
      w = best_step_w;
      f = best_step_f;
    }
    if (f < best_val) {
      best_val = f;
      best_w = w;
      result.iterations = it;
      result.converged = conv;
    } else if (result.iterations == 0) {
      result.iterations = it;
      result.converged = result.converged || conv;
    }
  }

  result.w = best_w;
  result.value = sign * best_val;
  return result;
}

}  // namespace casorati::numkit
