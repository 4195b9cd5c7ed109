#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace casorati::numkit {

/// Truncated multivariate Taylor scalar: value, gradient, Hessian and
/// optionally third-order coefficients in `nvars` variables.  `order`
/// selects how many derivative levels are carried (0..3); all arithmetic
/// truncates consistently at that level.  Higher-order coefficient blocks
/// are kept fully symmetric by construction.
class Jet {
public:
  Jet() = default;

  static Jet constant(double v, int nvars, int order) {
    Jet j;
    j.init(nvars, order);
    j.val_ = v;
    return j;
  }

  static Jet variable(double v, int nvars, int index, int order) {
    Jet j = constant(v, nvars, order);
    if (order >= 1) j.grad_[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  int vars() const { return n_; }
  int order() const { return order_; }
  double value() const { return val_; }

  double d(int i) const { return order_ >= 1 ? grad_[idx1(i)] : 0.0; }
  double d2(int i, int j) const { return order_ >= 2 ? hess_[idx2(i, j)] : 0.0; }
  double d3(int i, int j, int k) const {
    return order_ >= 3 ? third_[idx3(i, j, k)] : 0.0;
  }

  bool is_constant(double tol = 0.0) const {
    for (double g : grad_)
      if (std::abs(g) > tol) return false;
    for (double h : hess_)
      if (std::abs(h) > tol) return false;
    for (double t : third_)
      if (std::abs(t) > tol) return false;
    return true;
  }

  /// Copy with derivative levels above `order` dropped.
  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r;
    r.init(n_, order);
    r.val_ = val_;
    if (order >= 1) r.grad_ = grad_;
    if (order >= 2) r.hess_ = hess_;
    return r;
  }

  /// Partial derivative as a jet one order lower: value = d(i),
  /// grad = row i of the Hessian, hess = slice i of the third block.
  Jet derive(int i) const {
    if (order_ < 1)
      throw std::logic_error("Jet::derive: order-0 jet has no derivatives");
    Jet r;
    r.init(n_, order_ - 1);
    r.val_ = grad_[idx1(i)];
    if (r.order_ >= 1)
      for (int j = 0; j < n_; ++j) r.grad_[r.idx1(j)] = hess_[idx2(i, j)];
    if (r.order_ >= 2)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) r.hess_[r.idx2(j, k)] = third_[idx3(i, j, k)];
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    r.val_ = -r.val_;
    for (double& x : r.grad_) x = -x;
    for (double& x : r.hess_) x = -x;
    for (double& x : r.third_) x = -x;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_) {
      const int o = a.order_ < b.order_ ? a.order_ : b.order_;
      return a.truncated(o) + b.truncated(o);
    }
    Jet r = a;
    r.check_compatible(b);
    r.val_ += b.val_;
    for (std::size_t i = 0; i < r.grad_.size(); ++i) r.grad_[i] += b.grad_[i];
    for (std::size_t i = 0; i < r.hess_.size(); ++i) r.hess_[i] += b.hess_[i];
    for (std::size_t i = 0; i < r.third_.size(); ++i) r.third_[i] += b.third_[i];
    return r;
  }

  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_) {
      const int o = a.order_ < b.order_ ? a.order_ : b.order_;
      return a.truncated(o) * b.truncated(o);
    }
    a.check_compatible(b);
    Jet r;
    r.init(a.n_, a.order_);
    const int n = a.n_;
    r.val_ = a.val_ * b.val_;
    if (r.order_ >= 1)
      for (int i = 0; i < n; ++i)
        r.grad_[r.idx1(i)] = a.d(i) * b.val_ + a.val_ * b.d(i);
    if (r.order_ >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          r.hess_[r.idx2(i, j)] = a.d2(i, j) * b.val_ + a.val_ * b.d2(i, j) +
                                  a.d(i) * b.d(j) + a.d(j) * b.d(i);
    if (r.order_ >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            r.third_[r.idx3(i, j, k)] =
                a.d3(i, j, k) * b.val_ + a.val_ * b.d3(i, j, k) +
                a.d2(i, j) * b.d(k) + a.d2(i, k) * b.d(j) + a.d2(j, k) * b.d(i) +
                a.d(i) * b.d2(j, k) + a.d(j) * b.d2(i, k) + a.d(k) * b.d2(i, j);
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b);

  friend Jet operator+(const Jet& a, double c) {
    Jet r = a;
    r.val_ += c;
    return r;
  }
  friend Jet operator+(double c, const Jet& a) { return a + c; }
  friend Jet operator-(const Jet& a, double c) { return a + (-c); }
  friend Jet operator-(double c, const Jet& a) { return (-a) + c; }
  friend Jet operator*(const Jet& a, double c) {
    Jet r = a;
    r.val_ *= c;
    for (double& x : r.grad_) x *= c;
    for (double& x : r.hess_) x *= c;
    for (double& x : r.third_) x *= c;
    return r;
  }
  friend Jet operator*(double c, const Jet& a) { return a * c; }
  friend Jet operator/(const Jet& a, double c) { return a * (1.0 / c); }

  /// f(u) from the univariate Taylor coefficients f(u0), f'(u0), f''(u0),
  /// f'''(u0) via truncated composition with the nilpotent part of u.
  Jet compose(double f0, double f1, double f2, double f3) const {
    Jet w = *this;
    w.val_ = 0.0;
    Jet r = Jet::constant(f0, n_, order_) + w * f1;
    if (order_ >= 2) {
      Jet w2 = w * w;
      r = r + w2 * (f2 / 2.0);
      if (order_ >= 3) r = r + w2 * w * (f3 / 6.0);
    }
    return r;
  }

private:
  void init(int nvars, int order) {
    n_ = nvars;
    order_ = order;
    const std::size_t n = static_cast<std::size_t>(nvars);
    grad_.assign(order >= 1 ? n : 0, 0.0);
    hess_.assign(order >= 2 ? n * n : 0, 0.0);
    third_.assign(order >= 3 ? n * n * n : 0, 0.0);
  }

  void check_compatible(const Jet& o) const {
    if (n_ != o.n_ || order_ != o.order_)
      throw std::logic_error("Jet: mixed variable counts or orders");
  }

  std::size_t idx1(int i) const { return static_cast<std::size_t>(i); }
  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  std::size_t idx3(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }

  int n_ = 0;
  int order_ = 0;
  double val_ = 0.0;
  std::vector<double> grad_, hess_, third_;
};

inline Jet reciprocal(const Jet& a) {
  const double u = a.value();
  if (u == 0.0) throw std::domain_error("division by zero value");
  const double iu = 1.0 / u;
  return a.compose(iu, -iu * iu, 2.0 * iu * iu * iu, -6.0 * iu * iu * iu * iu);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(double c, const Jet& b) { return reciprocal(b) * c; }

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s, -c);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c, s);
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e, e);
}

inline Jet log(const Jet& a) {
  const double u = a.value();
  if (u <= 0.0) throw std::domain_error("ln of non-positive value");
  const double iu = 1.0 / u;
  return a.compose(std::log(u), iu, -iu * iu, 2.0 * iu * iu * iu);
}

inline Jet sqrt(const Jet& a) {
  const double u = a.value();
  if (u <= 0.0) throw std::domain_error("sqrt of non-positive value");
  const double r = std::sqrt(u);
  return a.compose(r, 0.5 / r, -0.25 / (r * u), 0.375 / (r * u * u));
}

inline Jet pow_int(const Jet& a, long k) {
  if (k < 0) {
    if (a.value() == 0.0) throw std::domain_error("0 raised to negative power");
    return pow_int(reciprocal(a), -k);
  }
  Jet r = Jet::constant(1.0, a.vars(), a.order());
  Jet base = a;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

/// General power.  Constant integral exponents use repeated multiplication
/// (valid for any base); everything else is exp(p*ln b), base > 0 only.
inline Jet pow(const Jet& base, const Jet& expo) {
  const double p = expo.value();
  if (expo.is_constant() && std::abs(p - std::nearbyint(p)) < 1e-12 &&
      std::abs(p) < 1e9)
    return pow_int(base, static_cast<long>(std::nearbyint(p)));
  if (base.value() <= 0.0)
    throw std::domain_error("non-integer power of non-positive base");
  return exp(expo * log(base));
}

}  // namespace casorati::numkit
