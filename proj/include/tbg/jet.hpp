#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tbg {

/// Truncated Taylor expansion of a scalar quantity in `nvars` variables,
/// carried to `order` (0..3). Order-2 and order-3 blocks are stored in
/// fully symmetric packed form, so permuted index tuples address the same
/// slot. Arithmetic implements the exact Leibniz/chain rules through the
/// stored order.
class Jet {
 public:
  static constexpr int kMaxOrder = 3;

  Jet() = default;

  static Jet constant(double value, int nvars, int order) {
    Jet j(nvars, order);
    j.value_ = value;
    return j;
  }

  /// Coordinate seed: value with unit first derivative in slot `index`.
  static Jet variable(double value, int index, int nvars, int order) {
    Jet j(nvars, order);
    j.value_ = value;
    if (index < 0 || index >= nvars)
      throw std::invalid_argument("Jet::variable: index " + std::to_string(index) +
                                  " out of range for " + std::to_string(nvars) + " variables");
    if (order >= 1) j.d1_[static_cast<size_t>(index)] = 1.0;
    return j;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  double value() const { return value_; }
  double& value() { return value_; }

  double d1(int i) const { return d1_[static_cast<size_t>(check1(i))]; }
  double& d1(int i) { return d1_[static_cast<size_t>(check1(i))]; }
  double d2(int i, int j) const { return d2_[idx2(i, j)]; }
  double& d2(int i, int j) { return d2_[idx2(i, j)]; }
  double d3(int i, int j, int k) const { return d3_[idx3(i, j, k)]; }
  double& d3(int i, int j, int k) { return d3_[idx3(i, j, k)]; }

  /// Jet of the i-th first partial; one order lower than this jet.
  Jet derivative(int i) const {
    if (order_ < 1) throw std::logic_error("Jet::derivative: order-0 jet has no stored partials");
    Jet r(nvars_, order_ - 1);
    r.value_ = d1(i);
    if (order_ >= 2)
      for (int j = 0; j < nvars_; ++j) r.d1(j) = d2(i, j);
    if (order_ >= 3)
      for (int j = 0; j < nvars_; ++j)
        for (int k = j; k < nvars_; ++k) r.d2(j, k) = d3(i, j, k);
    return r;
  }

  Jet truncated(int order) const {
    if (order > order_) throw std::logic_error("Jet::truncated: cannot raise order");
    if (order == order_) return *this;
    Jet r(nvars_, order);
    r.value_ = value_;
    if (order >= 1) std::copy(d1_.begin(), d1_.end(), r.d1_.begin());
    if (order >= 2) std::copy(d2_.begin(), d2_.end(), r.d2_.begin());
    return r;
  }

  Jet& operator+=(const Jet& o) {
    match(o);
    value_ += o.value_;
    for (size_t i = 0; i < d1_.size(); ++i) d1_[i] += o.d1_[i];
    for (size_t i = 0; i < d2_.size(); ++i) d2_[i] += o.d2_[i];
    for (size_t i = 0; i < d3_.size(); ++i) d3_[i] += o.d3_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    match(o);
    value_ -= o.value_;
    for (size_t i = 0; i < d1_.size(); ++i) d1_[i] -= o.d1_[i];
    for (size_t i = 0; i < d2_.size(); ++i) d2_[i] -= o.d2_[i];
    for (size_t i = 0; i < d3_.size(); ++i) d3_[i] -= o.d3_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    value_ *= s;
    for (auto& d : d1_) d *= s;
    for (auto& d : d2_) d *= s;
    for (auto& d : d3_) d *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    value_ += s;
    return *this;
  }
  Jet& operator-=(double s) {
    value_ -= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r.value_ += s;
    return r;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

  Jet operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
  }

  // Full Leibniz product through the stored order.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.match(b);
    const int n = a.nvars_;
    Jet r(n, a.order_);
    r.value_ = a.value_ * b.value_;
    if (a.order_ >= 1)
      for (int i = 0; i < n; ++i) r.d1(i) = a.d1(i) * b.value_ + a.value_ * b.d1(i);
    if (a.order_ >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          r.d2(i, j) = a.d2(i, j) * b.value_ + a.d1(i) * b.d1(j) + a.d1(j) * b.d1(i) +
                       a.value_ * b.d2(i, j);
    if (a.order_ >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            r.d3(i, j, k) = a.d3(i, j, k) * b.value_ + a.d2(i, j) * b.d1(k) +
                            a.d2(i, k) * b.d1(j) + a.d2(j, k) * b.d1(i) +
                            a.d1(i) * b.d2(j, k) + a.d1(j) * b.d2(i, k) +
                            a.d1(k) * b.d2(i, j) + a.value_ * b.d3(i, j, k);
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  /// Composition with a univariate analytic function given its derivatives
  /// c0..c3 at this jet's value.
  friend Jet apply_smooth(const Jet& x, double c0, double c1, double c2, double c3) {
    const int n = x.nvars_;
    Jet r(n, x.order_);
    r.value_ = c0;
    if (x.order_ >= 1)
      for (int i = 0; i < n; ++i) r.d1(i) = c1 * x.d1(i);
    if (x.order_ >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r.d2(i, j) = c2 * x.d1(i) * x.d1(j) + c1 * x.d2(i, j);
    if (x.order_ >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            r.d3(i, j, k) = c3 * x.d1(i) * x.d1(j) * x.d1(k) +
                            c2 * (x.d2(i, j) * x.d1(k) + x.d2(i, k) * x.d1(j) +
                                  x.d2(j, k) * x.d1(i)) +
                            c1 * x.d3(i, j, k);
    return r;
  }

  friend Jet reciprocal(const Jet& x) {
    const double v = x.value_;
    if (v == 0.0) throw std::domain_error("jet arithmetic: division by value 0");
    const double iv = 1.0 / v;
    return apply_smooth(x, iv, -iv * iv, 2.0 * iv * iv * iv, -6.0 * iv * iv * iv * iv);
  }

  friend Jet sin(const Jet& x) {
    const double s = std::sin(x.value_), c = std::cos(x.value_);
    return apply_smooth(x, s, c, -s, -c);
  }
  friend Jet cos(const Jet& x) {
    const double s = std::sin(x.value_), c = std::cos(x.value_);
    return apply_smooth(x, c, -s, -c, s);
  }
  friend Jet tan(const Jet& x) {
    const double t = std::tan(x.value_);
    const double d1 = 1.0 + t * t;
    return apply_smooth(x, t, d1, 2.0 * t * d1, d1 * (2.0 + 6.0 * t * t));
  }
  friend Jet exp(const Jet& x) {
    const double e = std::exp(x.value_);
    return apply_smooth(x, e, e, e, e);
  }
  friend Jet log(const Jet& x) {
    const double v = x.value_;
    if (v <= 0.0)
      throw std::domain_error("jet arithmetic: log of non-positive value " + std::to_string(v));
    const double iv = 1.0 / v;
    return apply_smooth(x, std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
  }
  friend Jet sqrt(const Jet& x) {
    const double v = x.value_;
    if (v <= 0.0)
      throw std::domain_error("jet arithmetic: sqrt of non-positive value " + std::to_string(v));
    const double s = std::sqrt(v);
    return apply_smooth(x, s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
  }
  friend Jet sinh(const Jet& x) {
    const double s = std::sinh(x.value_), c = std::cosh(x.value_);
    return apply_smooth(x, s, c, s, c);
  }
  friend Jet cosh(const Jet& x) {
    const double s = std::sinh(x.value_), c = std::cosh(x.value_);
    return apply_smooth(x, c, s, c, s);
  }

  friend Jet pow(const Jet& x, int e) {
    if (e < 0) return reciprocal(pow(x, -e));
    Jet r = Jet::constant(1.0, x.nvars_, x.order_);
    Jet base = x;
    for (int k = e; k > 0; k >>= 1) {
      if (k & 1) r *= base;
      if (k > 1) base *= base;
    }
    return r;
  }

 private:
  Jet(int nvars, int order)
      : nvars_(nvars),
        order_(order),
        d1_(order >= 1 ? static_cast<size_t>(nvars) : 0, 0.0),
        d2_(order >= 2 ? static_cast<size_t>(nvars * (nvars + 1) / 2) : 0, 0.0),
        d3_(order >= 3 ? static_cast<size_t>(nvars * (nvars + 1) * (nvars + 2) / 6) : 0, 0.0) {
    if (order < 0 || order > kMaxOrder)
      throw std::invalid_argument("Jet: order " + std::to_string(order) + " outside 0..3");
    if (nvars < 0) throw std::invalid_argument("Jet: negative variable count");
  }

  int check1(int i) const {
    if (order_ < 1 || i < 0 || i >= nvars_)
      throw std::logic_error("Jet: first-order slot (" + std::to_string(i) + ") unavailable");
    return i;
  }

  size_t idx2(int i, int j) const {
    if (order_ < 2 || i < 0 || j < 0 || i >= nvars_ || j >= nvars_)
      throw std::logic_error("Jet: second-order slot unavailable");
    if (i > j) std::swap(i, j);
    return static_cast<size_t>(i * nvars_ - i * (i - 1) / 2 + (j - i));
  }

  size_t idx3(int i, int j, int k) const {
    if (order_ < 3 || i < 0 || j < 0 || k < 0 || i >= nvars_ || j >= nvars_ || k >= nvars_)
      throw std::logic_error("Jet: third-order slot unavailable");
    int a = i, b = j, c = k;
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    size_t base = 0;
    for (int p = 0; p < a; ++p) {
      const int q = nvars_ - p;
      base += static_cast<size_t>(q * (q + 1) / 2);
    }
    const int nn = nvars_ - a;
    const int jj = b - a, kk = c - a;
    return base + static_cast<size_t>(jj * nn - jj * (jj - 1) / 2 + (kk - jj));
  }

  void match(const Jet& o) const {
    if (nvars_ != o.nvars_ || order_ != o.order_)
      throw std::invalid_argument("jet arithmetic: shape mismatch (" + std::to_string(nvars_) +
                                  " vars order " + std::to_string(order_) + " vs " +
                                  std::to_string(o.nvars_) + " vars order " +
                                  std::to_string(o.order_) + ")");
  }

  int nvars_ = 0;
  int order_ = 0;
  double value_ = 0.0;
  std::vector<double> d1_, d2_, d3_;
};

/// Coordinate seeds for all variables of a point, ready for an evaluator.
inline std::vector<Jet> seed_point(std::span<const double> point, int order) {
  std::vector<Jet> seeds;
  seeds.reserve(point.size());
  const int n = static_cast<int>(point.size());
  for (int i = 0; i < n; ++i) seeds.push_back(Jet::variable(point[i], i, n, order));
  return seeds;
}

/// Taylor composition: expansion of outer written in k intermediate
/// variables, chained with k inner expansions over a common variable set.
inline Jet compose(const Jet& outer, std::span<const Jet> inner) {
  const int k = outer.nvars();
  if (static_cast<int>(inner.size()) != k)
    throw std::invalid_argument("compose: outer expects " + std::to_string(k) +
                                " inner jets, got " + std::to_string(inner.size()));
  if (k == 0) throw std::invalid_argument("compose: outer jet has no variables");
  const int n = inner[0].nvars();
  int order = std::min(outer.order(), inner[0].order());
  for (const Jet& f : inner) {
    if (f.nvars() != n) throw std::invalid_argument("compose: inner jets disagree on variables");
    order = std::min(order, f.order());
  }

  Jet r = Jet::constant(outer.value(), n, order);
  if (order >= 1)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int a = 0; a < k; ++a) s += outer.d1(a) * inner[a].d1(i);
      r.d1(i) = s;
    }
  if (order >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) s += outer.d2(a, b) * inner[a].d1(i) * inner[b].d1(j);
          s += outer.d1(a) * inner[a].d2(i, j);
        }
        r.d2(i, j) = s;
      }
  if (order >= 3)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int l = j; l < n; ++l) {
          double s = 0.0;
          for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
              for (int c = 0; c < k; ++c)
                s += outer.d3(a, b, c) * inner[a].d1(i) * inner[b].d1(j) * inner[c].d1(l);
              s += outer.d2(a, b) * (inner[a].d2(i, j) * inner[b].d1(l) +
                                     inner[a].d2(i, l) * inner[b].d1(j) +
                                     inner[a].d2(j, l) * inner[b].d1(i));
            }
            s += outer.d1(a) * inner[a].d3(i, j, l);
          }
          r.d3(i, j, l) = s;
        }
  return r;
}

}  // namespace tbg
