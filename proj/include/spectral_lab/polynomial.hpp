#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "spectral_lab/errors.hpp"

namespace spectral_lab {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Dense univariate polynomial, coefficients in ascending order of degree.
///
/// The coefficient vector is never empty; the zero polynomial is {0}. Trailing
/// coefficients that compare equal to zero are dropped on construction, so
/// degree() is exact for exact scalar types. Floating-point callers that want
/// a numerical degree use trimmed().
template <class T>
class Polynomial {
 public:
  using value_type = T;

  Polynomial() : c_{T(0)} {}
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { normalize(); }
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { normalize(); }

  static Polynomial constant(T value) { return Polynomial(std::vector<T>{value}); }

  static Polynomial from_roots(std::span<const T> roots) {
    std::vector<T> c{T(1)};
    c.reserve(roots.size() + 1);
    for (const T& r : roots) {
      c.push_back(T(0));
      for (std::size_t j = c.size() - 1; j > 0; --j) c[j] = c[j - 1] - r * c[j];
      c[0] = -r * c[0];
    }
    return Polynomial(std::move(c));
  }

  std::size_t degree() const { return c_.size() - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == T(0); }
  const T& leading() const { return c_.back(); }
  const T& operator[](std::size_t i) const { return c_[i]; }
  /// Coefficient of x^i, zero beyond the degree.
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
  const std::vector<T>& coeffs() const { return c_; }

  template <class U>
  auto operator()(const U& x) const {
    using R = std::common_type_t<T, U>;
    R acc = R(c_.back());
    for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + R(c_[i]);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() == 1) return Polynomial();
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<double>(i));
    return Polynomial(std::move(d));
  }

  Polynomial derivative(std::size_t order) const {
    Polynomial p = *this;
    for (std::size_t k = 0; k < order; ++k) p = p.derivative();
    return p;
  }

  /// x -> P(x + t), by repeated synthetic division. The leading coefficient is
  /// untouched, so monic inputs stay exactly monic.
  Polynomial taylor_shift(const T& t) const {
    std::vector<T> c = c_;
    const std::size_t n = c.size() - 1;
    if (t == T(0)) return *this;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = n - 1;; --j) {
        c[j] += t * c[j + 1];
        if (j == i) break;
      }
    return Polynomial(std::move(c));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    normalize();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    normalize();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    normalize();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Drops leading coefficients with |c| <= rel_tol * max|c| (numerical degree).
  Polynomial trimmed(double rel_tol) const {
    using std::abs;
    double norm = 0;
    for (const auto& v : c_) norm = std::max(norm, static_cast<double>(abs(v)));
    std::vector<T> c = c_;
    while (c.size() > 1 && static_cast<double>(abs(c.back())) <= rel_tol * norm) c.pop_back();
    return Polynomial(std::move(c));
  }

  double max_abs_coeff() const {
    using std::abs;
    double m = 0;
    for (const auto& v : c_) m = std::max(m, static_cast<double>(abs(v)));
    return m;
  }

 private:
  void normalize() {
    if (c_.empty()) c_.push_back(T(0));
    while (c_.size() > 1 && c_.back() == T(0)) c_.pop_back();
  }

  std::vector<T> c_;
};

/// Euclidean division a = q*b + r with deg r < deg b.
template <class T>
std::pair<Polynomial<T>, Polynomial<T>> divmod(const Polynomial<T>& a, const Polynomial<T>& b) {
  if (b.is_zero()) throw ArgumentError("polynomial division by zero");
  const std::size_t db = b.degree();
  if (a.degree() < db || a.is_zero()) return {Polynomial<T>(), a};
  std::vector<T> r = a.coeffs();
  std::vector<T> q(a.degree() - db + 1, T(0));
  const T lead = b.leading();
  for (std::size_t k = q.size(); k-- > 0;) {
    const T f = r[k + db] / lead;
    q[k] = f;
    for (std::size_t j = 0; j <= db; ++j) r[k + j] -= f * b[j];
    r[k + db] = T(0);
  }
  r.resize(std::max<std::size_t>(db, 1));
  return {Polynomial<T>(std::move(q)), Polynomial<T>(std::move(r))};
}

/// A polynomial whose leading coefficient is exactly one.
template <class T>
class Monic {
 public:
  /// Throws ArgumentError unless the last coefficient is exactly 1.
  explicit Monic(std::vector<T> coeffs) : p_(std::move(coeffs)) { check(); }
  explicit Monic(Polynomial<T> p) : p_(std::move(p)) { check(); }
  Monic(std::initializer_list<T> coeffs) : p_(std::vector<T>(coeffs)) { check(); }

  /// Constant polynomial 1 (degree 0).
  Monic() : p_(Polynomial<T>::constant(T(1))) {}

  /// Divides by the leading coefficient and pins it to exactly 1.
  static Monic normalized(const Polynomial<T>& p) {
    if (p.is_zero()) throw ArgumentError("cannot normalize the zero polynomial");
    const T lead = p.leading();
    std::vector<T> c = p.coeffs();
    for (auto& v : c) v /= lead;
    c.back() = T(1);
    return Monic(std::move(c));
  }

  static Monic from_roots(std::span<const T> roots) {
    return Monic(Polynomial<T>::from_roots(roots));
  }

  std::size_t degree() const { return p_.degree(); }
  const std::vector<T>& coeffs() const { return p_.coeffs(); }
  const T& operator[](std::size_t i) const { return p_[i]; }
  const Polynomial<T>& poly() const { return p_; }
  operator const Polynomial<T>&() const { return p_; }

  template <class U>
  auto operator()(const U& x) const {
    return p_(x);
  }

  Monic taylor_shift(const T& t) const { return Monic(p_.taylor_shift(t)); }

  friend bool operator==(const Monic& a, const Monic& b) { return a.p_ == b.p_; }

 private:
  void check() const {
    if (p_.leading() != T(1))
      throw ArgumentError("monic polynomial needs leading coefficient exactly 1");
  }

  Polynomial<T> p_;
};

using RealPoly = Polynomial<double>;
using MonicPoly = Monic<double>;
using ComplexPoly = Monic<std::complex<double>>;

inline RealPoly differentiate(const MonicPoly& p) {
  if (p.degree() == 0) throw DegreeError("derivative of a degree-0 polynomial");
  return p.poly().derivative();
}

template <class T>
Monic<T> taylor_shift(const Monic<T>& p, const T& t) {
  return p.taylor_shift(t);
}

/// Sum of the zeros, read off the subleading coefficient.
template <class T>
T zero_sum(const Monic<T>& p) {
  if (p.degree() == 0) throw DegreeError("zero sum of a degree-0 polynomial");
  return -p[p.degree() - 1];
}

inline ComplexPoly to_complex(const MonicPoly& p) {
  std::vector<std::complex<double>> c(p.coeffs().begin(), p.coeffs().end());
  return ComplexPoly(std::move(c));
}

inline Polynomial<std::complex<double>> to_complex(const RealPoly& p) {
  return Polynomial<std::complex<double>>(
      std::vector<std::complex<double>>(p.coeffs().begin(), p.coeffs().end()));
}

/// max_i |a_i - b_i| over the union of supports.
template <class T>
double coeff_distance(const Polynomial<T>& a, const Polynomial<T>& b) {
  using std::abs;
  double d = 0;
  const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, static_cast<double>(abs(a.coeff(i) - b.coeff(i))));
  return d;
}

}  // namespace spectral_lab
