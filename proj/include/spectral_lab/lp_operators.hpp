#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_lab/errors.hpp"
#include "spectral_lab/majorization.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"

namespace spectral_lab {

/// phi(D) = e^{-a^2 D^2 + b D} prod_k (1 - alpha_k D) e^{alpha_k D}, stored as
/// finite data. Only a is stored for the Gaussian, so its sign is fixed.
struct LPOperator {
  double gaussian_a = 0;
  double shift_b = 0;
  std::vector<double> factors;

  static LPOperator identity() { return {}; }
  static LPOperator gaussian(double a) { return {a, 0, {}}; }
  static LPOperator shift(double b) { return {0, b, {}}; }
  static LPOperator factor(double alpha) { return {0, 0, {alpha}}; }

  bool is_identity() const {
    return gaussian_a == 0 && shift_b == 0 &&
           std::all_of(factors.begin(), factors.end(), [](double a) { return a == 0; });
  }

  /// Grammar: semicolon-separated key=value with keys a, b, alphas; alphas is
  /// a comma-separated list (possibly empty). Missing keys default to zero.
  static LPOperator parse(std::string_view s) {
    LPOperator t;
    auto number = [](std::string_view v) {
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      double x = 0;
      const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
      if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
        throw ArgumentError("bad number in operator string: '" + std::string(v) + "'");
      return x;
    };
    while (!s.empty()) {
      const auto semi = s.find(';');
      std::string_view item = s.substr(0, semi);
      s = semi == std::string_view::npos ? std::string_view{} : s.substr(semi + 1);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ArgumentError("operator item without '=': " + std::string(item));
      std::string_view key = item.substr(0, eq), val = item.substr(eq + 1);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      if (key == "a") {
        t.gaussian_a = number(val);
      } else if (key == "b") {
        t.shift_b = number(val);
      } else if (key == "alphas") {
        t.factors.clear();
        while (!val.empty()) {
          const auto comma = val.find(',');
          const std::string_view tok = val.substr(0, comma);
          if (tok.find_first_not_of(' ') != std::string_view::npos) t.factors.push_back(number(tok));
          val = comma == std::string_view::npos ? std::string_view{} : val.substr(comma + 1);
        }
      } else {
        throw ArgumentError("unknown operator key: " + std::string(key));
      }
    }
    return t;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "a=" << gaussian_a << ";b=" << shift_b << ";alphas=";
    for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "," : "") << factors[i];
    return os.str();
  }
};

/// Product in the monoid: Gaussians add in a^2, shifts add, factor lists concatenate.
inline LPOperator compose(const LPOperator& s, const LPOperator& t) {
  LPOperator r;
  r.gaussian_a = std::hypot(s.gaussian_a, t.gaussian_a);
  r.shift_b = s.shift_b + t.shift_b;
  r.factors = s.factors;
  r.factors.insert(r.factors.end(), t.factors.begin(), t.factors.end());
  return r;
}

inline bool is_in_A_prime(const LPOperator& t) { return t.shift_b == 0; }

namespace detail {

/// e^{-a^2 D^2} P as the finite sum over m of (-a^2)^m D^{2m} P / m!.
template <class T>
Polynomial<T> apply_gaussian(const Polynomial<T>& p, double a) {
  if (a == 0) return p;
  Polynomial<T> acc = p, d = p;
  double w = 1;
  for (std::size_t m = 1; 2 * m <= p.degree(); ++m) {
    d = d.derivative(2);
    w *= -a * a / static_cast<double>(m);
    acc += d * T(w);
  }
  return acc;
}

/// (1 - alpha D) e^{alpha D} P = S - alpha S' with S = P(x + alpha).
template <class T>
Polynomial<T> apply_factor(const Polynomial<T>& p, double alpha) {
  if (alpha == 0) return p;
  const Polynomial<T> s = p.taylor_shift(T(alpha));
  return s - s.derivative() * T(alpha);
}

}  // namespace detail

/// T(P). Each block keeps the leading coefficient exactly 1 and the degree.
template <class T>
Monic<T> apply(const LPOperator& op, const Monic<T>& p) {
  Polynomial<T> r = detail::apply_gaussian(p.poly(), op.gaussian_a);
  for (double alpha : op.factors) r = detail::apply_factor(r, alpha);
  if (op.shift_b != 0) r = r.taylor_shift(T(op.shift_b));
  return Monic<T>(std::move(r));
}

/// Spectral comparison of P with T(P). Elements of A' never lift P above T(P).
inline MajorizationVerdict verify_orbit(const HyperbolicPoly& p, const LPOperator& t, double tol = 1e-9,
                                        const RootOptions& opt = {}) {
  if (!is_in_A_prime(t)) throw ArgumentError("verify_orbit needs an operator with b = 0");
  const HyperbolicPoly tp = require_hyperbolic(apply(t, p.poly()), opt);
  return spectral_compare(p, tp, tol);
}

struct GeometryReport {
  double min_drop = 0;     // min Z(P) - min Z(T(P))
  double max_rise = 0;     // max Z(T(P)) - max Z(P)
  double span_growth = 0;  // span(T(P)) - span(P)
  std::size_t schur_violations = 0;
  std::size_t probes = 0;
  std::string worst_probe;  // description of the probe with the largest violation
};

/// Extremal zeros, span and sum-of-convex probes of P versus T(P).
inline GeometryReport geometry_checks(const HyperbolicPoly& p, const LPOperator& t, std::size_t family_size = 32,
                                      std::uint64_t seed = 0, double tol = 1e-9, const RootOptions& opt = {}) {
  const HyperbolicPoly tp = require_hyperbolic(apply(t, p.poly()), opt);
  GeometryReport g;
  g.min_drop = p.roots().min() - tp.roots().min();
  g.max_rise = tp.roots().max() - p.roots().max();
  g.span_growth = span(tp) - span(p);
  const auto x = PointSet::from_reals(p.roots().values());
  const auto y = PointSet::from_reals(tp.roots().values());
  const auto fam = convex_family(1, family_size, seed);
  double worst = 0;
  for (const auto& f : fam) {
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += f(x.point(i)), sy += f(y.point(i));
    ++g.probes;
    const double excess = sx - sy;
    if (excess > tol * (1 + std::abs(sx) + std::abs(sy))) {
      ++g.schur_violations;
      if (excess > worst) worst = excess, g.worst_probe = f.describe();
    }
  }
  return g;
}

/// T1 T2 P == T2 T1 P coefficient-wise within tol * max(1, |c|).
template <class T>
bool commutativity_check(const LPOperator& t1, const LPOperator& t2, const Monic<T>& p, double tol = 1e-10) {
  const auto a = apply(t1, apply(t2, p));
  const auto b = apply(t2, apply(t1, p));
  using std::abs;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    const double scale = std::max({1.0, static_cast<double>(abs(a[i])), static_cast<double>(abs(b[i]))});
    if (static_cast<double>(abs(a[i] - b[i])) > tol * scale) return false;
  }
  return true;
}

/// Coefficient distance between e^{-a^2 D^2} P and the 2m-factor product with
/// parameters +a/sqrt(m) and -a/sqrt(m).
inline double gaussian_as_limit_check(double a, std::size_t m, const MonicPoly& p) {
  if (m == 0) throw ArgumentError("gaussian_as_limit_check needs m >= 1");
  const double mu = a / std::sqrt(static_cast<double>(m));
  LPOperator prod;
  prod.factors.reserve(2 * m);
  for (std::size_t k = 0; k < m; ++k) prod.factors.push_back(mu), prod.factors.push_back(-mu);
  return coeff_distance(apply(prod, p).poly(), apply(LPOperator::gaussian(a), p).poly());
}

struct SensitivityCheck {
  double lhs = 0;  // (zeta_i - x_j)^2 d zeta_i / d x_j
  double rhs = 0;  // lambda^2 d zeta_i / d lambda
  double relative_error = 0;
};

/// Both sides of the zero-sensitivity identity for P - lambda P', where
/// zeta_i(lambda; x) is the i-th zero and x the zeros of P, by central finite
/// differences of the root tracker.
inline SensitivityCheck root_sensitivity(std::span<const double> x, double lambda, std::size_t i, std::size_t j,
                                         double h = 1e-6, const RootOptions& opt = {}) {
  if (i >= x.size() || j >= x.size()) throw ArgumentError("root index out of range");
  auto zeta = [&](std::span<const double> xs, double lam) {
    const MonicPoly p = from_roots(std::vector<double>(xs.begin(), xs.end())).poly();
    const RealPoly r = p.poly() - p.poly().derivative() * lam;
    return require_hyperbolic(MonicPoly(r), opt, lam).roots()[i];
  };
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  const double hx = h * (1 + std::abs(x[j]));
  xp[j] += hx, xm[j] -= hx;
  const double dzdx = (zeta(xp, lambda) - zeta(xm, lambda)) / (2 * hx);
  const double hl = h * (1 + std::abs(lambda));
  const double dzdl = (zeta(x, lambda + hl) - zeta(x, lambda - hl)) / (2 * hl);
  const double z = zeta(x, lambda);
  SensitivityCheck c;
  c.lhs = (z - x[j]) * (z - x[j]) * dzdx;
  c.rhs = lambda * lambda * dzdl;
  c.relative_error = std::abs(c.lhs - c.rhs) / std::max(std::abs(c.rhs), 1e-300);
  return c;
}

}  // namespace spectral_lab
