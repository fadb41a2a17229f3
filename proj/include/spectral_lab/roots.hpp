#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectral_lab/errors.hpp"
#include "spectral_lab/polynomial.hpp"

namespace spectral_lab {

struct RootOptions {
  /// Max-norm reconstruction error allowed, relative to max(1, max|coeff|).
  double recon_tol = 1e-8;
  /// Root bisection stops once the bracket is below this (relative).
  double polish_tol = 1e-15;
  /// Remainders below this (relative) count as zero when splitting off gcd(P, P').
  double gcd_tol = 1e-9;
  /// Sturm leading coefficients below this (relative) make the float count ambiguous.
  double sturm_tol = 1e-11;
  /// Recount in exact rational arithmetic when the float Sturm count is ambiguous.
  bool exact_fallback = true;
};

/// Sorted multiset of reals.
class RootTuple {
 public:
  RootTuple() = default;
  explicit RootTuple(std::vector<double> v) : v_(std::move(v)) { std::sort(v_.begin(), v_.end()); }

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double min() const { return v_.front(); }
  double max() const { return v_.back(); }
  const std::vector<double>& values() const { return v_; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

 private:
  std::vector<double> v_;
};

/// Multiset of complex numbers in lexicographic (re, im) order.
class ComplexRootTuple {
 public:
  ComplexRootTuple() = default;
  explicit ComplexRootTuple(std::vector<std::complex<double>> v) : v_(std::move(v)) {
    std::sort(v_.begin(), v_.end(), [](auto a, auto b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
  }

  std::size_t size() const { return v_.size(); }
  std::complex<double> operator[](std::size_t i) const { return v_[i]; }
  const std::vector<std::complex<double>>& values() const { return v_; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  std::vector<double> real_parts() const {
    std::vector<double> r;
    for (auto z : v_) r.push_back(z.real());
    return r;
  }
  std::vector<double> imag_parts() const {
    std::vector<double> r;
    for (auto z : v_) r.push_back(z.imag());
    return r;
  }

 private:
  std::vector<std::complex<double>> v_;
};

/// Sorted componentwise comparison: |x_i - y_i| <= tol * (1 + max(|x_i|, |y_i|)).
inline bool multiset_equal(std::span<const double> a, std::span<const double> b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol * (1 + std::max(std::abs(x[i]), std::abs(y[i])))) return false;
  return true;
}

inline bool multiset_equal(const RootTuple& a, const RootTuple& b, double tol = 1e-9) {
  return multiset_equal(std::span<const double>(a.values()), std::span<const double>(b.values()), tol);
}

/// Greedy nearest matching; the tuples are equal when every point finds a
/// partner within tol * (1 + |z|).
inline bool multiset_equal(const ComplexRootTuple& a, const ComplexRootTuple& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (auto z : a) {
    std::size_t best = b.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - b[j]);
      if (d < bd) bd = d, best = j;
    }
    if (best == b.size() || bd > tol * (1 + std::abs(z))) return false;
    used[best] = true;
  }
  return true;
}

enum class Certificate {
  /// Sturm count of a numerically square-free polynomial, or built from roots.
  SturmExact,
  /// Multiple roots were recovered from a numerical gcd; the certificate is the
  /// Sturm count of the square-free part plus the reconstruction check.
  Reconstructed,
};

inline const char* to_string(Certificate c) {
  return c == Certificate::SturmExact ? "SturmExact" : "Reconstructed";
}

/// Monic polynomial together with its (certified) real root multiset.
class HyperbolicPoly {
 public:
  /// Validates that expanding the roots reproduces the coefficients.
  HyperbolicPoly(MonicPoly poly, RootTuple roots, Certificate cert, double recon_tol = 1e-8)
      : poly_(std::move(poly)), roots_(std::move(roots)), cert_(cert) {
    if (roots_.size() != poly_.degree()) throw ShapeError("root count does not match degree");
    const auto rebuilt = RealPoly::from_roots(roots_.values());
    const double err = coeff_distance(rebuilt, poly_.poly());
    if (err > recon_tol * std::max(1.0, poly_.poly().max_abs_coeff()))
      throw CertificationAmbiguous("roots do not reconstruct the polynomial (error " +
                                   std::to_string(err) + ")");
  }

  const MonicPoly& poly() const { return poly_; }
  const RootTuple& roots() const { return roots_; }
  Certificate certificate() const { return cert_; }
  std::size_t degree() const { return poly_.degree(); }

 private:
  MonicPoly poly_;
  RootTuple roots_;
  Certificate cert_;
};

inline HyperbolicPoly from_roots(std::vector<double> roots) {
  for (double r : roots)
    if (!std::isfinite(r)) throw ArgumentError("roots must be finite");
  RootTuple t(std::move(roots));
  auto p = MonicPoly::from_roots(t.values());
  return HyperbolicPoly(std::move(p), std::move(t), Certificate::SturmExact);
}

/// Largest minus smallest root.
inline double span(const HyperbolicPoly& p) {
  if (p.degree() == 0) throw DegreeError("span of a degree-0 polynomial");
  return p.roots().max() - p.roots().min();
}

inline double span(const RootTuple& r) { return r.empty() ? 0.0 : r.max() - r.min(); }

struct NotHyperbolic {
  /// Number of real roots counted with multiplicity.
  std::size_t real_root_count = 0;
};

using RealRootsResult = std::variant<HyperbolicPoly, NotHyperbolic>;

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

inline double eps() { return std::numeric_limits<double>::epsilon(); }

inline RealPoly unit_scaled(const RealPoly& p) {
  const double m = p.max_abs_coeff();
  return m == 0 ? p : p * (1.0 / m);
}

/// Euclid with relative thresholding; returns a monic gcd (1 if coprime).
inline RealPoly numeric_gcd(RealPoly a, RealPoly b, double tol) {
  a = unit_scaled(a.trimmed(tol));
  b = unit_scaled(b.trimmed(tol));
  if (a.degree() < b.degree()) std::swap(a, b);
  if (b.is_zero()) return Monic<double>::normalized(a).poly();
  while (b.degree() > 0) {
    auto r = divmod(a, b).second;
    if (r.max_abs_coeff() <= tol * std::max(1.0, a.max_abs_coeff())) break;
    a = b;
    b = unit_scaled(r.trimmed(tol));
  }
  if (b.degree() == 0) return RealPoly::constant(1.0);
  return Monic<double>::normalized(b).poly();
}

template <class S>
int sign_of(const S& v, double zero_band) {
  if (v > S(zero_band)) return 1;
  if (v < S(-zero_band)) return -1;
  return 0;
}

/// Sturm chain p, p', -rem(...), ... for a polynomial over S (double or rational).
template <class S>
class SturmChain {
 public:
  SturmChain(const Polynomial<S>& p, double sturm_tol) {
    seq_.push_back(p);
    if (p.degree() == 0) return;
    seq_.push_back(p.derivative());
    while (seq_.back().degree() > 0) {
      auto r = -divmod(seq_[seq_.size() - 2], seq_.back()).second;
      if constexpr (std::is_floating_point_v<S>) {
        const double scale = std::max(seq_[seq_.size() - 2].max_abs_coeff(), 1e-300);
        if (r.max_abs_coeff() <= sturm_tol * scale) {
          ambiguous_ = true;
          break;
        }
        r = r * (1.0 / r.max_abs_coeff());
        if (std::abs(r.leading()) <= sturm_tol) ambiguous_ = true;
      }
      if (r.is_zero()) break;
      seq_.push_back(std::move(r));
    }
  }

  bool ambiguous() const { return ambiguous_; }

  int variations_at_infinity(bool positive) const {
    int count = 0, last = 0;
    for (const auto& s : seq_) {
      int sg = s.leading() > S(0) ? 1 : -1;
      if (!positive && s.degree() % 2 == 1) sg = -sg;
      if (last != 0 && sg != last) ++count;
      last = sg;
    }
    return count;
  }

  int variations(const S& x) const {
    int count = 0, last = 0;
    for (const auto& s : seq_) {
      const S v = s(x);
      double band = 0;
      if constexpr (std::is_floating_point_v<S>) {
        double scale = 0, ax = std::abs(x), pw = 1;
        for (const auto& c : s.coeffs()) scale += std::abs(c) * pw, pw *= ax;
        band = 8 * eps() * scale * static_cast<double>(s.degree() + 1);
      }
      const int sg = sign_of(v, band);
      if (sg == 0) continue;
      if (last != 0 && sg != last) ++count;
      last = sg;
    }
    return count;
  }

  std::size_t distinct_real_roots() const {
    return static_cast<std::size_t>(variations_at_infinity(false) - variations_at_infinity(true));
  }

 private:
  std::vector<Polynomial<S>> seq_;
  bool ambiguous_ = false;
};

inline Polynomial<Rational> to_rational(const RealPoly& p) {
  std::vector<Rational> c;
  for (double v : p.coeffs()) c.emplace_back(v);
  return Polynomial<Rational>(std::move(c));
}

struct Bracket {
  double lo, hi;
};

/// Bisects [-bound, bound] until each bracket holds exactly one root.
/// Returns nothing if the counts turn out inconsistent.
template <class S>
std::optional<std::vector<Bracket>> isolate(const SturmChain<S>& chain, double bound, std::size_t expected) {
  struct Item {
    double lo, hi;
    int vlo, vhi;
  };
  std::vector<Bracket> out;
  std::vector<Item> stack{{-bound, bound, chain.variations(S(-bound)), chain.variations(S(bound))}};
  int guard = 0;
  while (!stack.empty()) {
    if (++guard > 100000) return std::nullopt;
    Item it = stack.back();
    stack.pop_back();
    const int count = it.vlo - it.vhi;
    if (count < 0) return std::nullopt;
    if (count == 0) continue;
    if (count == 1) {
      out.push_back({it.lo, it.hi});
      continue;
    }
    const double mid = 0.5 * (it.lo + it.hi);
    if (!(mid > it.lo && mid < it.hi)) return std::nullopt;
    const int vmid = chain.variations(S(mid));
    stack.push_back({mid, it.hi, vmid, it.vhi});
    stack.push_back({it.lo, mid, it.vlo, vmid});
  }
  if (out.size() != expected) return std::nullopt;
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.lo < b.lo; });
  return out;
}

/// h(x) by compensated Horner (error-free transformations), with a bound on
/// its rounding error. The bound is of order (n eps)^2 times sum |c_i| |x|^i.
inline std::pair<double, double> eval_with_bound(const RealPoly& h, double x) {
  const auto& c = h.coeffs();
  double s = c.back(), e = 0, bound = std::abs(c.back());
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    const double p = s * x;
    const double pe = std::fma(s, x, -p);
    const double t = p + c[i];
    const double z = t - p;
    const double se = (p - (t - z)) + (c[i] - z);
    s = t;
    e = e * x + (pe + se);
    bound = bound * std::abs(x) + std::abs(c[i]);
  }
  const double v = s + e;
  const double g = 2 * static_cast<double>(c.size() + 1) * eps();
  return {v, 2 * eps() * std::abs(v) + 4 * g * g * bound};
}

/// Sign of h(x), exact: the float value is trusted only outside its error
/// bound, otherwise h is evaluated in rational arithmetic.
inline int sign_at(const RealPoly& h, double x) {
  const auto [v, err] = eval_with_bound(h, x);
  if (std::abs(v) > err) return v > 0 ? 1 : -1;
  const auto& c = h.coeffs();
  const Rational rx(x);
  Rational acc(c.back());
  for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * rx + Rational(c[i]);
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

/// Bisection on the sign of h inside a Sturm bracket (lo, hi] holding one
/// simple root. Stops at polish_tol or once h(mid) drops into its rounding
/// noise. Returns nothing if the endpoint signs contradict the bracket.
inline std::optional<double> refine_root(const RealPoly& h, Bracket br, double polish_tol) {
  double lo = br.lo, hi = br.hi;
  const int shi = sign_at(h, hi);
  if (shi == 0) return hi;
  int slo = sign_at(h, lo);
  if (slo == 0) slo = -shi;  // root at lo lies outside (lo, hi]
  if (slo == shi) return std::nullopt;
  for (int it = 0; it < 2200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi) || hi - lo <= polish_tol * (1 + std::abs(mid))) break;
    const auto [v, err] = eval_with_bound(h, mid);
    if (std::abs(v) <= err) return mid;
    if ((v > 0 ? 1 : -1) == slo)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

inline double cauchy_bound(const RealPoly& monic) {
  double m = 0;
  for (std::size_t i = 0; i + 1 < monic.coeffs().size(); ++i) m = std::max(m, std::abs(monic[i]));
  return 1 + m;
}

}  // namespace detail

struct ComplexRootOptions {
  /// Returned roots satisfy |P(z)| <= tol * sum_i |c_i| |z|^i.
  double tol = 1e-12;
  int max_iter = 1000;
  /// Roots closer than cluster_tol * (1 + |z|) are merged into their centroid.
  double cluster_tol = 1e-6;
};

namespace detail {

inline double eval_scale(const std::vector<std::complex<double>>& c, std::complex<double> z) {
  double s = 0, pw = 1, az = std::abs(z);
  for (auto v : c) s += std::abs(v) * pw, pw *= az;
  return s;
}

inline std::vector<std::complex<double>> cluster_roots(std::vector<std::complex<double>> z, double tol) {
  const std::size_t n = z.size();
  std::vector<std::size_t> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = i;
  auto find = [&](std::size_t i) {
    while (comp[i] != i) i = comp[i] = comp[comp[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(z[i] - z[j]) <= tol * (1 + std::abs(z[i]))) comp[find(i)] = find(j);
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> sum = 0;
    int cnt = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (find(j) == find(i)) sum += z[j], ++cnt;
    out[i] = sum / static_cast<double>(cnt);
  }
  return out;
}

}  // namespace detail

/// Aberth-Ehrlich iteration. When `start` is given (same size as the degree),
/// root k of the result is the one the iteration reached from start[k], and the
/// order is preserved; otherwise roots are returned unordered.
inline std::vector<std::complex<double>> aberth(const Polynomial<std::complex<double>>& p,
                                                std::vector<std::complex<double>> start,
                                                const ComplexRootOptions& opt) {
  using C = std::complex<double>;
  const std::size_t n = p.degree();
  if (n == 0) return {};
  const auto& c = p.coeffs();
  const C lead = p.leading();
  if (start.size() != n) {
    const C center = -c[n - 1] / (lead * static_cast<double>(n));
    double radius = 0;
    const auto shifted = p.taylor_shift(center);
    for (std::size_t k = 1; k <= n; ++k)
      radius = std::max(radius, std::pow(std::abs(shifted[n - k] / lead), 1.0 / static_cast<double>(k)));
    radius = std::max(2 * radius, 1e-3);
    start.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
      start[k] = center + radius * C(std::cos(ang), std::sin(ang));
    }
  }
  auto z = std::move(start);
  const auto dp = p.derivative();
  std::vector<bool> done(n, false);
  for (int it = 0; it < opt.max_iter; ++it) {
    bool all = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const C pv = p(z[k]);
      const double scale = detail::eval_scale(c, z[k]);
      if (std::abs(pv) <= 4 * detail::eps() * static_cast<double>(n + 1) * scale) {
        done[k] = true;
        continue;
      }
      const C w = pv / dp(z[k]);
      C s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const C corr = w / (1.0 - w * s);
      if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) {
        z[k] += C(1e-7, 1e-7) * (1 + std::abs(z[k]));
        all = false;
        continue;
      }
      z[k] -= corr;
      if (std::abs(corr) <= 2 * detail::eps() * std::abs(z[k])) done[k] = true;
      all = all && done[k];
    }
    if (all) break;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = detail::eval_scale(c, z[k]);
    if (!(std::abs(p(z[k])) <= std::max(opt.tol, 64 * detail::eps()) * scale))
      throw RootFindingFailed("Aberth iteration did not converge");
  }
  return z;
}

/// All complex zeros of a monic complex polynomial, with multiplicities
/// recovered by clustering.
inline ComplexRootTuple complex_roots(const ComplexPoly& p, const ComplexRootOptions& opt = {}) {
  if (p.degree() == 0) throw DegreeError("complex roots of a degree-0 polynomial");
  auto z = aberth(p.poly(), {}, opt);
  z = detail::cluster_roots(std::move(z), opt.cluster_tol);
  for (auto v : z)
    if (std::abs(p(v)) > opt.tol * std::max(1.0, detail::eval_scale(p.coeffs(), v)))
      throw RootFindingFailed("complex root residual above tolerance");
  return ComplexRootTuple(std::move(z));
}

inline ComplexRootTuple complex_roots(const Polynomial<std::complex<double>>& p,
                                      const ComplexRootOptions& opt = {}) {
  return complex_roots(ComplexPoly::normalized(p), opt);
}

namespace detail {

struct SquareFreeSplit {
  RealPoly squarefree;  // monic, simple roots
  RealPoly repeated;    // monic gcd(P, P'), constant 1 if none
};

inline SquareFreeSplit split_squarefree(const RealPoly& p, double gcd_tol) {
  auto g = numeric_gcd(p, p.derivative(), gcd_tol);
  if (g.degree() == 0) return {Monic<double>::normalized(p).poly(), g};
  auto q = divmod(p, g).first;
  return {Monic<double>::normalized(q).poly(), g};
}

/// Distinct real roots of a square-free polynomial, via Sturm isolation;
/// the float chain is replaced by an exact one when its signs are ambiguous.
inline std::vector<double> distinct_real_roots(const RealPoly& h, const RootOptions& opt) {
  if (h.degree() == 0) return {};
  const auto monic = Monic<double>::normalized(h).poly();
  const double bound = cauchy_bound(monic);
  auto locate = [&](const auto& chain) -> std::optional<std::vector<double>> {
    const auto br = isolate(chain, bound, chain.distinct_real_roots());
    if (!br) return std::nullopt;
    std::vector<double> r;
    for (auto b : *br) {
      const auto x = refine_root(monic, b, opt.polish_tol);
      if (!x) return std::nullopt;
      r.push_back(*x);
    }
    return r;
  };
  SturmChain<double> chain(monic, opt.sturm_tol);
  if (!chain.ambiguous())
    if (auto r = locate(chain)) return *r;
  if (!opt.exact_fallback)
    throw CertificationAmbiguous("floating Sturm signs ambiguous; retry with exact_fallback");
  SturmChain<Rational> exact(to_rational(monic), 0.0);
  if (auto r = locate(exact)) return *r;
  throw CertificationAmbiguous("exact Sturm isolation failed");
}

}  // namespace detail

/// Real roots of an arbitrary real polynomial (distinct, sorted), without
/// multiplicity. Used for critical-point searches.
inline std::vector<double> real_roots_distinct(const RealPoly& p, const RootOptions& opt = {}) {
  auto t = p.trimmed(1e-14);
  if (t.degree() == 0) return {};
  auto split = detail::split_squarefree(t, opt.gcd_tol);
  auto r = detail::distinct_real_roots(split.squarefree, opt);
  std::sort(r.begin(), r.end());
  return r;
}

/// Certifies real-rootedness. Returns the sorted roots with multiplicity when
/// every root is real, otherwise the real-root count.
inline RealRootsResult real_roots_certified(const MonicPoly& p, const RootOptions& opt = {}) {
  const std::size_t n = p.degree();
  if (n == 0) throw DegreeError("root certification needs degree >= 1");
  if (n == 1) return HyperbolicPoly(p, RootTuple({-p[0]}), Certificate::SturmExact, opt.recon_tol);

  auto split = detail::split_squarefree(p.poly(), opt.gcd_tol);
  auto distinct = detail::distinct_real_roots(split.squarefree, opt);
  std::vector<std::size_t> mult(distinct.size(), 1);

  if (split.repeated.degree() > 0) {
    // Each zero of gcd(P, P') is a repeated zero of P; attach it to the
    // nearest distinct real zero when it is real and close.
    auto rep = complex_roots(ComplexPoly::normalized(to_complex(split.repeated)));
    const double scale = detail::cauchy_bound(p.poly());
    for (auto z : rep) {
      std::size_t best = distinct.size();
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        const double d = std::abs(z - std::complex<double>(distinct[i], 0));
        if (d < bd) bd = d, best = i;
      }
      if (best < distinct.size() && bd <= 1e-4 * scale) ++mult[best];
    }
  }

  std::size_t real_count = 0;
  for (auto m : mult) real_count += m;
  if (distinct.size() != split.squarefree.degree() || real_count != n)
    return NotHyperbolic{real_count};

  std::vector<double> roots;
  for (std::size_t i = 0; i < distinct.size(); ++i) roots.insert(roots.end(), mult[i], distinct[i]);
  const auto cert = split.repeated.degree() > 0 ? Certificate::Reconstructed : Certificate::SturmExact;
  return HyperbolicPoly(p, RootTuple(std::move(roots)), cert, opt.recon_tol);
}

inline bool is_hyperbolic(const RealRootsResult& r) { return std::holds_alternative<HyperbolicPoly>(r); }

/// Certified roots or NotHyperbolicError.
inline HyperbolicPoly require_hyperbolic(const MonicPoly& p, const RootOptions& opt = {},
                                         std::optional<double> lambda = std::nullopt) {
  auto r = real_roots_certified(p, opt);
  if (auto* h = std::get_if<HyperbolicPoly>(&r)) return std::move(*h);
  throw NotHyperbolicError("polynomial is not hyperbolic", lambda);
}

}  // namespace spectral_lab
