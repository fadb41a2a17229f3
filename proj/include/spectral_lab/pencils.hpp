#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spectral_lab/errors.hpp"
#include "spectral_lab/majorization.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"

namespace spectral_lab {

/// Basis {P, Q} of the pencil {P - lambda Q}: P monic of degree n, deg Q <= n-1,
/// and Q has leading coefficient n whenever deg Q = n-1. A lower-degree Q is
/// accepted as given and flagged by q_normalized() == false.
class PencilBasis {
 public:
  PencilBasis(MonicPoly p, RealPoly q, double param_scale = 1.0, std::string note = {})
      : p_(std::move(p)), q_(std::move(q)), param_scale_(param_scale), note_(std::move(note)) {
    const std::size_t n = p_.degree();
    if (n == 0) throw DegreeError("pencil basis needs deg P >= 1");
    if (q_.is_zero()) throw DegeneratePencil("Q vanishes identically");
    if (q_.degree() > n - 1) throw ArgumentError("pencil basis needs deg Q <= n - 1");
    if (q_.degree() == n - 1 && std::abs(q_.leading() - static_cast<double>(n)) > 1e-12 * static_cast<double>(n))
      throw ArgumentError("Q of degree n - 1 must have leading coefficient n");
  }

  const MonicPoly& p() const { return p_; }
  const RealPoly& q() const { return q_; }
  std::size_t degree() const { return p_.degree(); }
  bool q_normalized() const { return q_.degree() + 1 == p_.degree(); }
  /// A segment parameter t of the original pair maps to lambda = t * param_scale.
  double param_scale() const { return param_scale_; }
  const std::string& note() const { return note_; }

  /// P - lambda Q (monic because deg Q < deg P).
  MonicPoly member(double lambda) const {
    std::vector<double> c = p_.coeffs();
    for (std::size_t i = 0; i < q_.coeffs().size(); ++i) c[i] -= lambda * q_[i];
    return MonicPoly(std::move(c));
  }

 private:
  MonicPoly p_;
  RealPoly q_;
  double param_scale_;
  std::string note_;
};

/// Basis of the line through two distinct monic polynomials of equal degree.
inline PencilBasis make_basis(const MonicPoly& p1, const MonicPoly& p2) {
  if (p1.degree() != p2.degree()) throw ShapeError("pencil endpoints need equal degree");
  const std::size_t n = p1.degree();
  RealPoly d = p1.poly() - p2.poly();
  if (d.is_zero()) throw DegeneratePencil("P1 == P2");
  if (d.degree() + 1 == n) {
    const double lead = d.leading();
    RealPoly q = d * (static_cast<double>(n) / lead);
    std::vector<double> c = q.coeffs();
    c.back() = static_cast<double>(n);
    return PencilBasis(p1, RealPoly(std::move(c)), lead / static_cast<double>(n));
  }
  return PencilBasis(p1, std::move(d), 1.0, "deg(P1 - P2) < n - 1: Q kept unnormalized");
}

enum class Interlacing { StrictInterlace, WeakInterlace, None };

inline const char* to_string(Interlacing i) {
  switch (i) {
    case Interlacing::StrictInterlace: return "StrictInterlace";
    case Interlacing::WeakInterlace: return "WeakInterlace";
    case Interlacing::None: return "None";
  }
  return "?";
}

/// Interleaving of sorted roots; |y| must be |x| or |x| - 1.
inline Interlacing interlace_check(std::span<const double> xr, std::span<const double> yr, double tol = 1e-9) {
  std::vector<double> x(xr.begin(), xr.end()), y(yr.begin(), yr.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size(), m = y.size();
  if (!(m == n || m + 1 == n)) throw ShapeError("interlacing needs deg Q in {n, n - 1}");

  // Merge into the alternating chain and classify each link.
  auto classify = [&](const std::vector<double>& chain) {
    bool strict = true;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const double a = chain[i], b = chain[i + 1];
      const double t = tol * (1 + std::max(std::abs(a), std::abs(b)));
      if (a > b + t) return Interlacing::None;
      if (b - a <= t) strict = false;
    }
    return strict ? Interlacing::StrictInterlace : Interlacing::WeakInterlace;
  };
  auto chain_of = [&](const std::vector<double>& first, const std::vector<double>& second) {
    std::vector<double> c;
    for (std::size_t i = 0; i < first.size(); ++i) {
      c.push_back(first[i]);
      if (i < second.size()) c.push_back(second[i]);
    }
    return c;
  };

  Interlacing best = classify(chain_of(x, y));
  if (m == n) {
    const Interlacing other = classify(chain_of(y, x));
    if (other == Interlacing::StrictInterlace || (other == Interlacing::WeakInterlace && best == Interlacing::None))
      best = other;
  }
  return best;
}

inline Interlacing interlace_check(const HyperbolicPoly& p, const HyperbolicPoly& q, double tol = 1e-9) {
  return interlace_check(std::span<const double>(p.roots().values()), std::span<const double>(q.roots().values()), tol);
}

/// Q is any real polynomial of degree n or n-1; it is certified after normalization.
inline Interlacing interlace_check(const HyperbolicPoly& p, const RealPoly& q, double tol = 1e-9,
                                   const RootOptions& opt = {}) {
  if (q.degree() == 0) {
    if (p.degree() != 1) throw ShapeError("interlacing needs deg Q in {n, n - 1}");
    return Interlacing::StrictInterlace;
  }
  auto qr = real_roots_certified(MonicPoly::normalized(q), opt);
  auto* qh = std::get_if<HyperbolicPoly>(&qr);
  if (!qh) throw NotHyperbolicError("second polynomial is not hyperbolic");
  return interlace_check(p, *qh, tol);
}

enum class HalfPlane { ClosedUpper, ClosedLower, Mixed };

inline const char* to_string(HalfPlane h) {
  switch (h) {
    case HalfPlane::ClosedUpper: return "ClosedUpper";
    case HalfPlane::ClosedLower: return "ClosedLower";
    case HalfPlane::Mixed: return "Mixed";
  }
  return "?";
}

/// Location of the zeros of P + iR; imaginary parts within im_tol * (1 + |z|)
/// count as real. All-real zero sets report ClosedUpper.
inline HalfPlane hermite_biehler_check(const RealPoly& p, const RealPoly& r, double im_tol = 1e-7) {
  using C = std::complex<double>;
  const std::size_t n = std::max(p.degree(), r.degree());
  std::vector<C> c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) c[i] = C(p.coeff(i), r.coeff(i));
  Polynomial<C> f(std::move(c));
  if (f.degree() == 0) throw ArgumentError("P + iR must be nonconstant");
  const auto z = complex_roots(f);
  bool up = true, down = true;
  for (auto v : z) {
    const double band = im_tol * (1 + std::abs(v));
    if (v.imag() < -band) up = false;
    if (v.imag() > band) down = false;
  }
  if (up) return HalfPlane::ClosedUpper;
  if (down) return HalfPlane::ClosedLower;
  return HalfPlane::Mixed;
}

struct PencilScanOptions {
  std::size_t grid_points = 41;
  /// Grid half-width; defaults to 1 + span(P) (or 1 + Cauchy bound if P is not hyperbolic).
  std::optional<double> lambda_max;
  RootOptions roots;
};

struct HyperbolicityReport {
  /// P and R = P - Q hyperbolic with weakly interlacing zeros.
  bool cond_iii = false;
  /// P hyperbolic, Q hyperbolic of degree n - 1, weakly interlacing.
  bool cond_iv = false;
  /// P + iR and P + iQ both have their zeros in one closed half-plane.
  bool cond_v = false;
  HalfPlane half_plane_pr = HalfPlane::Mixed;
  HalfPlane half_plane_pq = HalfPlane::Mixed;
  /// Every sampled member P - lambda Q certified hyperbolic.
  bool sampled_i = false;
  std::size_t samples = 0;
  std::optional<double> failing_lambda;
  /// All four verdicts coincide.
  bool conditions_agree = false;
  /// All four conditions hold (and hence agree): the pencil is hyperbolic.
  bool consensus = false;
};

namespace detail {

/// Extra sample points that hit every interval of constant real-root count:
/// the count can only change at critical values P(x)/Q(x), where x is a real
/// zero of the Wronskian P'Q - PQ'.
inline std::vector<double> critical_lambda_samples(const RealPoly& p, const RealPoly& q, const RootOptions& opt) {
  const RealPoly w = p.derivative() * q - p * q.derivative();
  std::vector<double> crit;
  for (double x : real_roots_distinct(w, opt)) {
    const double qv = q(x);
    double scale = 0, pw = 1;
    for (double c : q.coeffs()) scale += std::abs(c) * pw, pw *= std::abs(x);
    if (std::abs(qv) > 1e-9 * scale) crit.push_back(p(x) / qv);
  }
  std::sort(crit.begin(), crit.end());
  std::vector<double> out;
  if (crit.empty()) return out;
  out.push_back(crit.front() - 1);
  for (std::size_t i = 0; i + 1 < crit.size(); ++i) out.push_back(0.5 * (crit[i] + crit[i + 1]));
  out.push_back(crit.back() + 1);
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) return {0.5 * (lo + hi)};
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

}  // namespace detail

/// Runs the equivalent hyperbolicity criteria for the pencil {P - lambda Q}.
/// Disagreement is reported, not thrown.
inline HyperbolicityReport pencil_hyperbolicity(const MonicPoly& p, const RealPoly& q,
                                                const PencilScanOptions& opt = {}) {
  const std::size_t n = p.degree();
  if (n == 0) throw DegreeError("pencil needs deg P >= 1");
  if (q.is_zero() || q.degree() >= n) throw ArgumentError("pencil needs nonzero Q with deg Q <= n - 1");
  HyperbolicityReport rep;

  const auto pr = real_roots_certified(p, opt.roots);
  const auto* ph = std::get_if<HyperbolicPoly>(&pr);
  std::vector<double> rc = p.coeffs();
  for (std::size_t i = 0; i < q.coeffs().size(); ++i) rc[i] -= q[i];
  const MonicPoly r(std::move(rc));

  if (ph) {
    const auto rr = real_roots_certified(r, opt.roots);
    if (const auto* rh = std::get_if<HyperbolicPoly>(&rr))
      rep.cond_iii = interlace_check(*ph, *rh) != Interlacing::None;
    if (q.degree() + 1 == n) {
      try {
        rep.cond_iv = interlace_check(*ph, q, 1e-9, opt.roots) != Interlacing::None;
      } catch (const NotHyperbolicError&) {
        rep.cond_iv = false;
      }
    }
  }

  rep.half_plane_pr = hermite_biehler_check(p.poly(), r.poly());
  rep.half_plane_pq = hermite_biehler_check(p.poly(), q);
  rep.cond_v = rep.half_plane_pr != HalfPlane::Mixed && rep.half_plane_pq != HalfPlane::Mixed;

  const double lmax = opt.lambda_max ? *opt.lambda_max
                                     : 1 + (ph ? span(*ph) : detail::cauchy_bound(p.poly()));
  auto samples = detail::uniform_grid(-lmax, lmax, opt.grid_points);
  const auto extra = detail::critical_lambda_samples(p.poly(), q, opt.roots);
  samples.insert(samples.end(), extra.begin(), extra.end());
  rep.samples = samples.size();
  rep.sampled_i = true;
  const PencilBasis basis(p, q);
  for (double lam : samples) {
    if (!is_hyperbolic(real_roots_certified(basis.member(lam), opt.roots))) {
      rep.sampled_i = false;
      rep.failing_lambda = lam;
      break;
    }
  }

  rep.conditions_agree = rep.cond_iii == rep.cond_iv && rep.cond_iv == rep.cond_v && rep.cond_v == rep.sampled_i;
  rep.consensus = rep.conditions_agree && rep.sampled_i;
  return rep;
}

inline HyperbolicityReport pencil_hyperbolicity(const PencilBasis& b, const PencilScanOptions& opt = {}) {
  return pencil_hyperbolicity(b.p(), b.q(), opt);
}

struct TrajectoryGrid {
  std::vector<double> lambdas;
  /// roots[k][i] = x_i(lambdas[k]), nondecreasing in i.
  std::vector<std::vector<double>> roots;
  /// Filled on request; NaN where the closed forms do not apply.
  std::optional<std::vector<std::vector<double>>> velocities;
  std::optional<std::vector<std::vector<double>>> accelerations;
};

namespace detail {

struct RootDerivatives {
  double root, velocity, acceleration;
};

/// Closed-form first and second lambda-derivatives of the i-th zero of
/// P - lambda Q, valid at simple zeros where Q does not vanish.
inline RootDerivatives root_derivatives(const RealPoly& p, const RealPoly& q, double lambda, std::size_t i,
                                        const RootOptions& opt = {}, double generic_tol = 1e-9) {
  const RealPoly r = p - q * lambda;
  const auto h = require_hyperbolic(MonicPoly::normalized(r), opt, lambda);
  if (i >= h.degree()) throw ArgumentError("root index out of range");
  const double x = h.roots()[i];
  const RealPoly dr = r.derivative(), d2r = dr.derivative(), dq = q.derivative();
  auto scale_of = [&](const RealPoly& f) {
    double s = 0, pw = 1;
    for (double c : f.coeffs()) s += std::abs(c) * pw, pw *= std::abs(x);
    return std::max(s, 1e-300);
  };
  const double rp = dr(x), qv = q(x);
  if (std::abs(rp) <= generic_tol * scale_of(dr)) throw GenericityError("multiple root: closed form undefined");
  if (std::abs(qv) <= generic_tol * scale_of(q)) throw GenericityError("Q vanishes at the root");
  const double v = qv / rp;
  const double a = v * v * (2 * dq(x) / qv - d2r(x) / rp);
  return {x, v, a};
}

}  // namespace detail

/// Sorted zeros of P - lambda Q over a strictly increasing grid. Sorting is
/// the continuous labeling because hyperbolic pencils keep each zero caged
/// between consecutive zeros of Q.
inline TrajectoryGrid root_trajectories(const PencilBasis& b, std::span<const double> lambdas,
                                        bool with_derivatives = false, const RootOptions& opt = {}) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw ArgumentError("lambda grid must be strictly increasing");
  TrajectoryGrid g;
  g.lambdas.assign(lambdas.begin(), lambdas.end());
  if (with_derivatives) g.velocities.emplace(), g.accelerations.emplace();
  for (double lam : lambdas) {
    const auto h = require_hyperbolic(b.member(lam), opt, lam);
    g.roots.push_back(h.roots().values());
    if (with_derivatives) {
      std::vector<double> v, a;
      for (std::size_t i = 0; i < h.degree(); ++i) {
        try {
          auto d = detail::root_derivatives(b.p().poly(), b.q(), lam, i, opt);
          v.push_back(d.velocity), a.push_back(d.acceleration);
        } catch (const GenericityError&) {
          v.push_back(std::numeric_limits<double>::quiet_NaN());
          a.push_back(std::numeric_limits<double>::quiet_NaN());
        }
      }
      g.velocities->push_back(std::move(v));
      g.accelerations->push_back(std::move(a));
    }
  }
  return g;
}

/// x_i'(lambda) = Q(x_i) / R_lambda'(x_i), i zero-based.
inline double root_velocity(const RealPoly& p, const RealPoly& q, double lambda, std::size_t i,
                            const RootOptions& opt = {}) {
  return detail::root_derivatives(p, q, lambda, i, opt).velocity;
}

/// x_i''(lambda) = x_i'^2 [2Q'/Q - R_lambda''/R_lambda'](x_i), i zero-based.
inline double root_acceleration(const RealPoly& p, const RealPoly& q, double lambda, std::size_t i,
                                const RootOptions& opt = {}) {
  return detail::root_derivatives(p, q, lambda, i, opt).acceleration;
}

inline double root_velocity(const PencilBasis& b, double lambda, std::size_t i, const RootOptions& opt = {}) {
  return root_velocity(b.p().poly(), b.q(), lambda, i, opt);
}

inline double root_acceleration(const PencilBasis& b, double lambda, std::size_t i, const RootOptions& opt = {}) {
  return root_acceleration(b.p().poly(), b.q(), lambda, i, opt);
}

/// {P, Q} with the common factor S = gcd(P, Q) split off.
struct ReducedPencil {
  RealPoly common;           // monic S
  MonicPoly p;               // P / S
  RealPoly q;                // Q / S
  std::vector<double> roots; // distinct zeros of P / S, sorted
  std::vector<std::size_t> multiplicities;  // multiplicity in P of each entry of roots
};

/// `cluster_tol` is the relative remainder threshold of the numerical gcd.
inline ReducedPencil reduce(const PencilBasis& b, double cluster_tol = 1e-9, const RootOptions& opt = {}) {
  const RealPoly s = detail::numeric_gcd(b.p().poly(), b.q(), cluster_tol);
  const MonicPoly pt = MonicPoly::normalized(divmod(b.p().poly(), s).first);
  const RealPoly qt = divmod(b.q(), s).first;
  ReducedPencil red{s, pt, qt, {}, {}};
  const auto full = require_hyperbolic(b.p(), opt);
  const auto part = require_hyperbolic(pt, opt);
  red.roots = part.roots().values();
  for (double x : red.roots) {
    std::size_t m = 0;
    for (double y : full.roots()) m += std::abs(x - y) <= 1e-6 * (1 + std::abs(x)) ? 1 : 0;
    red.multiplicities.push_back(m);
  }
  return red;
}

struct ConvexityReport {
  std::vector<double> lambdas;          // points kept (hyperbolic members)
  std::vector<double> max_root_values;
  std::vector<double> second_differences;  // at interior kept points
  double min_second_difference = std::numeric_limits<double>::infinity();
  bool is_convex = true;
  std::vector<double> excluded_lambdas;  // clipped (non-hyperbolic) grid points
};

struct SpanReport {
  std::vector<double> lambdas;
  std::vector<double> span_values;
  std::vector<double> second_differences;
  double min_second_difference = std::numeric_limits<double>::infinity();
  bool is_convex = true;
  double argmin = 0;
  double min_span = 0;
  std::vector<double> excluded_lambdas;
};

namespace detail {

/// Second difference on a possibly nonuniform grid, in units of f; equals
/// f(l+h) - 2 f(l) + f(l-h) when the spacing is uniform.
inline double second_difference(double l0, double f0, double l1, double f1, double l2, double f2) {
  const double h0 = l1 - l0, h1 = l2 - l1;
  return 2 * (h0 * f2 - (h0 + h1) * f1 + h1 * f0) / (h0 + h1);
}

/// Evaluates f(member(lambda)) on the grid. Non-hyperbolic members are clipped
/// when Q is degenerate (deg Q < n - 1) and rejected otherwise.
template <class F>
void scan_values(const PencilBasis& b, std::span<const double> grid, const RootOptions& opt, F&& f,
                 std::vector<double>& kept, std::vector<double>& values, std::vector<double>& excluded) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ArgumentError("lambda grid must be strictly increasing");
  for (double lam : grid) {
    auto r = real_roots_certified(b.member(lam), opt);
    if (auto* h = std::get_if<HyperbolicPoly>(&r)) {
      kept.push_back(lam);
      values.push_back(f(*h));
    } else if (!b.q_normalized()) {
      excluded.push_back(lam);
    } else {
      throw NotHyperbolicError("pencil member not hyperbolic", lam);
    }
  }
}

template <class F>
void convexity_pass(const PencilBasis& b, const std::vector<double>& l, const std::vector<double>& v,
                    const RootOptions& opt, double conv_tol, F&& f, std::vector<double>& d2, double& dmin) {
  for (std::size_t i = 1; i + 1 < l.size(); ++i) {
    double d = second_difference(l[i - 1], v[i - 1], l[i], v[i], l[i + 1], v[i + 1]);
    if (d < -conv_tol) {
      // Recheck on a half-width stencil before calling it a violation.
      const double h = 0.5 * std::min(l[i] - l[i - 1], l[i + 1] - l[i]);
      auto lo = real_roots_certified(b.member(l[i] - h), opt);
      auto hi = real_roots_certified(b.member(l[i] + h), opt);
      if (is_hyperbolic(lo) && is_hyperbolic(hi)) {
        const double fine = f(std::get<HyperbolicPoly>(lo)) - 2 * v[i] + f(std::get<HyperbolicPoly>(hi));
        const double full = 0.5 * (l[i + 1] - l[i - 1]);
        d = fine * (full / h) * (full / h);
      }
    }
    d2.push_back(d);
    dmin = std::min(dmin, d);
  }
}

}  // namespace detail

/// Convexity of lambda -> max Z(P - lambda Q) on a grid.
inline ConvexityReport garding_scan(const PencilBasis& b, std::span<const double> grid, double conv_tol = 1e-7,
                                    const RootOptions& opt = {}) {
  ConvexityReport rep;
  auto maxroot = [](const HyperbolicPoly& h) { return h.roots().max(); };
  detail::scan_values(b, grid, opt, maxroot, rep.lambdas, rep.max_root_values, rep.excluded_lambdas);
  detail::convexity_pass(b, rep.lambdas, rep.max_root_values, opt, conv_tol, maxroot, rep.second_differences,
                         rep.min_second_difference);
  rep.is_convex = !(rep.min_second_difference < -conv_tol);
  return rep;
}

/// Span of P - lambda Q along a grid, its convexity and the location of its minimum.
inline SpanReport span_scan(const PencilBasis& b, std::span<const double> grid, double conv_tol = 1e-7,
                            const RootOptions& opt = {}) {
  SpanReport rep;
  auto spanf = [](const HyperbolicPoly& h) { return span(h); };
  detail::scan_values(b, grid, opt, spanf, rep.lambdas, rep.span_values, rep.excluded_lambdas);
  if (rep.lambdas.empty()) throw NotHyperbolicError("no hyperbolic member on the grid");
  detail::convexity_pass(b, rep.lambdas, rep.span_values, opt, conv_tol, spanf, rep.second_differences,
                         rep.min_second_difference);
  rep.is_convex = !(rep.min_second_difference < -conv_tol);

  const auto it = std::min_element(rep.span_values.begin(), rep.span_values.end());
  const std::size_t k = static_cast<std::size_t>(it - rep.span_values.begin());
  rep.argmin = rep.lambdas[k];
  rep.min_span = *it;
  if (rep.lambdas.size() >= 2) {
    // Golden-section refinement on the bracketing cells.
    double lo = rep.lambdas[k == 0 ? 0 : k - 1];
    double hi = rep.lambdas[std::min(k + 1, rep.lambdas.size() - 1)];
    auto eval = [&](double lam) {
      auto r = real_roots_certified(b.member(lam), opt);
      auto* h = std::get_if<HyperbolicPoly>(&r);
      return h ? span(*h) : std::numeric_limits<double>::infinity();
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = eval(c), fd = eval(d);
    for (int it2 = 0; it2 < 200 && hi - lo > 1e-12 * (1 + std::abs(lo) + std::abs(hi)); ++it2) {
      if (fc <= fd) {
        hi = d, d = c, fd = fc;
        c = hi - g * (hi - lo), fc = eval(c);
      } else {
        lo = c, c = d, fc = fd;
        d = lo + g * (hi - lo), fd = eval(d);
      }
    }
    const double mid = 0.5 * (lo + hi), fm = eval(mid);
    if (fm <= rep.min_span) rep.argmin = mid, rep.min_span = fm;
  }
  return rep;
}

/// Zeros z_1 <= ... <= z_n of a bridge P3 weakly interlacing both P1 and P2;
/// z_i is the midpoint of [max(x_i, y_i), min(x_{i+1}, y_{i+1})], z_n = max(x_n, y_n).
inline HyperbolicPoly segment_bridge(const HyperbolicPoly& p1, const HyperbolicPoly& p2, double tol = 1e-12) {
  if (p1.degree() != p2.degree()) throw ShapeError("segment endpoints need equal degree");
  const std::size_t n = p1.degree();
  const auto& x = p1.roots();
  const auto& y = p2.roots();
  std::vector<double> z(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lo = std::max(x[i], y[i]), hi = std::min(x[i + 1], y[i + 1]);
    if (lo > hi + tol * (1 + std::abs(lo))) throw SegmentNotHyperbolic("segment leaves the hyperbolic polynomials");
    z[i] = 0.5 * (lo + std::max(lo, hi));
  }
  if (n > 0) z[n - 1] = std::max(x[n - 1], y[n - 1]);
  return from_roots(std::move(z));
}

/// P(x + lambda) - lambda Q(x + lambda). For normalized bases the zero sum is
/// that of P.
inline MonicPoly shift_family(const PencilBasis& b, double lambda) {
  const RealPoly ps = b.p().poly().taylor_shift(lambda);
  const RealPoly qs = b.q().taylor_shift(lambda);
  std::vector<double> c = ps.coeffs();
  for (std::size_t i = 0; i < qs.coeffs().size(); ++i) c[i] -= lambda * qs[i];
  MonicPoly out(std::move(c));
  if (b.q_normalized()) {
    const double s0 = zero_sum(b.p()), s1 = zero_sum(out);
    const double n = static_cast<double>(b.degree());
    if (std::abs(s1 - s0) > 1e-12 * (1 + std::abs(s0) + n * std::abs(lambda)))
      throw Error("zero sum not conserved along the shift family");
  }
  return out;
}

struct LocalMinReport {
  bool local_min = true;
  /// First sampled lambda where the center fails to be below the member.
  std::optional<double> witness_lambda;
  Relation witness_relation = Relation::Less;
  double epsilon = 0;
  std::size_t samples_per_side = 0;
};

/// Samples the shift family on (lambda0 - eps, lambda0 + eps) and checks that
/// the member at lambda0 is below every sample in the spectral order. A
/// NotLocalMin outcome is evidence at this eps only.
inline LocalMinReport local_min_scan(const PencilBasis& b, double lambda0, std::optional<double> eps = std::nullopt,
                                     std::size_t samples = 21, double tol = 1e-9, const RootOptions& opt = {}) {
  auto center_r = real_roots_certified(shift_family(b, lambda0), opt);
  auto* center = std::get_if<HyperbolicPoly>(&center_r);
  if (!center) throw WindowError("shift family not hyperbolic at lambda0");
  LocalMinReport rep;
  rep.samples_per_side = samples;
  if (eps) {
    rep.epsilon = *eps;
  } else {
    double gap = std::numeric_limits<double>::infinity();
    const auto& r = center->roots();
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i] - r[i - 1] > 1e-6 * (1 + std::abs(r[i]))) gap = std::min(gap, r[i] - r[i - 1]);
    rep.epsilon = std::isfinite(gap) ? 0.1 * gap : 0.1 * (1 + std::abs(r[0]));
  }
  for (std::size_t j = 1; j <= samples; ++j) {
    for (double sgn : {-1.0, 1.0}) {
      const double lam = lambda0 + sgn * rep.epsilon * static_cast<double>(j) / static_cast<double>(samples + 1);
      auto rr = real_roots_certified(shift_family(b, lam), opt);
      auto* h = std::get_if<HyperbolicPoly>(&rr);
      if (!h) throw WindowError("shift family loses hyperbolicity inside the window");
      const auto v = hlp_compare(center->roots(), h->roots(), tol);
      if (!less_or_equal(v.relation) && rep.local_min) {
        rep.local_min = false;
        rep.witness_lambda = lam;
        rep.witness_relation = v.relation;
      }
    }
  }
  return rep;
}

/// Offset mu with Q = (P - mu Q)', i.e. {P - mu Q, Q} is a canonical LD basis.
inline std::optional<double> ld_canonical_offset(const PencilBasis& b, double tol = 1e-9) {
  const std::size_t n = b.degree();
  const RealPoly dp = b.p().poly().derivative();
  const RealPoly diff = b.q() - dp;  // must equal -mu Q'
  const RealPoly dq = b.q().derivative();
  double mu = 0;
  if (n >= 2 && b.q_normalized()) mu = -diff.coeff(n - 2) / dq.coeff(n - 2);
  const RealPoly resid = diff + dq * mu;
  const double scale = std::max({1.0, dp.max_abs_coeff(), b.q().max_abs_coeff()});
  if (resid.max_abs_coeff() <= tol * scale) return mu;
  return std::nullopt;
}

/// True iff the pencil is of logarithmic-derivative type.
inline bool ld_detect(const PencilBasis& b, double tol = 1e-9) { return ld_canonical_offset(b, tol).has_value(); }

/// Canonical basis {P, P'} of the LD pencil through P.
inline PencilBasis ld_basis(const MonicPoly& p) { return PencilBasis(p, differentiate(p)); }

}  // namespace spectral_lab
