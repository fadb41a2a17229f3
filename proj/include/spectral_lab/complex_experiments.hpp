#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spectral_lab/errors.hpp"
#include "spectral_lab/lp_operators.hpp"
#include "spectral_lab/majorization.hpp"
#include "spectral_lab/parallel.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"

namespace spectral_lab {

using Complex = std::complex<double>;

/// (1 - mu D) e^{mu D} P = P(x + mu) - mu P'(x + mu) for complex mu.
inline ComplexPoly twist(const ComplexPoly& p, Complex mu) {
  const auto s = p.poly().taylor_shift(mu);
  return ComplexPoly(s - s.derivative() * mu);
}

struct TwistedRootPath {
  std::vector<Complex> lambda_path;
  /// labeled_roots[s][k] = z_k(lambda_path[s]).
  std::vector<std::vector<Complex>> labeled_roots;
  /// Accepted continuation steps, including adaptive substeps.
  std::size_t substeps = 0;
};

namespace detail {

inline double min_gap(const std::vector<Complex>& z) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) g = std::min(g, std::abs(z[i] - z[j]));
  return g;
}

inline double max_modulus(const std::vector<Complex>& z) {
  double m = 0;
  for (auto v : z) m = std::max(m, std::abs(v));
  return m;
}

/// Continuation step is accepted when every root moves less than half the
/// previous minimal gap, stays nearest to its own predecessor and no two
/// roots merge.
inline bool step_ok(const std::vector<Complex>& prev, const std::vector<Complex>& next, double cluster_tol) {
  const double g = min_gap(prev);
  for (std::size_t k = 0; k < prev.size(); ++k) {
    if (!(std::abs(next[k] - prev[k]) < 0.5 * g)) return false;
    for (std::size_t j = 0; j < prev.size(); ++j)
      if (j != k && std::abs(next[k] - prev[j]) < std::abs(next[k] - prev[k])) return false;
  }
  return min_gap(next) > cluster_tol * (1 + max_modulus(next));
}

}  // namespace detail

/// Zeros of twist(P, t lambda) continued along t in [0, 1]. `reference`, if
/// given, fixes the labels at t = 0 (it must list the zeros of P).
inline TwistedRootPath twisted_root_path(const ComplexPoly& p, Complex lambda, std::size_t steps = 32,
                                         std::optional<std::vector<Complex>> reference = std::nullopt,
                                         const ComplexRootOptions& opt = {}) {
  if (p.degree() == 0) throw DegreeError("twisted roots of a degree-0 polynomial");
  if (steps == 0) throw ArgumentError("steps must be positive");
  std::vector<Complex> prev = reference ? *reference : complex_roots(p, opt).values();
  if (prev.size() != p.degree()) throw ShapeError("reference roots do not match the degree");
  prev = aberth(p.poly(), prev, opt);
  if (!(detail::min_gap(prev) > opt.cluster_tol * (1 + detail::max_modulus(prev))))
    throw LabelingAmbiguous("P has (numerically) repeated zeros");

  TwistedRootPath path;
  path.lambda_path.push_back(0);
  path.labeled_roots.push_back(prev);
  double t = 0;
  const double min_dt = 1e-12 / static_cast<double>(steps);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double target = static_cast<double>(s) / static_cast<double>(steps);
    while (t < target) {
      double dt = target - t;
      for (;;) {
        const double tn = dt == target - t ? target : t + dt;
        bool ok = false;
        std::vector<Complex> next;
        try {
          next = aberth(twist(p, tn * lambda).poly(), prev, opt);
          ok = detail::step_ok(prev, next, opt.cluster_tol);
        } catch (const RootFindingFailed&) {
          ok = false;
        }
        if (ok) {
          t = tn;
          prev = std::move(next);
          ++path.substeps;
          break;
        }
        dt *= 0.5;
        if (dt < min_dt) throw LabelingAmbiguous("continuation cannot separate colliding zeros");
      }
    }
    path.lambda_path.push_back(target * lambda);
    path.labeled_roots.push_back(prev);
  }
  return path;
}

/// Labeled zeros of twist(P, lambda).
inline std::vector<Complex> twisted_roots(const ComplexPoly& p, Complex lambda, std::size_t steps = 32,
                                          std::optional<std::vector<Complex>> reference = std::nullopt) {
  return twisted_root_path(p, lambda, steps, std::move(reference)).labeled_roots.back();
}

struct Counter1Report {
  std::size_t n = 0;
  Complex lambda;
  std::vector<Complex> reference;  // z_k = exp(2 pi i k / n), k = 1..n
  std::vector<Complex> twisted;    // labeled zeros of twist(z^n - 1, lambda)
  std::vector<double> moduli;
  /// 1 + (n - 1)/2 Re(conj(z_k)^2 lambda^2).
  std::vector<double> predicted_moduli;
  std::size_t k1 = 0, k2 = 0;  // 1-based: modulus above 1, below 1
  bool forward_feasible = false;   // Z(P) < Z(TP)
  bool backward_feasible = false;  // Z(TP) < Z(P)
  Relation relation = Relation::Incomparable;
  /// max_k |2 w_k - 2 z_k - (n - 1) conj(z_k) lambda^2|.
  double root_expansion_residual = 0;
  /// max_k | |w_k| - predicted_k |.
  double modulus_expansion_residual = 0;
};

namespace detail {

inline Relation relation_from(bool fwd, bool bwd) {
  if (fwd && bwd) return Relation::Equal;
  if (fwd) return Relation::Less;
  if (bwd) return Relation::Greater;
  return Relation::Incomparable;
}

inline ComplexPoly unit_roots_poly(std::size_t n) {
  std::vector<Complex> c(n + 1, 0.0);
  c[0] = -1.0;
  c[n] = 1.0;
  return ComplexPoly(std::move(c));
}

inline std::vector<Complex> unit_roots(std::size_t n) {
  std::vector<Complex> z;
  for (std::size_t k = 1; k <= n; ++k)
    z.push_back(std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  return z;
}

/// Labeled zeros of twist(z^n - 1, lambda) and both expansion residuals.
inline Counter1Report counter1_core(std::size_t n, Complex lambda, std::size_t steps) {
  Counter1Report rep;
  rep.n = n;
  rep.lambda = lambda;
  rep.reference = unit_roots(n);
  rep.twisted = twisted_roots(unit_roots_poly(n), lambda, steps, rep.reference);
  const double nm1 = static_cast<double>(n - 1);
  const Complex l2 = lambda * lambda;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex z = rep.reference[k], w = rep.twisted[k];
    rep.moduli.push_back(std::abs(w));
    rep.predicted_moduli.push_back(1 + 0.5 * nm1 * (std::conj(z) * std::conj(z) * l2).real());
    rep.root_expansion_residual =
        std::max(rep.root_expansion_residual, std::abs(2.0 * w - 2.0 * z - nm1 * std::conj(z) * l2));
    rep.modulus_expansion_residual =
        std::max(rep.modulus_expansion_residual, std::abs(rep.moduli.back() - rep.predicted_moduli.back()));
  }
  return rep;
}

inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= static_cast<double>(x.size()), my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my), sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace detail

/// z^n - 1 against its twist by a small non-real lambda: finds one labeled
/// zero outside and one inside the unit circle and decides the spectral
/// relation by LP in both directions.
inline Counter1Report reproduce_prop_counter1(std::size_t n, Complex lambda, std::size_t steps = 32,
                                              double tol = 1e-9) {
  if (n < 5) throw ArgumentError("needs n >= 5");
  if (std::abs(lambda.imag()) <= 1e-12 * std::abs(lambda)) throw ArgumentError("lambda must be non-real");
  Counter1Report rep = detail::counter1_core(n, lambda, steps);
  const auto hi = std::max_element(rep.moduli.begin(), rep.moduli.end());
  const auto lo = std::min_element(rep.moduli.begin(), rep.moduli.end());
  if (!(*hi > 1 + tol) || !(*lo < 1 - tol))
    throw InconclusiveAtScale("no zeros on both sides of the unit circle at this |lambda|; try smaller");
  rep.k1 = static_cast<std::size_t>(hi - rep.moduli.begin()) + 1;
  rep.k2 = static_cast<std::size_t>(lo - rep.moduli.begin()) + 1;
  const auto xp = PointSet::from_complex(rep.reference);
  const auto xt = PointSet::from_complex(rep.twisted);
  rep.forward_feasible = ds_feasibility(xp, xt, tol).has_value();
  rep.backward_feasible = ds_feasibility(xt, xp, tol).has_value();
  rep.relation = detail::relation_from(rep.forward_feasible, rep.backward_feasible);
  return rep;
}

struct ExponentFit {
  std::vector<double> moduli;
  std::vector<double> root_residuals;
  std::vector<double> modulus_residuals;
  double root_exponent = 0;
  double modulus_exponent = 0;
};

/// Log-log slopes of the expansion residuals over |lambda| at fixed arg.
inline ExponentFit counter1_exponent_fit(std::size_t n, double arg, std::vector<double> moduli = {0.04, 0.02, 0.01},
                                         std::size_t steps = 32) {
  ExponentFit fit;
  fit.moduli = std::move(moduli);
  for (double r : fit.moduli) {
    const auto rep = detail::counter1_core(n, std::polar(r, arg), steps);
    fit.root_residuals.push_back(rep.root_expansion_residual);
    fit.modulus_residuals.push_back(rep.modulus_expansion_residual);
  }
  fit.root_exponent = detail::log_slope(fit.moduli, fit.root_residuals);
  fit.modulus_exponent = detail::log_slope(fit.moduli, fit.modulus_residuals);
  return fit;
}

struct Counter2Report {
  std::size_t n = 0;
  double theta = 0, r = 0;
  Complex lambda;
  bool axis_case = false;
  std::vector<double> base_roots;   // zeros of P
  std::vector<Complex> twisted;     // zeros of twist(P, lambda)
  // Off-axis branch.
  double a = 0;
  double f_plus = 0, f_minus = 0;              // F_{+a}, F_{-a}
  double predicted_plus = 0, predicted_minus = 0;  // n(n-1)(cos 2t +- a sin 2t) r^2
  bool sign_product_negative = false;
  bool probe_refutes_forward = false;   // some f shows Z(P) < Z(TP) fails
  bool probe_refutes_backward = false;  // some f shows Z(TP) < Z(P) fails
  // Axis branch.
  double top_real_part = 0;        // Re of the zero with largest real part
  double predicted_deviation = 0;  // (n - 1) r^2
  double deviation_relative_error = 0;
  double residual_at_minus_lambda = 0;  // |TP(-lambda)| / scale
  // Both.
  bool forward_feasible = false;
  bool backward_feasible = false;
  Relation relation = Relation::Incomparable;
};

namespace detail {

inline std::vector<double> random_strict_roots(std::size_t n, std::mt19937_64& rng, double half_width = 1.0) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  const double gap = half_width / static_cast<double>(2 * n);
  for (;;) {
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    std::sort(x.begin(), x.end());
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok = ok && x[i] - x[i - 1] >= gap;
    if (ok) return x;
  }
}

}  // namespace detail

/// A hyperbolic P and its twist by lambda = r e^{i theta}, theta off the real
/// axis, shown incomparable. Off the imaginary axis a random strictly
/// hyperbolic P is used with the probes (x + a y)^2 and (x - a y)^2; on it,
/// P = x^n - x^{n-1}.
inline Counter2Report reproduce_prop_counter2(std::size_t n, double theta, double r, std::uint64_t seed = 0,
                                              std::optional<double> a = std::nullopt, double tol = 1e-9) {
  if (n < 3) throw ArgumentError("needs n >= 3");
  if (!(r > 0)) throw ArgumentError("needs r > 0");
  const double s = std::sin(theta), c = std::cos(theta);
  if (std::abs(s) <= 1e-12) throw ArgumentError("theta gives a real lambda");
  Counter2Report rep;
  rep.n = n, rep.theta = theta, rep.r = r;
  rep.lambda = std::polar(r, theta);
  rep.axis_case = std::abs(c) <= 1e-12;
  const double nn = static_cast<double>(n);

  if (rep.axis_case) {
    rep.base_roots.assign(n - 1, 0.0);
    rep.base_roots.push_back(1.0);
  } else {
    std::mt19937_64 rng(seed);
    rep.base_roots = detail::random_strict_roots(n, rng);
  }
  const MonicPoly p = from_roots(rep.base_roots).poly();
  const ComplexPoly tp = twist(to_complex(p), rep.lambda);
  rep.twisted = complex_roots(tp).values();
  std::vector<Complex> zp(rep.base_roots.begin(), rep.base_roots.end());

  if (rep.axis_case) {
    double top = -std::numeric_limits<double>::infinity();
    for (auto w : rep.twisted) top = std::max(top, w.real());
    rep.top_real_part = top;
    rep.predicted_deviation = (nn - 1) * r * r;
    rep.deviation_relative_error = std::abs((1 - top) - rep.predicted_deviation) / rep.predicted_deviation;
    rep.residual_at_minus_lambda =
        std::abs(tp(-rep.lambda)) / std::max(1.0, detail::eval_scale(tp.coeffs(), -rep.lambda));
    if (!(top < 1)) throw InconclusiveAtScale("top real part not below 1 at this r; try smaller");
  } else {
    rep.a = a ? *a : 2 * std::abs(std::cos(2 * theta) / std::sin(2 * theta)) + 1;
    std::vector<ConvexFunction> probes{ConvexFunction::affine_square({1.0, rep.a}, 0.0),
                                       ConvexFunction::affine_square({1.0, -rep.a}, 0.0)};
    const auto xp = PointSet::from_complex(zp);
    const auto xt = PointSet::from_complex(rep.twisted);
    auto diff = [&](const ConvexFunction& f) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += f(xt.point(i)) - f(xp.point(i));
      return sum;
    };
    rep.f_plus = diff(probes[0]);
    rep.f_minus = diff(probes[1]);
    const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
    rep.predicted_plus = nn * (nn - 1) * (c2 + rep.a * s2) * r * r;
    rep.predicted_minus = nn * (nn - 1) * (c2 - rep.a * s2) * r * r;
    rep.sign_product_negative = rep.f_plus * rep.f_minus < 0;
    rep.probe_refutes_forward = convex_probe(xp, xt, probes, tol).refutes_less;
    rep.probe_refutes_backward = convex_probe(xt, xp, probes, tol).refutes_less;
    if (!rep.sign_product_negative) throw InconclusiveAtScale("F_a F_-a not negative at this r; try smaller");
  }

  const auto xp = PointSet::from_complex(zp);
  const auto xt = PointSet::from_complex(rep.twisted);
  rep.forward_feasible = ds_feasibility(xp, xt, tol).has_value();
  rep.backward_feasible = ds_feasibility(xt, xp, tol).has_value();
  rep.relation = detail::relation_from(rep.forward_feasible, rep.backward_feasible);
  if (rep.relation != Relation::Incomparable) throw InconclusiveAtScale("LP finds a relation at this r; try smaller");
  return rep;
}

using OperatorSampler = std::function<LPOperator(std::mt19937_64&)>;

/// 0 to 3 factors with alpha in [-1, 1] and a Gaussian with a in [0, 1].
inline LPOperator default_operator_sampler(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> alpha(-1.0, 1.0), ga(0.0, 1.0);
  LPOperator t;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) t.factors.push_back(alpha(rng));
  t.gaussian_a = ga(rng);
  return t;
}

struct ConjectureOptions {
  std::size_t trials = 10000;
  std::size_t deg_min = 2, deg_max = 8;
  std::uint64_t seed = 0;
  double box = 2.0;        // roots uniform in [-box, box]^2
  double min_dist = 1e-3;  // rejection threshold on pairwise distance
  double tol = 1e-9;
  OperatorSampler sampler = default_operator_sampler;
};

struct CounterexampleRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<Complex> roots;
  /// Coefficients of P as IEEE-754 bit patterns "re:im", ascending degree.
  std::vector<std::string> coeff_bits;
  std::string op;
  Relation re_relation = Relation::Incomparable;  // Re Z(P) vs Re Z(TP)
  Relation im_relation = Relation::Incomparable;  // Im Z(TP) vs Im Z(P)
};

struct ConjectureReport {
  std::size_t trials = 0, checked = 0, skipped = 0;
  /// Trials where the satisfied relation holds with equality.
  std::size_t equal_re = 0, equal_im = 0;
  std::vector<CounterexampleRecord> counterexamples;
  std::vector<std::string> skip_log;
};

inline std::string hex_bits(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

inline double from_hex_bits(const std::string& s) {
  if (s.size() != 16) throw ArgumentError("bit pattern needs 16 hex digits");
  std::size_t used = 0;
  const unsigned long long u = std::stoull(s, &used, 16);
  if (used != 16) throw ArgumentError("bad hex bit pattern");
  return std::bit_cast<double>(static_cast<std::uint64_t>(u));
}

/// Polynomial from a counterexample record's coefficient bits.
inline ComplexPoly replay_poly(const CounterexampleRecord& rec) {
  std::vector<Complex> c;
  for (const auto& s : rec.coeff_bits) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("coefficient bits need 're:im'");
    c.emplace_back(from_hex_bits(s.substr(0, colon)), from_hex_bits(s.substr(colon + 1)));
  }
  return ComplexPoly(std::move(c));
}

namespace detail {

struct TrialOutcome {
  enum class Kind { Checked, Skipped } kind = Kind::Checked;
  bool counterexample = false;
  bool equal_re = false, equal_im = false;
  CounterexampleRecord record;
  std::string skip_reason;
};

inline std::vector<Complex> sample_box_roots(std::size_t n, std::mt19937_64& rng, double box, double min_dist) {
  std::uniform_real_distribution<double> u(-box, box);
  for (;;) {
    std::vector<Complex> z;
    while (z.size() < n) {
      const Complex c(u(rng), u(rng));
      bool ok = true;
      for (auto w : z) ok = ok && std::abs(w - c) >= min_dist;
      if (ok) z.push_back(c);
    }
    return z;
  }
}

inline TrialOutcome conjecture_trial(const ConjectureOptions& opt, std::size_t index) {
  TrialOutcome out;
  const std::uint64_t seed = opt.seed + index;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> deg(opt.deg_min, opt.deg_max);
  const std::size_t n = deg(rng);
  const auto roots = sample_box_roots(n, rng, opt.box, opt.min_dist);
  const LPOperator t = opt.sampler(rng);
  if (!is_in_A_prime(t)) throw ArgumentError("operator sampler produced b != 0");
  const ComplexPoly p = ComplexPoly::from_roots(roots);
  std::vector<Complex> zp, zt;
  try {
    zp = complex_roots(p).values();
    zt = complex_roots(spectral_lab::apply(t, p)).values();
  } catch (const Error& e) {
    out.kind = TrialOutcome::Kind::Skipped;
    out.skip_reason = "trial " + std::to_string(index) + ": " + e.what();
    return out;
  }
  auto re = [](const std::vector<Complex>& z) {
    std::vector<double> v;
    for (auto w : z) v.push_back(w.real());
    return v;
  };
  auto im = [](const std::vector<Complex>& z) {
    std::vector<double> v;
    for (auto w : z) v.push_back(w.imag());
    return v;
  };
  const auto rrel = hlp_compare(re(zp), re(zt), opt.tol).relation;
  const auto irel = hlp_compare(im(zt), im(zp), opt.tol).relation;
  const bool ok_re = less_or_equal(rrel), ok_im = less_or_equal(irel);
  out.equal_re = ok_re && rrel == Relation::Equal;
  out.equal_im = !ok_re && ok_im && irel == Relation::Equal;
  if (!ok_re && !ok_im) {
    out.counterexample = true;
    out.record.trial = index;
    out.record.seed = seed;
    out.record.roots = roots;
    for (auto c : p.coeffs()) out.record.coeff_bits.push_back(hex_bits(c.real()) + ":" + hex_bits(c.imag()));
    out.record.op = t.to_string();
    out.record.re_relation = rrel;
    out.record.im_relation = irel;
  }
  return out;
}

}  // namespace detail

/// Random complex P and operators in A' with real parameters; logs every trial
/// where neither Re Z(P) < Re Z(TP) nor Im Z(TP) < Im Z(P) holds.
inline ConjectureReport conjecture_scan(const ConjectureOptions& opt = {}) {
  if (opt.deg_min < 1 || opt.deg_min > opt.deg_max) throw ArgumentError("bad degree range");
  std::vector<detail::TrialOutcome> outcomes(opt.trials);
  parallel_for(opt.trials, [&](std::size_t i) { outcomes[i] = detail::conjecture_trial(opt, i); });
  ConjectureReport rep;
  rep.trials = opt.trials;
  for (auto& o : outcomes) {
    if (o.kind == detail::TrialOutcome::Kind::Skipped) {
      ++rep.skipped;
      rep.skip_log.push_back(std::move(o.skip_reason));
      continue;
    }
    ++rep.checked;
    rep.equal_re += o.equal_re ? 1 : 0;
    rep.equal_im += o.equal_im ? 1 : 0;
    if (o.counterexample) rep.counterexamples.push_back(std::move(o.record));
  }
  return rep;
}

}  // namespace spectral_lab
