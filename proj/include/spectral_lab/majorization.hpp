#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "spectral_lab/errors.hpp"
#include "spectral_lab/roots.hpp"

namespace spectral_lab {

enum class Relation { Less, Greater, Equal, Incomparable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "Less";
    case Relation::Greater: return "Greater";
    case Relation::Equal: return "Equal";
    case Relation::Incomparable: return "Incomparable";
  }
  return "?";
}

inline bool less_or_equal(Relation r) { return r == Relation::Less || r == Relation::Equal; }

/// n points in R^dim, row-major.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), c_(std::move(coords)) {
    if (dim_ == 0 || c_.size() % dim_ != 0) throw ShapeError("coordinate count not a multiple of dimension");
  }

  static PointSet from_reals(std::span<const double> v) { return PointSet(1, {v.begin(), v.end()}); }
  static PointSet from_complex(std::span<const std::complex<double>> z) {
    std::vector<double> c;
    for (auto v : z) c.push_back(v.real()), c.push_back(v.imag());
    return PointSet(2, std::move(c));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return c_.size() / dim_; }
  double operator()(std::size_t i, std::size_t k) const { return c_[i * dim_ + k]; }
  std::span<const double> point(std::size_t i) const { return {c_.data() + i * dim_, dim_}; }
  const std::vector<double>& coords() const { return c_; }

 private:
  std::size_t dim_;
  std::vector<double> c_;
};

/// n x n matrix with nonnegative entries and unit row and column sums.
class DoublyStochasticMatrix {
 public:
  DoublyStochasticMatrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n) throw ShapeError("doubly stochastic matrix needs n*n entries");
  }

  static DoublyStochasticMatrix identity(std::size_t n) {
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1;
    return {n, std::move(a)};
  }

  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const { return a_; }

  /// Entries >= -tol and all row and column sums within tol of 1.
  bool is_valid(double tol) const {
    for (double v : a_)
      if (v < -tol) return false;
    for (std::size_t i = 0; i < n_; ++i) {
      double r = 0, c = 0;
      for (std::size_t j = 0; j < n_; ++j) r += a_[i * n_ + j], c += a_[j * n_ + i];
      if (std::abs(r - 1) > tol || std::abs(c - 1) > tol) return false;
    }
    return true;
  }

  /// max_{i,k} |(A Y)_{ik} - X_{ik}|.
  double transport_residual(const PointSet& x, const PointSet& y) const {
    double worst = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < x.dim(); ++k) {
        double s = 0;
        for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * y(j, k);
        worst = std::max(worst, std::abs(s - x(i, k)));
      }
    return worst;
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

struct ViolatedConstraint {
  enum class Kind { SumMismatch, PartialSum, LpInfeasible };
  Kind kind;
  /// For PartialSum: k such that the top-k partial sum fails (1-based).
  std::size_t index = 0;
  /// Size of the violation (sum gap, partial-sum deficit, or phase-1 objective).
  double amount = 0;
};

inline const char* to_string(ViolatedConstraint::Kind k) {
  switch (k) {
    case ViolatedConstraint::Kind::SumMismatch: return "SumMismatch";
    case ViolatedConstraint::Kind::PartialSum: return "PartialSum";
    case ViolatedConstraint::Kind::LpInfeasible: return "LpInfeasible";
  }
  return "?";
}

struct MajorizationVerdict {
  Relation relation = Relation::Incomparable;
  /// HLP witness: top-k partial sums of the larger tuple minus those of the
  /// smaller one, k = 1..n-1, so every entry is >= -tol for Less/Greater.
  std::optional<std::vector<double>> partial_sum_slack;
  /// LP witness: A with smaller = A * larger.
  std::optional<DoublyStochasticMatrix> transport;
  /// Incomparable: why X < Y fails, and why Y < X fails.
  std::optional<ViolatedConstraint> forward_violation;
  std::optional<ViolatedConstraint> backward_violation;
};

namespace detail {

inline double tuple_scale(std::span<const double> x, std::span<const double> y) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  for (double v : y) m = std::max(m, std::abs(v));
  return 1 + m;
}

}  // namespace detail

/// Classical majorization via top-k partial sums. Tolerances are scaled by
/// 1 + max|component|.
inline MajorizationVerdict hlp_compare(std::span<const double> x, std::span<const double> y, double tol = 1e-9) {
  if (x.size() != y.size()) throw ShapeError("majorization needs tuples of equal size");
  if (x.empty()) throw ShapeError("majorization needs nonempty tuples");
  const std::size_t n = x.size();
  const double scale = detail::tuple_scale(x, y);
  const double t = tol * scale;

  MajorizationVerdict v;
  const double sx = std::accumulate(x.begin(), x.end(), 0.0);
  const double sy = std::accumulate(y.begin(), y.end(), 0.0);
  if (std::abs(sx - sy) > t) {
    v.relation = Relation::Incomparable;
    v.forward_violation = ViolatedConstraint{ViolatedConstraint::Kind::SumMismatch, 0, std::abs(sx - sy)};
    v.backward_violation = v.forward_violation;
    return v;
  }

  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  std::vector<double> slack(n - 1);
  double px = 0, py = 0;
  bool fwd = true, bwd = true;
  std::optional<ViolatedConstraint> fv, bv;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    px += xs[k];
    py += ys[k];
    slack[k] = py - px;
    if (slack[k] < -t && fwd) fwd = false, fv = ViolatedConstraint{ViolatedConstraint::Kind::PartialSum, k + 1, -slack[k]};
    if (slack[k] > t && bwd) bwd = false, bv = ViolatedConstraint{ViolatedConstraint::Kind::PartialSum, k + 1, slack[k]};
  }

  if (multiset_equal(x, y) || (fwd && bwd)) {
    v.relation = Relation::Equal;
    v.partial_sum_slack = std::move(slack);
  } else if (fwd) {
    v.relation = Relation::Less;
    v.partial_sum_slack = std::move(slack);
  } else if (bwd) {
    v.relation = Relation::Greater;
    for (auto& s : slack) s = -s;
    v.partial_sum_slack = std::move(slack);
  } else {
    v.relation = Relation::Incomparable;
    v.forward_violation = fv;
    v.backward_violation = bv;
  }
  return v;
}

inline MajorizationVerdict hlp_compare(const RootTuple& x, const RootTuple& y, double tol = 1e-9) {
  return hlp_compare(std::span<const double>(x.values()), std::span<const double>(y.values()), tol);
}

namespace detail {

struct PhaseOneResult {
  double infeasibility;    // sum of artificial variables at the optimum
  std::vector<double> x;   // structural variables
};

/// Phase-1 simplex for {A x = b, x >= 0} with Bland's rule. A is m x N,
/// row-major. `reverse` scans entering candidates from the last column,
/// which walks a different vertex path.
inline PhaseOneResult phase_one(const std::vector<double>& a, const std::vector<double>& b, std::size_t m,
                                std::size_t nvars, bool reverse, std::size_t max_pivots) {
  const std::size_t cols = nvars + m + 1;
  const std::size_t rhs = cols - 1;
  std::vector<double> t((m + 1) * cols, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return t[i * cols + j]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double sgn = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nvars; ++j) at(i, j) = sgn * a[i * nvars + j];
    at(i, nvars + i) = 1;
    at(i, rhs) = sgn * b[i];
    basis[i] = nvars + i;
  }
  for (std::size_t j = 0; j < nvars; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += at(i, j);
    at(m, j) = -s;
  }
  {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += at(i, rhs);
    at(m, rhs) = -s;
  }

  constexpr double cost_eps = 1e-11, piv_eps = 1e-11;
  auto rank = [&](std::size_t j) { return reverse ? rhs - 1 - j : j; };
  std::size_t pivots = 0;
  for (;;) {
    std::size_t enter = cols;
    for (std::size_t jj = 0; jj < rhs; ++jj) {
      const std::size_t j = reverse ? rhs - 1 - jj : jj;
      if (at(m, j) < -cost_eps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double p = at(i, enter);
      if (p <= piv_eps) continue;
      const double ratio = at(i, rhs) / p;
      if (leave == m || ratio < best - 1e-14 || (ratio <= best + 1e-14 && rank(basis[i]) < rank(basis[leave]))) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for phase 1
    if (++pivots > max_pivots) throw SolverError("simplex pivot limit exceeded");
    const double p = at(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) at(leave, j) /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = at(i, enter);
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) at(i, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
  }

  PhaseOneResult r{-at(m, rhs), std::vector<double>(nvars, 0.0)};
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < nvars) r.x[basis[i]] = at(i, rhs);
  if (r.infeasibility < 0) r.infeasibility = 0;
  return r;
}

}  // namespace detail

struct LpOptions {
  /// Declared infeasible only if a second solve also leaves residual above this.
  double hysteresis_band = 1e-6;
  std::size_t max_pivots = 0;  // 0: 50 * (rows + columns)
};

/// Searches a doubly stochastic A with X = A Y (n points in R^k, any order).
/// Data are centered on the barycenter of Y and scaled to unit size first; the
/// phase-1 residual is then compared against tol.
inline std::optional<DoublyStochasticMatrix> ds_feasibility(const PointSet& x, const PointSet& y, double tol = 1e-9,
                                                            const LpOptions& opt = {}) {
  if (x.size() != y.size() || x.dim() != y.dim()) throw ShapeError("point sets differ in size or dimension");
  const std::size_t n = x.size(), k = x.dim();
  if (n == 0) throw ShapeError("empty point sets");

  std::vector<double> center(k, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < k; ++c) center[c] += y(j, c) / static_cast<double>(n);
  double scale = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < k; ++c)
      scale = std::max({scale, std::abs(y(j, c) - center[c]), std::abs(x(j, c) - center[c])});
  // Floor at 1 + |barycenter| so tol means what it means in hlp_compare.
  for (double c : center) scale = std::max(scale, 1 + std::abs(c));

  const std::size_t nvars = n * n, m = 2 * n + n * k;
  std::vector<double> a(m * nvars, 0.0), b(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      a[i * nvars + i * n + j] = 1;          // row sums
      a[(n + j) * nvars + i * n + j] = 1;    // column sums
    }
  for (std::size_t i = 0; i < 2 * n; ++i) b[i] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t row = 2 * n + i * k + c;
      for (std::size_t j = 0; j < n; ++j) a[row * nvars + i * n + j] = (y(j, c) - center[c]) / scale;
      b[row] = (x(i, c) - center[c]) / scale;
    }

  const std::size_t max_pivots = opt.max_pivots ? opt.max_pivots : 50 * (m + nvars);
  auto res = detail::phase_one(a, b, m, nvars, false, max_pivots);
  if (res.infeasibility > tol && res.infeasibility < opt.hysteresis_band) {
    auto again = detail::phase_one(a, b, m, nvars, true, max_pivots);
    if (again.infeasibility < res.infeasibility) res = std::move(again);
  }
  if (res.infeasibility > tol) return std::nullopt;
  return DoublyStochasticMatrix(n, std::move(res.x));
}

inline MajorizationVerdict spectral_compare(const HyperbolicPoly& p, const HyperbolicPoly& q, double tol = 1e-9) {
  if (p.degree() != q.degree()) throw ShapeError("spectral comparison needs equal degrees");
  return hlp_compare(p.roots(), q.roots(), tol);
}

/// Spectral order on root sets viewed as points of R^2, decided by LP.
inline MajorizationVerdict complex_spectral_compare(const ComplexRootTuple& zp, const ComplexRootTuple& zq,
                                                    double tol = 1e-9) {
  if (zp.size() != zq.size()) throw ShapeError("spectral comparison needs equal degrees");
  MajorizationVerdict v;
  if (multiset_equal(zp, zq)) {
    v.relation = Relation::Equal;
    v.transport = DoublyStochasticMatrix::identity(zp.size());
    return v;
  }
  const auto xp = PointSet::from_complex(zp.values());
  const auto xq = PointSet::from_complex(zq.values());
  auto fwd = ds_feasibility(xp, xq, tol);
  auto bwd = ds_feasibility(xq, xp, tol);
  if (fwd && bwd) {
    v.relation = Relation::Equal;
    v.transport = std::move(fwd);
  } else if (fwd) {
    v.relation = Relation::Less;
    v.transport = std::move(fwd);
  } else if (bwd) {
    v.relation = Relation::Greater;
    v.transport = std::move(bwd);
  } else {
    v.relation = Relation::Incomparable;
    v.forward_violation = ViolatedConstraint{ViolatedConstraint::Kind::LpInfeasible, 0, 0};
    v.backward_violation = ViolatedConstraint{ViolatedConstraint::Kind::LpInfeasible, 0, 0};
  }
  return v;
}

inline MajorizationVerdict complex_spectral_compare(const ComplexPoly& p, const ComplexPoly& q, double tol = 1e-9) {
  if (p.degree() != q.degree()) throw ShapeError("spectral comparison needs equal degrees");
  return complex_spectral_compare(complex_roots(p), complex_roots(q), tol);
}

/// A convex function on R^k from a small parametric family.
struct ConvexFunction {
  enum class Kind {
    AffineSquare,  // (<c, x> + d)^2
    AffineExp,     // exp(<c, x> + d)
    MaxAffine,     // max_j (<c_j, x> + d_j)
  };
  Kind kind;
  std::size_t dim;
  std::vector<double> c;  // pieces * dim
  std::vector<double> d;  // pieces

  double operator()(std::span<const double> x) const {
    auto affine = [&](std::size_t piece) {
      double s = d[piece];
      for (std::size_t i = 0; i < dim; ++i) s += c[piece * dim + i] * x[i];
      return s;
    };
    switch (kind) {
      case Kind::AffineSquare: {
        const double s = affine(0);
        return s * s;
      }
      case Kind::AffineExp: return std::exp(affine(0));
      case Kind::MaxAffine: {
        double m = affine(0);
        for (std::size_t p = 1; p < d.size(); ++p) m = std::max(m, affine(p));
        return m;
      }
    }
    return 0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(6);
    auto lin = [&](std::size_t piece) {
      std::ostringstream l;
      l.precision(6);
      for (std::size_t i = 0; i < dim; ++i) l << c[piece * dim + i] << "*x" << i << " + ";
      l << d[piece];
      return l.str();
    };
    switch (kind) {
      case Kind::AffineSquare: os << "(" << lin(0) << ")^2"; break;
      case Kind::AffineExp: os << "exp(" << lin(0) << ")"; break;
      case Kind::MaxAffine:
        os << "max(";
        for (std::size_t p = 0; p < d.size(); ++p) os << (p ? ", " : "") << lin(p);
        os << ")";
        break;
    }
    return os.str();
  }

  static ConvexFunction affine_square(std::vector<double> c, double d) {
    const std::size_t k = c.size();
    return {Kind::AffineSquare, k, std::move(c), {d}};
  }
};

/// Deterministic probe family. The first `dim` members are the coordinate
/// squares; the rest cycle through affine squares, exponentials and
/// three-piece max-affine functions with seeded parameters sized to `scale`.
inline std::vector<ConvexFunction> convex_family(std::size_t dim, std::size_t family_size, std::uint64_t seed,
                                                 double scale = 1.0) {
  std::vector<ConvexFunction> fam;
  for (std::size_t i = 0; i < dim && fam.size() < family_size; ++i) {
    std::vector<double> c(dim, 0.0);
    c[i] = 1;
    fam.push_back(ConvexFunction::affine_square(std::move(c), 0.0));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto direction = [&] {
    std::vector<double> c(dim);
    double nrm = 0;
    for (auto& v : c) v = normal(rng), nrm += v * v;
    nrm = std::sqrt(nrm);
    for (auto& v : c) v /= (nrm > 0 ? nrm : 1);
    return c;
  };
  for (std::size_t idx = 0; fam.size() < family_size; ++idx) {
    switch (idx % 3) {
      case 0: fam.push_back(ConvexFunction::affine_square(direction(), unif(rng) * scale)); break;
      case 1: {
        auto c = direction();
        for (auto& v : c) v *= 2.0 / scale;
        fam.push_back({ConvexFunction::Kind::AffineExp, dim, std::move(c), {0.0}});
        break;
      }
      default: {
        std::vector<double> c, d;
        for (int p = 0; p < 3; ++p) {
          auto cp = direction();
          c.insert(c.end(), cp.begin(), cp.end());
          d.push_back(unif(rng) * scale);
        }
        fam.push_back({ConvexFunction::Kind::MaxAffine, dim, std::move(c), std::move(d)});
      }
    }
  }
  return fam;
}

struct ProbeResult {
  /// True when some f has sum f(X) > sum f(Y): X < Y is then impossible.
  bool refutes_less = false;
  std::optional<ConvexFunction> witness;
  /// sum f(X) - sum f(Y) for the witness.
  double excess = 0;
};

/// Necessary-condition check for X < Y over an explicit list of convex functions.
inline ProbeResult convex_probe(const PointSet& x, const PointSet& y, std::span<const ConvexFunction> family,
                                double tol = 1e-9) {
  if (x.size() != y.size() || x.dim() != y.dim()) throw ShapeError("point sets differ in size or dimension");
  for (const auto& f : family) {
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += f(x.point(i)), sy += f(y.point(i));
    if (sx - sy > tol * (1 + std::abs(sx) + std::abs(sy))) return {true, f, sx - sy};
  }
  return {};
}

inline ProbeResult convex_probe(const PointSet& x, const PointSet& y, std::size_t family_size = 64,
                                std::uint64_t seed = 0, double tol = 1e-9) {
  double scale = 1e-12;
  for (double v : x.coords()) scale = std::max(scale, std::abs(v));
  for (double v : y.coords()) scale = std::max(scale, std::abs(v));
  const auto fam = convex_family(x.dim(), family_size, seed, scale);
  return convex_probe(x, y, fam, tol);
}

}  // namespace spectral_lab
