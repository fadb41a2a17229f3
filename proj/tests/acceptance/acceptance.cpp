// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>

#include "generators.hpp"
#include "json.hpp"
#include "spectral_lab/spectral_lab.hpp"

using namespace spectral_lab;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += "; over time limit";
  }
  if (!o.pass) ++failures;
  std::printf("AC%-2d %s  %s  (%s; %.2f s)\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> equal_sum_tuple(gen::Rng& rng, std::size_t n, double target) {
  std::vector<double> v(n);
  for (auto& x : v) x = gen::uniform(rng, -3, 3);
  const double shift = (target - std::accumulate(v.begin(), v.end(), 0.0)) / static_cast<double>(n);
  for (auto& x : v) x += shift;
  return v;
}

std::vector<double> averaged(gen::Rng& rng, const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> x(n, 0.0);
  double left = 1;
  for (int k = 0; k < 4; ++k) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double w = k == 3 ? left : left * gen::uniform(rng, 0, 1);
    left -= w;
    for (std::size_t i = 0; i < n; ++i) x[i] += w * y[perm[i]];
  }
  return x;
}

PencilBasis strict_pencil(gen::Rng& rng, std::size_t n) {
  const auto x = gen::spread_reals(rng, n, -2, 2, 0.2);
  return PencilBasis(gen::poly_from(x), gen::interlacing_q(rng, x));
}

// Worst zero-sum drift seen anywhere in the run, checked by criterion 10.
double zero_sum_drift = 0;

void track_zero_sum(double a, double b) { zero_sum_drift = std::max(zero_sum_drift, std::abs(a - b)); }

}  // namespace

int main() {
  criterion(1, "HLP and LP oracles agree on 1000 equal-sum pairs", 30, [] {
    gen::Rng rng(1001);
    int disagree = 0, less = 0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = gen::pick(rng, 1, 6);
      const auto y = equal_sum_tuple(rng, n, gen::uniform(rng, -2, 2));
      const auto x = t % 2 ? averaged(rng, y) : equal_sum_tuple(rng, n, std::accumulate(y.begin(), y.end(), 0.0));
      const bool h = less_or_equal(hlp_compare(x, y, 1e-7).relation);
      const bool lp = ds_feasibility(PointSet::from_reals(x), PointSet::from_reals(y), 1e-7).has_value();
      disagree += h != lp ? 1 : 0;
      less += h ? 1 : 0;
    }
    return Outcome{disagree == 0, std::to_string(disagree) + " disagreements, " + std::to_string(less) + " Less/Equal"};
  });

  criterion(2, "orbit verdicts are Less or Equal on 500 (P, T)", 60, [] {
    gen::Rng rng(1002);
    int bad = 0;
    for (int t = 0; t < 500; ++t) {
      const auto p = require_hyperbolic(gen::strict_hyperbolic(rng, gen::pick(rng, 2, 8)));
      const auto op = gen::a_prime_operator(rng, 3, 1.0);
      bad += less_or_equal(verify_orbit(p, op).relation) ? 0 : 1;
      track_zero_sum(zero_sum(spectral_lab::apply(op, p.poly())), zero_sum(p.poly()));
    }
    return Outcome{bad == 0, std::to_string(500 - bad) + "/500 Less or Equal"};
  });

  criterion(3, "max root is convex along 200 hyperbolic pencils", 0, [] {
    gen::Rng rng(1003);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 200; ++t) {
      const auto b = strict_pencil(rng, gen::pick(rng, 1, 8));
      const double lmax = 1 + span(require_hyperbolic(b.p()));
      const auto r = garding_scan(b, detail::uniform_grid(-lmax, lmax, 41));
      worst = std::min(worst, r.min_second_difference);
    }
    return Outcome{worst >= -1e-7, "min second difference " + fmt("%.3g", worst)};
  });

  criterion(4, "root derivative closed forms and the sensitivity identity", 0, [] {
    gen::Rng rng(1004);
    double worst_d = 0;
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = gen::pick(rng, 2, 8);
      const auto b = strict_pencil(rng, n);
      const double lam = gen::uniform(rng, -1, 1);
      const std::size_t i = gen::pick(rng, 0, n - 1);
      auto x = [&](double l) { return require_hyperbolic(b.member(l)).roots()[i]; };
      const double h = 1e-5;
      const double fd1 = (x(lam + h) - x(lam - h)) / (2 * h);
      auto d2 = [&](double s) { return (x(lam + s) - 2 * x(lam) + x(lam - s)) / (s * s); };
      const double fd2 = (4 * d2(1e-3) - d2(2e-3)) / 3;
      const double v = root_velocity(b, lam, i), a = root_acceleration(b, lam, i);
      worst_d = std::max({worst_d, std::abs(v - fd1) / (1 + std::abs(v)), std::abs(a - fd2) / (1 + std::abs(a))});
    }
    double worst_s = 0;
    bool positive = true;
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = gen::pick(rng, 2, 6);
      const auto x = gen::spread_reals(rng, n, -2, 2, 0.2);
      double lam = gen::uniform(rng, -1, 1);
      if (std::abs(lam) < 0.1) lam = lam < 0 ? -0.1 : 0.1;
      const auto c = root_sensitivity(x, lam, gen::pick(rng, 0, n - 1), gen::pick(rng, 0, n - 1));
      worst_s = std::max(worst_s, c.relative_error);
      positive = positive && c.lhs > 0 && c.rhs > 0;
    }
    return Outcome{worst_d <= 1e-6 && worst_s <= 1e-5 && positive,
                   "derivative error " + fmt("%.2g", worst_d) + ", identity error " + fmt("%.2g", worst_s)};
  });

  criterion(5, "span minimum at 0 and monotone wings on 100 LD pencils", 0, [] {
    gen::Rng rng(1005);
    int bad_argmin = 0, bad_pairs = 0, pairs = 0;
    for (int t = 0; t < 100; ++t) {
      const auto p = gen::strict_hyperbolic(rng, gen::pick(rng, 2, 8));
      const auto grid = detail::uniform_grid(-2, 2, 41);
      const auto r = span_scan(ld_basis(p), grid);
      bad_argmin += std::abs(r.argmin) <= grid[1] - grid[0] ? 0 : 1;
      for (std::size_t i = 0; i < r.lambdas.size(); ++i)
        for (std::size_t j = 0; j < r.lambdas.size(); ++j) {
          const double l1 = r.lambdas[i], l2 = r.lambdas[j];
          if (l1 * l2 < 0 || std::abs(l1) > std::abs(l2)) continue;
          ++pairs;
          bad_pairs += r.span_values[i] <= r.span_values[j] + 1e-12 ? 0 : 1;
        }
    }
    return Outcome{bad_argmin == 0 && bad_pairs == 0, std::to_string(bad_argmin) + " misplaced minima, " +
                                                          std::to_string(bad_pairs) + "/" + std::to_string(pairs) +
                                                          " wing pairs violated"};
  });

  criterion(6, "local minimality holds exactly for LD pencils (sampled)", 0, [] {
    gen::Rng rng(1006);
    int ld_miss = 0, non_ld_miss = 0, shifts = 0;
    for (int t = 0; t < 50; ++t) {
      const auto p = gen::strict_hyperbolic(rng, gen::pick(rng, 2, 8));
      const auto b = ld_basis(p);
      ld_miss += local_min_scan(b, 0).local_min ? 0 : 1;
      track_zero_sum(zero_sum(shift_family(b, 0.3)), zero_sum(p));
    }
    for (int t = 0; t < 50;) {
      // Every normalized quadratic pencil is LD, so non-LD bases start at degree 3.
      const auto b = strict_pencil(rng, gen::pick(rng, 3, 8));
      if (ld_detect(b)) continue;
      ++t;
      for (double l0 : {-0.5, 0.0, 0.5}) {
        ++shifts;
        non_ld_miss += local_min_scan(b, l0).local_min ? 1 : 0;
        track_zero_sum(zero_sum(shift_family(b, l0)), zero_sum(b.p()));
      }
    }
    return Outcome{ld_miss == 0 && non_ld_miss == 0, std::to_string(ld_miss) + "/50 LD without LocalMin, " +
                                                         std::to_string(non_ld_miss) + "/" + std::to_string(shifts) +
                                                         " non-LD shifts without witness"};
  });

  criterion(7, "z^5 - 1 against its twist at 0.05 e^{i pi/7}", 5, [] {
    const auto rep = reproduce_prop_counter1(5, std::polar(0.05, pi / 7));
    const auto fit = counter1_exponent_fit(5, pi / 7);
    const bool ok = rep.k1 > 0 && rep.k2 > 0 && !rep.forward_feasible && !rep.backward_feasible &&
                    fit.modulus_exponent >= 2.8;
    return Outcome{ok, "k1=" + std::to_string(rep.k1) + " |w|=" + fmt("%.6f", rep.moduli[rep.k1 - 1]) +
                           ", k2=" + std::to_string(rep.k2) + " |w|=" + fmt("%.6f", rep.moduli[rep.k2 - 1]) +
                           ", LP both infeasible=" + (!rep.forward_feasible && !rep.backward_feasible ? "yes" : "no") +
                           ", modulus exponent " + fmt("%.3f", fit.modulus_exponent)};
  });

  criterion(8, "rotated-parameter incomparability, axis and generic cases", 0, [] {
    const auto axis = reproduce_prop_counter2(3, pi / 2, 0.05);
    const auto gen = reproduce_prop_counter2(4, pi / 3, 0.02);
    const bool ok = axis.top_real_part < 1 && axis.deviation_relative_error <= 0.2 && gen.f_plus * gen.f_minus < 0;
    return Outcome{ok, "Re z=" + fmt("%.6f", axis.top_real_part) + " deviation error " +
                           fmt("%.3g", axis.deviation_relative_error) + ", F_a F_-a=" +
                           fmt("%.3g", gen.f_plus * gen.f_minus)};
  });

  criterion(9, "conjecture scan, 10000 seeded trials", 600, [] {
    ConjectureOptions opt;
    opt.trials = 10000;
    opt.deg_min = 2, opt.deg_max = 8;
    opt.seed = 0;
    const auto rep = conjecture_scan(opt);
    nlohmann::json ce = nlohmann::json::array();
    bool replay_ok = true;
    for (const auto& c : rep.counterexamples) {
      replay_ok = replay_ok && replay_poly(c) == ComplexPoly::from_roots(c.roots);
      ce.push_back({{"trial", c.trial}, {"seed", c.seed}, {"coeff_bits", c.coeff_bits}, {"operator", c.op}});
    }
    std::ofstream("acceptance_counterexamples.json") << nlohmann::json{{"counterexamples", ce}}.dump(2) << "\n";
    return Outcome{replay_ok, std::to_string(rep.counterexamples.size()) + " counterexamples, " +
                                  std::to_string(rep.checked) + " checked, " + std::to_string(rep.skipped) +
                                  " skipped, records in acceptance_counterexamples.json"};
  });

  criterion(10, "zero-sum conservation and commutativity", 0, [] {
    gen::Rng rng(1010);
    int noncommuting = 0;
    for (int t = 0; t < 200; ++t) {
      const auto p = gen::strict_hyperbolic(rng, gen::pick(rng, 1, 8));
      auto t1 = gen::a_prime_operator(rng), t2 = gen::a_prime_operator(rng);
      t1.shift_b = gen::uniform(rng, -1, 1);
      noncommuting += commutativity_check(t1, t2, p) ? 0 : 1;
      track_zero_sum(zero_sum(spectral_lab::apply(t2, p)), zero_sum(p));
      const auto b = strict_pencil(rng, p.degree());
      track_zero_sum(zero_sum(shift_family(b, gen::uniform(rng, -2, 2))), zero_sum(b.p()));
    }
    return Outcome{zero_sum_drift <= 1e-12 && noncommuting == 0,
                   "max zero-sum drift " + fmt("%.2g", zero_sum_drift) + ", " + std::to_string(noncommuting) +
                       "/200 pairs not commuting"};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
