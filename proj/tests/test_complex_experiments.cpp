#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "generators.hpp"
#include "spectral_lab/complex_experiments.hpp"
#include "spectral_lab/pencils.hpp"

using namespace spectral_lab;
using std::numbers::pi;

namespace {

ComplexPoly random_complex_poly(gen::Rng& rng, std::size_t n) {
  std::mt19937_64 r(rng());
  return ComplexPoly::from_roots(detail::sample_box_roots(n, r, 2.0, 0.2));
}

double max_dist(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(Twist, MatchesFactorOperator) {
  const ComplexPoly p({Complex(0.5, -1), Complex(2, 0), Complex(0, 1), 1.0});
  const Complex mu(0.3, 0.2);
  const auto t = twist(p, mu);
  // Direct expansion of P(x + mu) - mu P'(x + mu) at a few points.
  for (Complex x : {Complex(0, 0), Complex(1, -1), Complex(-0.4, 2)}) {
    const Complex direct = p(x + mu) - mu * p.poly().derivative()(x + mu);
    EXPECT_LT(std::abs(t(x) - direct), 1e-12);
  }
}

TEST(TwistedRoots, ZeroLambdaIsIdentity) {
  const auto z = detail::unit_roots(5);
  const auto w = twisted_roots(detail::unit_roots_poly(5), 0.0, 4, z);
  EXPECT_LT(max_dist(w, z), 1e-14);
}

TEST(TwistedRoots, UnitRootExpansion) {
  const std::size_t n = 5;
  const auto z = detail::unit_roots(n);
  for (double r : {0.04, 0.02}) {
    const Complex lam = std::polar(r, pi / 7);
    const auto w = twisted_roots(detail::unit_roots_poly(n), lam, 32, z);
    for (std::size_t k = 0; k < n; ++k) {
      // Twisted zeros are z_k(lambda) - lambda.
      const Complex pred = 2.0 * z[k] + static_cast<double>(n - 1) * std::conj(z[k]) * lam * lam;
      EXPECT_LT(std::abs(2.0 * w[k] - pred), 40 * r * r * r) << "r " << r << " k " << k;
    }
  }
}

TEST(TwistedRoots, RepeatedZerosAreAmbiguous) {
  const ComplexPoly p({1.0, -2.0, 1.0});
  EXPECT_THROW(twisted_roots(p, Complex(0.1, 0.1)), LabelingAmbiguous);
}

TEST(TwistedRoots, ReferenceShapeChecked) {
  EXPECT_THROW(twisted_roots(detail::unit_roots_poly(5), 0.01, 4, std::vector<Complex>{1.0}), ShapeError);
}

TEST(Counter1, DefaultInstance) {
  const auto rep = reproduce_prop_counter1(5, std::polar(0.05, pi / 7));
  ASSERT_GE(rep.k1, 1u);
  ASSERT_GE(rep.k2, 1u);
  EXPECT_GT(rep.moduli[rep.k1 - 1], 1);
  EXPECT_LT(rep.moduli[rep.k2 - 1], 1);
  EXPECT_FALSE(rep.forward_feasible);
  EXPECT_FALSE(rep.backward_feasible);
  EXPECT_EQ(rep.relation, Relation::Incomparable);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(rep.moduli[k], rep.predicted_moduli[k], 1e-3);
}

TEST(Counter1, Preconditions) {
  EXPECT_THROW(reproduce_prop_counter1(4, std::polar(0.05, pi / 7)), ArgumentError);
  EXPECT_THROW(reproduce_prop_counter1(5, 0.05), ArgumentError);
}

TEST(Counter1, ReproducesForSeveralDegrees) {
  for (std::size_t n : {5u, 6u, 7u}) {
    const auto rep = reproduce_prop_counter1(n, std::polar(0.05, pi / 7));
    EXPECT_EQ(rep.relation, Relation::Incomparable) << n;
  }
}

TEST(Counter1, ExpansionExponents) {
  const auto fit = counter1_exponent_fit(5, pi / 7);
  EXPECT_GE(fit.root_exponent, 2.8);
  EXPECT_GE(fit.modulus_exponent, 2.8);
  for (std::size_t i = 1; i < fit.moduli.size(); ++i) EXPECT_LT(fit.modulus_residuals[i], fit.modulus_residuals[i - 1]);
}

TEST(Counter2, AxisCase) {
  const auto rep = reproduce_prop_counter2(3, pi / 2, 0.05);
  EXPECT_TRUE(rep.axis_case);
  EXPECT_LT(rep.top_real_part, 1);
  EXPECT_NEAR(1 - rep.top_real_part, 2 * 0.05 * 0.05, 0.2 * 2 * 0.05 * 0.05);
  EXPECT_LT(rep.residual_at_minus_lambda, 1e-12);
  EXPECT_EQ(rep.relation, Relation::Incomparable);
}

TEST(Counter2, GenericCase) {
  const auto rep = reproduce_prop_counter2(4, pi / 3, 0.02);
  EXPECT_FALSE(rep.axis_case);
  EXPECT_NEAR(rep.a, 2 * std::abs(std::cos(2 * pi / 3) / std::sin(2 * pi / 3)) + 1, 1e-12);
  EXPECT_LT(rep.f_plus * rep.f_minus, 0);
  EXPECT_TRUE(rep.probe_refutes_forward);
  EXPECT_TRUE(rep.probe_refutes_backward);
  EXPECT_NEAR(rep.f_plus, rep.predicted_plus, 0.2 * std::abs(rep.predicted_plus));
  EXPECT_NEAR(rep.f_minus, rep.predicted_minus, 0.2 * std::abs(rep.predicted_minus));
  EXPECT_EQ(rep.relation, Relation::Incomparable);
}

TEST(Counter2, Preconditions) {
  EXPECT_THROW(reproduce_prop_counter2(3, pi, 0.05), ArgumentError);
  EXPECT_THROW(reproduce_prop_counter2(2, pi / 3, 0.05), ArgumentError);
  EXPECT_THROW(reproduce_prop_counter2(3, pi / 3, 0), ArgumentError);
}

TEST(Counter2, ReproducesForSeveralDegrees) {
  for (std::size_t n : {3u, 4u, 5u}) {
    EXPECT_EQ(reproduce_prop_counter2(n, pi / 2, 0.02).relation, Relation::Incomparable) << n;
    EXPECT_EQ(reproduce_prop_counter2(n, pi / 3, 0.02, n).relation, Relation::Incomparable) << n;
  }
}

TEST(HexBits, RoundTrip) {
  for (double v : {0.0, -0.0, 1.0, -2.5e-300, 3.141592653589793, 1e308}) {
    const double back = from_hex_bits(hex_bits(v));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(v));
  }
  EXPECT_THROW(from_hex_bits("123"), ArgumentError);
  EXPECT_THROW(from_hex_bits("zzzzzzzzzzzzzzzz"), std::exception);
}

TEST(Replay, RecordRebuildsPolynomial) {
  const ComplexPoly p({Complex(0.1, -0.7), Complex(1.0 / 3, 2), 1.0});
  CounterexampleRecord rec;
  for (auto c : p.coeffs()) rec.coeff_bits.push_back(hex_bits(c.real()) + ":" + hex_bits(c.imag()));
  EXPECT_EQ(replay_poly(rec), p);
  rec.coeff_bits[0] = "00";
  EXPECT_THROW(replay_poly(rec), ArgumentError);
}

TEST(ConjectureScan, HyperbolicInputsSatisfyFirstRelation) {
  // Real inputs reduce to the orbit statement, so Re Z(P) < Re Z(TP) must hold.
  gen::Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto x = gen::spread_reals(rng, gen::pick(rng, 2, 6), -2, 2, 0.1);
    const auto op = gen::a_prime_operator(rng);
    const auto p = gen::poly_from(x);
    const auto zt = require_hyperbolic(spectral_lab::apply(op, p)).roots();
    EXPECT_TRUE(less_or_equal(hlp_compare(x, zt.values()).relation)) << "trial " << t;
  }
}

TEST(ConjectureScan, SmallRunIsDeterministic) {
  ConjectureOptions opt;
  opt.trials = 300;
  opt.seed = 42;
  const auto a = conjecture_scan(opt);
  EXPECT_EQ(a.trials, 300u);
  EXPECT_EQ(a.checked + a.skipped, 300u);
  EXPECT_EQ(a.counterexamples.size(), 0u);
  ::setenv("SPECTRAL_LAB_THREADS", "1", 1);
  const auto b = conjecture_scan(opt);
  ::unsetenv("SPECTRAL_LAB_THREADS");
  EXPECT_EQ(a.checked, b.checked);
  EXPECT_EQ(a.equal_re, b.equal_re);
  EXPECT_EQ(a.equal_im, b.equal_im);
}

TEST(ConjectureScan, RejectsShiftOperatorsAndBadRanges) {
  ConjectureOptions opt;
  opt.trials = 4;
  opt.sampler = [](std::mt19937_64&) { return LPOperator::shift(0.5); };
  EXPECT_THROW(conjecture_scan(opt), ArgumentError);
  ConjectureOptions bad;
  bad.deg_min = 5, bad.deg_max = 3;
  EXPECT_THROW(conjecture_scan(bad), ArgumentError);
}

TEST(ConjectureScan, SmallFactorGivesRealPartMajorization) {
  gen::Rng rng(10);
  int held = 0;
  for (int t = 0; t < 50; ++t) {
    const auto p = random_complex_poly(rng, gen::pick(rng, 2, 6));
    const auto zp = complex_roots(p);
    const auto zt = complex_roots(spectral_lab::apply(LPOperator::factor(1e-3), p));
    held += less_or_equal(hlp_compare(zp.real_parts(), zt.real_parts(), 1e-9).relation) ? 1 : 0;
  }
  EXPECT_GE(held, 45);
}

TEST(Property, ContinuationConsistency) {
  gen::Rng rng(401);
  for (int t = 0; t < 40; ++t) {
    const auto p = random_complex_poly(rng, gen::pick(rng, 2, 7));
    const Complex lam = std::polar(gen::uniform(rng, 0.05, 0.5), gen::uniform(rng, 0, 2 * pi));
    const auto ref = complex_roots(p).values();
    const auto a = twisted_roots(p, lam, 16, ref);
    const auto b = twisted_roots(p, lam, 32, ref);
    EXPECT_LT(max_dist(a, b), 1e-8) << "trial " << t;
  }
}

TEST(Property, RealSliceAgreesWithPencils) {
  gen::Rng rng(402);
  for (int t = 0; t < 60; ++t) {
    const auto x = gen::spread_reals(rng, gen::pick(rng, 2, 7), -2, 2, 0.1);
    const auto p = gen::poly_from(x);
    const double lam = gen::uniform(rng, -1, 1);
    std::vector<Complex> ref(x.begin(), x.end());
    const auto w = twisted_roots(to_complex(p), lam, 32, ref);
    const auto traj = root_trajectories(ld_basis(p), std::vector<double>{lam});
    std::vector<double> re;
    for (auto v : w) {
      EXPECT_LT(std::abs(v.imag()), 1e-9) << "trial " << t;
      re.push_back(v.real() + lam);
    }
    std::sort(re.begin(), re.end());
    for (std::size_t i = 0; i < re.size(); ++i) EXPECT_NEAR(re[i], traj.roots[0][i], 1e-9) << "trial " << t;
    // Continuation keeps the labels in increasing order along the real slice.
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_LT(w[i - 1].real(), w[i].real()) << "trial " << t;
  }
}
