#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

#include "generators.hpp"
#include "spectral_lab/polynomial.hpp"
#include "spectral_lab/roots.hpp"

using namespace spectral_lab;
using C = std::complex<double>;

namespace {

void expect_coeffs(const RealPoly& p, std::vector<double> want, double tol = 1e-12) {
  ASSERT_EQ(p.coeffs().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(p[i], want[i], tol) << "coefficient " << i;
}

}  // namespace

TEST(Monic, RejectsNonUnitLeading) {
  EXPECT_THROW(MonicPoly(std::vector<double>{1, 2}), ArgumentError);
  EXPECT_NO_THROW(MonicPoly(std::vector<double>{5, 1}));
  EXPECT_EQ(MonicPoly::normalized(RealPoly{2, 4}).coeffs(), (std::vector<double>{0.5, 1}));
}

TEST(FromRoots, Examples) {
  expect_coeffs(from_roots({-1, 1}).poly(), {-1, 0, 1});
  const auto one = from_roots({});
  EXPECT_EQ(one.degree(), 0u);
  expect_coeffs(one.poly(), {1});
  expect_coeffs(from_roots({0, 0, 3}).poly(), {0, 0, -3, 1});
  EXPECT_EQ(from_roots({3, 0, 0}).roots().values(), (std::vector<double>{0, 0, 3}));
}

TEST(Differentiate, Examples) {
  expect_coeffs(differentiate(MonicPoly({-1, 0, 1})), {0, 2});
  expect_coeffs(differentiate(MonicPoly({0, 0, -3, 1})), {0, -6, 3});
  expect_coeffs(differentiate(MonicPoly({-5, 1})), {1});
  EXPECT_THROW(differentiate(MonicPoly()), DegreeError);
}

TEST(TaylorShift, Examples) {
  expect_coeffs(taylor_shift(MonicPoly({-1, 0, 1}), 1.0).poly(), {0, 2, 1});
  const MonicPoly p({3, -2, 5, 1});
  EXPECT_EQ(taylor_shift(p, 0.0), p);
  expect_coeffs(taylor_shift(MonicPoly({0, 0, 0, 1}), -1.0).poly(), {-1, 3, -3, 1});
  const ComplexPoly z({C(0), C(0), C(1)});
  const auto s = taylor_shift(z, C(0, 1));
  EXPECT_NEAR(std::abs(s[0] - C(-1, 0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - C(0, 2)), 0, 1e-15);
}

TEST(ZeroSum, Examples) {
  EXPECT_EQ(zero_sum(MonicPoly({-1, 0, 1})), 0);
  EXPECT_EQ(zero_sum(MonicPoly({0, 0, -3, 1})), 3);
  EXPECT_EQ(zero_sum(MonicPoly({-1, -2, 1})), 2);
  EXPECT_THROW(zero_sum(MonicPoly()), DegreeError);
}

TEST(Span, Examples) {
  EXPECT_DOUBLE_EQ(span(require_hyperbolic(MonicPoly({-1, 0, 1}))), 2);
  EXPECT_NEAR(span(require_hyperbolic(MonicPoly({1, -2, 1}))), 0, 1e-7);
  EXPECT_NEAR(span(require_hyperbolic(MonicPoly({-1, -2, 1}))), 2 * std::sqrt(2.0), 1e-12);
}

TEST(RealRoots, Examples) {
  auto a = require_hyperbolic(MonicPoly({-1, 0, 1}));
  EXPECT_EQ(a.certificate(), Certificate::SturmExact);
  EXPECT_NEAR(a.roots()[0], -1, 1e-14);
  EXPECT_NEAR(a.roots()[1], 1, 1e-14);

  auto b = real_roots_certified(MonicPoly({1, 0, 1}));
  ASSERT_FALSE(is_hyperbolic(b));
  EXPECT_EQ(std::get<NotHyperbolic>(b).real_root_count, 0u);

  auto c = require_hyperbolic(MonicPoly({0, 0, -3, 1}));
  EXPECT_EQ(c.certificate(), Certificate::Reconstructed);
  EXPECT_NEAR(c.roots()[0], 0, 1e-7);
  EXPECT_NEAR(c.roots()[1], 0, 1e-7);
  EXPECT_NEAR(c.roots()[2], 3, 1e-12);
}

TEST(RealRoots, MixedRealAndComplex) {
  // (x - 1)(x^2 + 1): one real root
  auto r = real_roots_certified(MonicPoly({-1, 1, -1, 1}));
  ASSERT_FALSE(is_hyperbolic(r));
  EXPECT_EQ(std::get<NotHyperbolic>(r).real_root_count, 1u);
  EXPECT_THROW(require_hyperbolic(MonicPoly({-1, 1, -1, 1})), NotHyperbolicError);
}

TEST(RealRoots, HighMultiplicity) {
  auto h = require_hyperbolic(from_roots({2, 2, 2, -1}).poly());
  EXPECT_EQ(h.roots().size(), 4u);
  EXPECT_NEAR(h.roots()[0], -1, 1e-9);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(h.roots()[i], 2, 1e-4);
}

TEST(RealRoots, DegreeZeroRejected) { EXPECT_THROW(real_roots_certified(MonicPoly()), DegreeError); }

TEST(RealRoots, ExactFallbackOnTightCluster) {
  // Two simple roots 1e-7 apart: the float chain is near-degenerate.
  const auto p = from_roots({1.0, 1.0 + 1e-7, 3.0}).poly();
  auto r = real_roots_certified(p);
  ASSERT_TRUE(is_hyperbolic(r));
  EXPECT_EQ(std::get<HyperbolicPoly>(r).roots().size(), 3u);
}

TEST(HyperbolicPoly, ReconstructionGuard) {
  EXPECT_THROW(HyperbolicPoly(MonicPoly({-1, 0, 1}), RootTuple({-1, 2}), Certificate::SturmExact),
               CertificationAmbiguous);
  EXPECT_THROW(HyperbolicPoly(MonicPoly({-1, 0, 1}), RootTuple({1}), Certificate::SturmExact), ShapeError);
}

TEST(ComplexRoots, Examples) {
  std::vector<C> c(6, C(0));
  c[0] = -1, c[5] = 1;
  const auto z = complex_roots(ComplexPoly(c));
  std::vector<C> want;
  for (int k = 1; k <= 5; ++k) want.push_back(std::polar(1.0, 2 * std::numbers::pi * k / 5));
  EXPECT_TRUE(multiset_equal(z, ComplexRootTuple(want), 1e-12));

  const auto w = complex_roots(ComplexPoly({C(1), C(0), C(1)}));
  EXPECT_TRUE(multiset_equal(w, ComplexRootTuple({C(0, 1), C(0, -1)}), 1e-12));

  const std::vector<C> r{C(1, 2), C(3, 0)};
  const auto u = complex_roots(ComplexPoly::from_roots(r));
  EXPECT_TRUE(multiset_equal(u, ComplexRootTuple(r), 1e-12));
}

TEST(ComplexRoots, ClustersDoubleRoot) {
  const std::vector<C> r{C(1, 1), C(1, 1), C(-2, 0)};
  const auto z = complex_roots(ComplexPoly::from_roots(r));
  EXPECT_TRUE(multiset_equal(z, ComplexRootTuple(r), 1e-6));
}

TEST(Property, SturmSoundness) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen::pick(rng, 1, 10);
    auto x = gen::spread_reals(rng, n, -3, 3, 0.05);
    auto r = real_roots_certified(gen::poly_from(x));
    ASSERT_TRUE(is_hyperbolic(r)) << "trial " << trial;
    const auto& got = std::get<HyperbolicPoly>(r).roots();
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], x[i], 1e-8) << "trial " << trial;
  }
}

TEST(Property, SturmSoundnessOnClusters) {
  // Gaps down to 1e-3 at degree 10: rounding the coefficients alone moves
  // roots by ~1e-8, so only the count and the backward error are checked.
  gen::Rng rng(16);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen::pick(rng, 1, 10);
    auto x = gen::spread_reals(rng, n, -3, 3, 1e-3);
    const auto p = gen::poly_from(x);
    auto r = real_roots_certified(p);
    ASSERT_TRUE(is_hyperbolic(r)) << "trial " << trial;
    const auto& got = std::get<HyperbolicPoly>(r).roots();
    EXPECT_LE(coeff_distance(RealPoly::from_roots(got.values()), p.poly()), 1e-12 * p.poly().max_abs_coeff());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], x[i], 1e-6) << "trial " << trial;
  }
}

TEST(Property, SturmSoundnessWithRepeatedRoots) {
  gen::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen::pick(rng, 2, 8);
    std::vector<double> x;
    while (x.size() < n) {
      const double v = std::round(gen::uniform(rng, -3, 3) * 4) / 4;
      const std::size_t m = std::min<std::size_t>(gen::pick(rng, 1, 2), n - x.size());
      x.insert(x.end(), m, v);
    }
    std::sort(x.begin(), x.end());
    auto r = real_roots_certified(gen::poly_from(x));
    ASSERT_TRUE(is_hyperbolic(r)) << "trial " << trial;
    const auto& got = std::get<HyperbolicPoly>(r).roots();
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], x[i], 1e-6) << "trial " << trial;
  }
}

TEST(Property, SturmCompleteness) {
  gen::Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = gen::pick(rng, 0, 6);
    auto x = gen::spread_reals(rng, k, -3, 3, 1e-3);
    RealPoly p = RealPoly::from_roots(x);
    const double re = gen::uniform(rng, -3, 3), im = gen::uniform(rng, 1e-3, 2);
    p = p * RealPoly{re * re + im * im, -2 * re, 1};
    auto r = real_roots_certified(MonicPoly(p));
    ASSERT_FALSE(is_hyperbolic(r)) << "trial " << trial;
    EXPECT_EQ(std::get<NotHyperbolic>(r).real_root_count, k);
  }
}

TEST(Property, TaylorShiftGroupLaw) {
  gen::Rng rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen::pick(rng, 1, 10);
    std::vector<double> c(n + 1);
    for (auto& v : c) v = gen::uniform(rng, -2, 2);
    c.back() = 1;
    const MonicPoly p(c);
    const double s = gen::uniform(rng, -1, 1), t = gen::uniform(rng, -1, 1);
    const auto lhs = taylor_shift(taylor_shift(p, s), t);
    const auto rhs = taylor_shift(p, s + t);
    for (std::size_t i = 0; i <= n; ++i)
      EXPECT_NEAR(lhs[i], rhs[i], 1e-10 * std::max(1.0, std::abs(rhs[i])));
    EXPECT_NEAR(zero_sum(taylor_shift(p, t)), zero_sum(p) - static_cast<double>(n) * t, 1e-10);
  }
}

TEST(Property, ComplexRootResidual) {
  gen::Rng rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = gen::pick(rng, 1, 10);
    std::vector<C> c(n + 1);
    for (auto& v : c) v = C(gen::uniform(rng, -2, 2), gen::uniform(rng, -2, 2));
    c.back() = 1;
    const ComplexPoly p(c);
    double cmax = 0;
    for (auto v : c) cmax = std::max(cmax, std::abs(v));
    const auto z = complex_roots(p);
    ASSERT_EQ(z.size(), n);
    for (auto v : z) {
      double scale = 0, pw = 1;
      for (auto cc : c) scale += std::abs(cc) * pw, pw *= std::abs(v);
      EXPECT_LE(std::abs(p(v)), 1e-12 * std::max(1.0, scale)) << "trial " << trial;
    }
  }
}

TEST(MultisetEqual, Rule) {
  EXPECT_TRUE(multiset_equal(RootTuple({1, 2}), RootTuple({2, 1 + 1e-12})));
  EXPECT_FALSE(multiset_equal(RootTuple({1, 2}), RootTuple({1, 2.001})));
  EXPECT_FALSE(multiset_equal(RootTuple({1, 2}), RootTuple({1, 2, 3})));
}

TEST(Concurrency, PureCallsAgreeAcrossThreads) {
  const auto p = from_roots({-2, -0.5, 0.25, 1, 3}).poly();
  const auto ref = require_hyperbolic(p).roots().values();
  std::vector<std::vector<double>> out(8);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < out.size(); ++i)
    pool.emplace_back([&, i] { out[i] = require_hyperbolic(p).roots().values(); });
  for (auto& t : pool) t.join();
  for (const auto& o : out) EXPECT_EQ(o, ref);
}
