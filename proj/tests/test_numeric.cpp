#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>

#include "dephase/numeric.hpp"

using namespace dephase;

TEST(NeumaierSum, RecoversCancelledTerms) {
  NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 2.0);
  EXPECT_EQ(s.count(), 4u);
}

TEST(ChunkedSum, BitIdenticalAcrossThreadCounts) {
  auto term = [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i) * 0.37); };
  ::setenv("DEPHASE_THREADS", "1", 1);
  const double one = chunked_sum(100000, term).value();
  ::setenv("DEPHASE_THREADS", "4", 1);
  const double four = chunked_sum(100000, term).value();
  ::setenv("DEPHASE_THREADS", "7", 1);
  const double seven = chunked_sum(100000, term).value();
  ::unsetenv("DEPHASE_THREADS");
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, seven);
}

TEST(ThreadCount, ReadsEnvironment) {
  ::setenv("DEPHASE_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  ::setenv("DEPHASE_THREADS", "junk", 1);
  EXPECT_GE(thread_count(), 1u);
  ::unsetenv("DEPHASE_THREADS");
}

TEST(CounterRng, DependsOnlyOnKey) {
  const CounterRng a(5, 2);
  const CounterRng b(5, 2);
  const CounterRng c(5, 3);
  EXPECT_EQ(a.bits(17), b.bits(17));
  EXPECT_NE(a.bits(17), c.bits(17));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  const std::int64_t k1[] = {1, -2, 3};
  const std::int64_t k2[] = {1, -2, 3};
  EXPECT_EQ(counter_hash(9, k1), counter_hash(9, k2));
}

TEST(Zeta, KnownValues) {
  const double pi = std::numbers::pi;
  const auto z2 = riemann_zeta(2.0);
  EXPECT_NEAR(z2.value, pi * pi / 6.0, 4e-16);
  EXPECT_TRUE(z2.contains(pi * pi / 6.0) || std::abs(z2.value - pi * pi / 6.0) < 4e-16);
  EXPECT_NEAR(riemann_zeta(3.0).value, 1.2020569031595942, 4e-16);
  EXPECT_NEAR(riemann_zeta(4.0).value, pi * pi * pi * pi / 90.0, 4e-16);
  EXPECT_NEAR(dirichlet_beta(2.0).value, 0.91596559417721902, 1e-15);
  EXPECT_NEAR(dirichlet_beta(3.0).value, pi * pi * pi / 32.0, 1e-15);
}

TEST(Zeta, HurwitzShiftIdentity) {
  // zeta(s, a) = a^-s + zeta(s, a + 1)
  for (const double s : {1.5, 2.0, 3.7}) {
    for (const double a : {0.25, 1.0, 7.5, 40.0}) {
      const auto l = hurwitz_zeta(s, a);
      const auto r = hurwitz_zeta(s, a + 1.0);
      EXPECT_NEAR(l.value, std::pow(a, -s) + r.value, l.err + r.err + 1e-15 * l.value);
    }
  }
}

TEST(Zeta, RejectsDivergentExponent) {
  EXPECT_THROW(riemann_zeta(1.0), DivergenceError);
  EXPECT_THROW(hurwitz_zeta(2.0, 0.0), InvalidArgument);
}

TEST(LogCos, SeriesCoefficients) {
  const auto& c = logcos_coefficients();
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(c[2], 1.0 / 45.0);
  EXPECT_DOUBLE_EQ(c[3], 17.0 / 2520.0);
  for (std::size_t n = 1; n < c.size(); ++n) EXPECT_LE(c[n] / c[n - 1], 4.0001 / (std::numbers::pi * std::numbers::pi));
  // partial series against the function at x = 0.5
  double s = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) s += c[n] * std::pow(0.25, static_cast<double>(n + 1));
  EXPECT_NEAR(s, -std::log(std::cos(0.5)), 1e-15);
}

TEST(CertifiedValue, Bracket) {
  const auto v = CertifiedValue::from_bracket(1.0, 3.0);
  EXPECT_EQ(v.value, 2.0);
  EXPECT_EQ(v.err, 1.0);
  EXPECT_TRUE(v.contains(2.9));
  EXPECT_FALSE(v.contains(3.1));
}
