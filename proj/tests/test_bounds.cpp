#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dephase/bounds.hpp"

using namespace dephase;

namespace {

constexpr double kPi = std::numbers::pi;

DeloneRadii lattice_radii(int d) {
  const double rc = 0.5 * std::sqrt(static_cast<double>(d));
  return {0.5, rc, rc * (1.0 + 4.0 * kEps), 0.0};
}

double direct_sum(const PointSet& ps, double s, double lo, double hi) {
  NeumaierSum acc;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double n = ps.norm(i);
    if (n >= lo && n <= hi) acc.add(std::pow(n, -s));
  }
  return acc.value();
}

}  // namespace

TEST(IntegralTail, Examples) {
  EXPECT_DOUBLE_EQ(integral_tail(2, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(integral_tail(3, 2, 2), 0.5);
  EXPECT_DOUBLE_EQ(integral_tail(4, 3, 2), 0.5);
  EXPECT_THROW(integral_tail(1, 1, 1), DivergenceError);
  EXPECT_THROW(integral_tail(2.5, 3, 1), DivergenceError);
}

TEST(DeloneTailSum, OneDimensionalZeta) {
  const PointSet ps = gen_lattice(1, 1e6);
  const CertifiedValue v = delone_tail_sum(ps, lattice_radii(1), 2.0, 3.0);
  const double expected = 2.0 * (kPi * kPi / 6.0 - 1.25);
  EXPECT_NEAR(v.value, 0.789868, 1e-5);
  EXPECT_TRUE(v.contains(expected)) << v.value << " +- " << v.err;
}

TEST(DeloneTailSum, BeyondLastPointIsPureTail) {
  const PointSet ps = gen_lattice(1, 10.5);
  const CertifiedValue v = delone_tail_sum(ps, lattice_radii(1), 2.0, 10.2);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_GT(v.err, 0.0);
  EXPECT_TRUE(v.contains(2.0 * (hurwitz_zeta(2.0, 11.0).value)));
}

TEST(DeloneTailSum, TwoDimensionalLargerCutoff) {
  // Larger-cutoff oracle, scaled to R = 500 against 1000.
  const PointSet small = gen_lattice(2, 500.0);
  const PointSet big = gen_lattice(2, 1000.0);
  const CertifiedValue v = delone_tail_sum(small, lattice_radii(2), 3.0, 3.0);
  const double oracle = direct_sum(big, 3.0, 3.0, 1000.0);
  EXPECT_LE(std::abs(v.value - oracle), v.err);
  EXPECT_LT(v.value, oracle);
}

TEST(DeloneTailSum, Errors) {
  const PointSet ps = gen_lattice(1, 10.0);
  EXPECT_THROW(delone_tail_sum(ps, lattice_radii(1), 1.0, 3.0), DivergenceError);
  EXPECT_THROW(delone_tail_sum(ps, lattice_radii(1), 2.0, 11.0), InvalidArgument);
}

TEST(SandwichCheck, OneDimensionalExample) {
  const SandwichResult s = sandwich_check(gen_lattice(1, 1e5), {0.5, 0.5, 0.5, 0.0}, 2.0, 3.0);
  EXPECT_NEAR(s.lower, (1.0 / 1.5) * (1.0 / 3.5), 1e-12);
  EXPECT_NEAR(s.upper, 2.4, 1e-12);
  EXPECT_NEAR(s.finite_sum.value, 0.789868, 2e-5);
  EXPECT_TRUE(s.holds);
}

TEST(SandwichCheck, AllKindsAndDimensions) {
  for (int d = 1; d <= 3; ++d) {
    const double R = d == 1 ? 2000.0 : (d == 2 ? 150.0 : 30.0);
    const PointSet lat = gen_lattice(d, R);
    const PointSet jit = gen_jittered(d, R, 0.25, 9);
    for (const PointSet* ps : {&lat, &jit}) {
      const DeloneRadii radii = measure_radii(*ps, 3.0, d == 3 ? 0.1 : 0.05);
      for (const double alpha : {d + 0.5, d + 1.0, d + 3.0}) {
        for (const double r : {3.0 * radii.r_cover_upper, 5.0, 10.0}) {
          if (r < 3.0 * radii.r_cover_upper) continue;
          EXPECT_TRUE(sandwich_check(*ps, radii, alpha, r).holds) << "d=" << d << " alpha=" << alpha << " r=" << r;
        }
      }
    }
  }
}

TEST(SandwichCheck, RequiresCoverPrecondition) {
  EXPECT_THROW(sandwich_check(gen_lattice(1, 100.0), lattice_radii(1), 2.0, 1.0), InvalidArgument);
}

TEST(SandwichBounds, MonotoneInR) {
  const DeloneRadii radii = lattice_radii(2);
  double prev_lo = std::numeric_limits<double>::infinity();
  double prev_hi = std::numeric_limits<double>::infinity();
  for (double r = 3.0; r < 100.0; r *= 1.3) {
    const Bracket b = delone_sandwich_bounds(2, radii, 3.0, r);
    EXPECT_LE(b.lo, prev_lo);
    EXPECT_LE(b.hi, prev_hi);
    EXPECT_LE(b.lo, b.hi);
    prev_lo = b.lo;
    prev_hi = b.hi;
  }
}

TEST(SeqSumIntegral, Examples) {
  const SeqSumReport a = seq_sum_integral_check(2.0, 2);
  EXPECT_DOUBLE_EQ(a.integral_lower, 0.5);
  EXPECT_DOUBLE_EQ(a.integral_upper, 1.0);
  EXPECT_NEAR(a.sum.value, kPi * kPi / 6.0 - 1.0, 1e-11);
  EXPECT_TRUE(a.holds);

  const SeqSumReport b = seq_sum_integral_check(3.0, 2);
  EXPECT_DOUBLE_EQ(b.integral_lower, 0.125);
  EXPECT_DOUBLE_EQ(b.integral_upper, 0.5);
  EXPECT_NEAR(b.sum.value, 0.2020569031595943, 1e-11);
  EXPECT_TRUE(b.holds);

  const SeqSumReport c = seq_sum_integral_check(2.0, 10);
  EXPECT_DOUBLE_EQ(c.integral_lower, 0.1);
  EXPECT_DOUBLE_EQ(c.integral_upper, 1.0 / 9.0);
  EXPECT_TRUE(c.holds);
}

TEST(SeqSumIntegral, PropertySweep) {
  for (const double alpha : {1.5, 2.0, 3.0}) {
    for (long a = 2; a <= 50; ++a) {
      const SeqSumReport r = seq_sum_integral_check(alpha, a, alpha == 1.5 ? 1e-8 : 1e-12);
      EXPECT_TRUE(r.holds) << alpha << " " << a;
      EXPECT_LE(r.sum.err, alpha == 1.5 ? 1e-8 : 1e-11);
      const double hz = hurwitz_zeta(alpha, static_cast<double>(a)).value;
      EXPECT_TRUE(r.sum.contains(hz) || std::abs(r.sum.value - hz) < 1e-12) << alpha << " " << a;
    }
  }
}

TEST(SeqSumIntegral, Errors) {
  EXPECT_THROW(seq_sum_integral_check(1.0, 2), DivergenceError);
  EXPECT_THROW(seq_sum_integral_check(2.0, 1), InvalidArgument);
}

TEST(AsymptoticRatio, OneDimensionalExamples) {
  const PointSet ps = gen_lattice(1, 1e5);
  const auto r2 = asymptotic_ratio(ps, lattice_radii(1), 2.0, {100.0});
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_NEAR(r2[0].ratio, 2.0, 0.02);
  EXPECT_TRUE(r2[0].within);
  const auto r3 = asymptotic_ratio(ps, lattice_radii(1), 3.0, {100.0});
  EXPECT_NEAR(r3[0].ratio, 1.0, 0.02);
  EXPECT_TRUE(r3[0].within);
}

TEST(AsymptoticRatio, StaysInsideBand) {
  const PointSet ps = gen_lattice(2, 300.0);
  for (const auto& e : asymptotic_ratio(ps, lattice_radii(2), 3.0, {5.0, 20.0, 80.0, 150.0})) {
    EXPECT_TRUE(e.within) << e.r;
    EXPECT_LT(e.lo, e.hi);
  }
  EXPECT_THROW(asymptotic_ratio(ps, lattice_radii(2), 3.0, {200.0}), InvalidArgument);
}

TEST(TailBracket, SourcesByKind) {
  EXPECT_EQ(tail_bracket(gen_lattice(1, 50.0), lattice_radii(1), 2.0).source, TailSource::exact_lattice);
  EXPECT_EQ(tail_bracket(gen_lattice(2, 20.0), lattice_radii(2), 3.0).source, TailSource::exact_lattice);
  EXPECT_EQ(tail_bracket(gen_lattice(3, 8.0), lattice_radii(3), 4.0).source, TailSource::counting);
  const PointSet j = gen_jittered(2, 20.0, 0.25, 1);
  EXPECT_EQ(tail_bracket(j, measure_radii(j, 2.0), 3.0).source, TailSource::counting);
  const PointSet p = gen_poisson_disk(2, 20.0, 1.0, 1);
  EXPECT_EQ(tail_bracket(p, measure_radii(p, 2.0), 3.0).source, TailSource::sandwich);
  EXPECT_STREQ(to_string(TailSource::counting), "counting");
}

TEST(TailBracket, ContainsLargerCutoffValue) {
  for (int d = 1; d <= 3; ++d) {
    const double R = d == 3 ? 10.0 : 40.0;
    const double R2 = d == 3 ? 60.0 : (d == 2 ? 2000.0 : 1e6);
    const double s = d + 2.0;
    const PointSet small = gen_lattice(d, R);
    const PointSet big = gen_lattice(d, R2);
    const Bracket b = tail_bracket(small, lattice_radii(d), s).bracket;
    // The truncated oracle misses the part beyond R2; bound it loosely.
    const double beyond = std::pow(3.0 / 0.5, d) * d * integral_tail(s, d, R2 - 0.5);
    const double oracle = direct_sum(big, s, std::nextafter(R, 1e9), R2);
    EXPECT_LE(b.lo, oracle + beyond) << d;
    EXPECT_GE(b.hi, oracle) << d;
  }
}

TEST(TailBracket, ExactLatticeMatchesZeta) {
  const PointSet ps = gen_lattice(1, 30.0);
  const Bracket b = exact_lattice_tail_bracket(ps, 2.0);
  const double expected = 2.0 * (kPi * kPi / 6.0 - direct_sum(gen_lattice(1, 30.0), 2.0, 0.0, 30.0) / 2.0);
  EXPECT_LE(b.lo, expected + 1e-14);
  EXPECT_GE(b.hi, expected - 1e-14);
  EXPECT_LT(b.hi - b.lo, 1e-12);
}

TEST(PowerLawTail, RejectsDivergentExponent) {
  EXPECT_THROW(PowerLawTail(2.0, 2, 1.0), DivergenceError);
  EXPECT_NO_THROW(PowerLawTail(2.5, 2, 1.0));
}
