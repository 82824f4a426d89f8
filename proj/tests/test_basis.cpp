#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dephase/basis.hpp"

using namespace dephase;

namespace {

ThetaIndex random_index(const CounterRng& rng, std::uint64_t& k, int max_n) {
  std::vector<int> v;
  for (int n = 1; n <= max_n; ++n) {
    if (rng.uniform(k++) < 0.3) v.push_back(n);
  }
  return ThetaIndex(v);
}

}  // namespace

TEST(ThetaEval, Examples) {
  EXPECT_EQ(theta_eval(1, 0.5), 1);
  EXPECT_EQ(theta_eval(1, -0.5), -1);
  EXPECT_EQ(theta_eval(2, 0.25), -1);
  EXPECT_EQ(theta_eval(2, -0.25), 1);
  EXPECT_EQ(theta_eval(1, 1.0), 1);
}

TEST(ThetaEval, DigitsMatchRecursion) {
  const CounterRng rng(2024, 0);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const int n = 1 + static_cast<int>(rng.bits(2 * i) % 20);
    const double x = 2.0 * rng.uniform(2 * i + 1) - 1.0;
    EXPECT_EQ(theta_eval(n, x), theta_eval_recursive(n, x)) << n << " " << x;
  }
}

TEST(ThetaAlpha, Examples) {
  EXPECT_EQ(theta_alpha_eval({}, 0.3), 1);
  EXPECT_EQ(theta_alpha_eval({}, -0.9), 1);
  EXPECT_EQ(theta_alpha_eval({1, 2}, 0.25), -1);
}

TEST(ThetaAlpha, SymmetricDifferenceIsProduct) {
  const CounterRng rng(5, 1);
  std::uint64_t k = 0;
  for (int i = 0; i < 500; ++i) {
    const ThetaIndex a = random_index(rng, k, 12);
    const ThetaIndex b = random_index(rng, k, 12);
    const double x = 2.0 * rng.uniform(k++) - 1.0;
    EXPECT_EQ(theta_alpha_eval(symmetric_difference(a, b), x), theta_alpha_eval(a, x) * theta_alpha_eval(b, x));
  }
}

TEST(ThetaIndex, Validation) {
  EXPECT_THROW(ThetaIndex({1, 1}), InvalidArgument);
  EXPECT_THROW(ThetaIndex({0, 2}), InvalidArgument);
  const ThetaIndex a{3, 1};
  EXPECT_EQ(a.indices(), (std::vector<int>{1, 3}));
  EXPECT_EQ(a.max_index(), 3);
  EXPECT_TRUE(a.contains(3));
  EXPECT_FALSE(a.contains(2));
  EXPECT_EQ(symmetric_difference(ThetaIndex{1, 2}, ThetaIndex{2, 3}), (ThetaIndex{1, 3}));
}

TEST(ToPiecewise, Examples) {
  const PiecewiseDyadic e = to_piecewise({});
  EXPECT_EQ(e.level, 0);
  EXPECT_EQ(e.cell_values, (std::vector<double>{1}));
  const PiecewiseDyadic s = to_piecewise({1});
  EXPECT_EQ(s.level, 1);
  EXPECT_EQ(s.cell_values, (std::vector<double>{-1, 1}));
  const PiecewiseDyadic t = to_piecewise({2});
  EXPECT_EQ(t.level, 2);
  EXPECT_EQ(t.cell_values, (std::vector<double>{-1, 1, -1, 1}));
}

TEST(ToPiecewise, MatchesMidpointEvaluation) {
  for (const ThetaIndex& a : {ThetaIndex{2}, ThetaIndex{1, 3}, ThetaIndex{2, 4, 5}, ThetaIndex{7}}) {
    const PiecewiseDyadic p = to_piecewise(a);
    ASSERT_EQ(p.cell_values.size(), std::size_t{1} << p.level);
    for (std::size_t j = 0; j < p.cell_values.size(); ++j) {
      const double mid = p.cell_left(j) + 0.5 * p.cell_width();
      EXPECT_EQ(p.cell_values[j], theta_alpha_eval(a, mid));
      EXPECT_EQ(p(mid), p.cell_values[j]);
    }
  }
}

TEST(ToPiecewise, IndexCaps) {
  EXPECT_THROW(to_piecewise({31}), InvalidArgument);
  EXPECT_THROW(to_piecewise({27}), InvalidArgument);
}

TEST(InnerProduct, Examples) {
  EXPECT_EQ(inner_product({}, {}), 1.0);
  EXPECT_EQ(inner_product({1}, {2}), 0.0);
  EXPECT_EQ(inner_product({1, 3}, {1, 3}), 1.0);
  EXPECT_EQ(inner_product({30}, {30}), 1.0);
  EXPECT_EQ(inner_product({29}, {30}), 0.0);
}

TEST(InnerProduct, OrthonormalRandomPairs) {
  const CounterRng rng(17, 3);
  std::uint64_t k = 0;
  for (int i = 0; i < 200; ++i) {
    const ThetaIndex a = random_index(rng, k, 30);
    const ThetaIndex b = (i % 4 == 0) ? a : random_index(rng, k, 30);
    EXPECT_EQ(inner_product(a, b), a == b ? 1.0 : 0.0);
  }
}

TEST(FourierCoeff, Examples) {
  const double pi = std::numbers::pi;
  const auto c11 = fourier_coeff(1, 1);
  EXPECT_NEAR(c11.real(), 0.0, 1e-15);
  EXPECT_NEAR(c11.imag(), -2.0 / pi, 1e-14);
  EXPECT_LT(std::abs(fourier_coeff(1, 2)), 1e-15);
  const auto c22 = fourier_coeff(2, 2);
  EXPECT_NEAR(c22.imag(), 2.0 / pi, 1e-14);
}

TEST(FourierCoeff, MatchesClosedForm) {
  for (int k = 1; k <= 8; ++k) {
    for (std::int64_t m = -300; m <= 300; ++m) {
      EXPECT_LT(std::abs(fourier_coeff(k, m) - fourier_coeff_formula(k, m)), 1e-12) << k << " " << m;
    }
  }
}

TEST(FourierCoeff, ParsevalApproachesOne) {
  for (int k = 1; k <= 4; ++k) {
    double prev = 0.0;
    for (const std::int64_t range : {100, 1000, 20000}) {
      double s = 0.0;
      for (std::int64_t m = -range; m <= range; ++m) s += std::norm(fourier_coeff_formula(k, m));
      EXPECT_LE(s, 1.0 + 1e-12);
      EXPECT_GE(s, prev);
      prev = s;
    }
    EXPECT_GT(prev, 0.99);
  }
}

TEST(FourierCoeff, RangeErrors) {
  EXPECT_THROW(fourier_coeff(0, 1), InvalidArgument);
  EXPECT_THROW(fourier_coeff(21, 1), InvalidArgument);
  EXPECT_THROW(fourier_coeff(3, 2000000), InvalidArgument);
}

TEST(TFourierAction, Examples) {
  EXPECT_TRUE(t_fourier_action_check(1, 100));
  EXPECT_TRUE(t_fourier_action_check(3, 100));
  for (std::int64_t n = -50; n <= 50; ++n) EXPECT_LT(std::abs(fourier_coeff(2, 2 * n + 1)), 1e-13);
  EXPECT_THROW(t_fourier_action_check(20, 10), InvalidArgument);
}

TEST(PartialSumX, ErrorLaw) {
  EXPECT_NEAR(l2_distance_to_identity(partial_sum_x(1)), 1.0 / std::sqrt(12.0), 1e-12);
  EXPECT_NEAR(l2_distance_to_identity(partial_sum_x(2)), 0.144338, 1e-6);
  for (int N = 0; N <= 20; ++N) {
    EXPECT_NEAR(l2_distance_to_identity(partial_sum_x(N)), std::ldexp(1.0, -N) / std::sqrt(3.0),
                1e-9 * std::ldexp(1.0, -N))
        << N;
  }
}

TEST(PartialSumX, TopCellIsGeometricSum) {
  for (int N = 1; N <= 12; ++N) {
    const PiecewiseDyadic p = partial_sum_x(N);
    EXPECT_EQ(p.cell_values.back(), 1.0 - std::ldexp(1.0, -N));
    EXPECT_EQ(p(1.0 - 1e-9), 1.0 - std::ldexp(1.0, -N));
  }
}

TEST(L2Cauchy, Examples) {
  std::vector<double> geo(30);
  std::vector<double> harm(30);
  for (int k = 1; k <= 30; ++k) {
    geo[k - 1] = std::ldexp(1.0, -k);
    harm[k - 1] = 1.0 / k;
  }
  const CauchyReport a = l2_cauchy_check(geo, 2, 4);
  EXPECT_NEAR(a.exact, std::sqrt(std::pow(4.0, -3) + std::pow(4.0, -4)), 1e-15);
  EXPECT_NEAR(a.exact, 0.139754, 1e-6);
  EXPECT_TRUE(a.agree);

  const CauchyReport b = l2_cauchy_check(harm, 10, 20);
  double s = 0.0;
  for (int k = 11; k <= 20; ++k) s += 1.0 / (double(k) * k);
  EXPECT_NEAR(b.exact, std::sqrt(s), 1e-14);
  EXPECT_TRUE(b.agree);

  const CauchyReport c = l2_cauchy_check(harm, 7, 7);
  EXPECT_EQ(c.exact, 0.0);
  EXPECT_EQ(c.piecewise, 0.0);
  EXPECT_TRUE(c.agree);

  EXPECT_THROW(l2_cauchy_check(harm, 5, 4), InvalidArgument);
  EXPECT_THROW(l2_cauchy_check(harm, 0, 30), InvalidArgument);
}
