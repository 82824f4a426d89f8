#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dephase/io.hpp"
#include "dephase/pointsets.hpp"

using namespace dephase;

namespace {

double min_pair_distance(const PointSet& ps) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < ps.dim(); ++k) {
        const double d = ps.point(i)[k] - ps.point(j)[k];
        s += d * d;
      }
      best = std::min(best, std::sqrt(s));
    }
  }
  return best;
}

std::size_t brute_force_lattice_count(int d, double R) {
  const int m = static_cast<int>(std::floor(R));
  std::size_t n = 0;
  for (int x = -m; x <= m; ++x) {
    for (int y = (d > 1 ? -m : 0); y <= (d > 1 ? m : 0); ++y) {
      for (int z = (d > 2 ? -m : 0); z <= (d > 2 ? m : 0); ++z) {
        const double r2 = double(x) * x + double(y) * y + double(z) * z;
        if (r2 > 0 && std::sqrt(r2) <= R) ++n;
      }
    }
  }
  return n;
}

DeloneRadii lattice_1d_radii() { return {0.5, 0.5, 0.5, 0.0}; }

}  // namespace

TEST(GenLattice, OneDimensionalExample) {
  const PointSet ps = gen_lattice(1, 3.0);
  ASSERT_EQ(ps.size(), 6u);
  std::multiset<double> xs;
  for (std::size_t i = 0; i < ps.size(); ++i) xs.insert(ps.point(i)[0]);
  EXPECT_EQ(xs, (std::multiset<double>{-3, -2, -1, 1, 2, 3}));
}

TEST(GenLattice, TwoAndThreeDimensionalExamples) {
  EXPECT_EQ(gen_lattice(2, 2.0).size(), 12u);
  const PointSet u = gen_lattice(3, 1.0);
  ASSERT_EQ(u.size(), 6u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_DOUBLE_EQ(u.norm(i), 1.0);
}

TEST(GenLattice, CompletenessAgainstBruteForce) {
  for (int d = 1; d <= 3; ++d) {
    for (const double R : {1.0, 2.5, 7.3, 13.0, 20.0}) {
      EXPECT_EQ(gen_lattice(d, R).size(), brute_force_lattice_count(d, R)) << "d=" << d << " R=" << R;
    }
  }
}

TEST(GenLattice, Errors) {
  EXPECT_THROW(gen_lattice(0, 5.0), InvalidArgument);
  EXPECT_THROW(gen_lattice(4, 5.0), InvalidArgument);
  EXPECT_THROW(gen_lattice(2, 0.5), InvalidArgument);
}

TEST(GenJittered, ZeroJitterIsLattice) {
  for (int d = 1; d <= 3; ++d) {
    const PointSet a = gen_jittered(d, 6.0, 0.0, 99);
    const PointSet b = gen_lattice(d, 6.0);
    ASSERT_EQ(a.size(), b.size());
    std::vector<std::vector<double>> pa;
    std::vector<std::vector<double>> pb;
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa.emplace_back(a.point(i).begin(), a.point(i).end());
      pb.emplace_back(b.point(i).begin(), b.point(i).end());
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    EXPECT_EQ(pa, pb);
  }
}

TEST(GenJittered, Deterministic) {
  EXPECT_TRUE(gen_jittered(2, 20.0, 0.3, 5) == gen_jittered(2, 20.0, 0.3, 5));
  EXPECT_FALSE(gen_jittered(2, 20.0, 0.3, 5) == gen_jittered(2, 20.0, 0.3, 6));
}

TEST(GenJittered, MinimumDistanceExample) {
  const PointSet ps = gen_jittered(2, 50.0, 0.25, 7);
  EXPECT_GE(min_pair_distance(ps), 0.5);
}

TEST(GenJittered, GrowingRegionKeepsEarlierPoints) {
  const PointSet small = gen_jittered(2, 10.0, 0.2, 3);
  const PointSet big = gen_jittered(2, 20.0, 0.2, 3);
  std::set<std::pair<double, double>> bp;
  for (std::size_t i = 0; i < big.size(); ++i) bp.insert({big.point(i)[0], big.point(i)[1]});
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_TRUE(bp.count({small.point(i)[0], small.point(i)[1]})) << i;
  }
}

TEST(GenJittered, RejectsBadJitter) {
  EXPECT_THROW(gen_jittered(2, 10.0, 0.5, 1), InvalidArgument);
  EXPECT_THROW(gen_jittered(2, 10.0, -0.1, 1), InvalidArgument);
}

TEST(GenPoissonDisk, HardCore) {
  for (int d = 1; d <= 3; ++d) {
    const PointSet ps = gen_poisson_disk(d, d == 3 ? 6.0 : 15.0, 1.0, 4);
    EXPECT_GE(min_pair_distance(ps), 1.0) << "d=" << d;
    for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_GE(ps.norm(i), 1.0);
  }
}

TEST(GenPoissonDisk, MaximalOnProbeGrid) {
  // No probe node at spacing r_min/10 in the inner ball may be insertable.
  for (int d = 1; d <= 2; ++d) {
    const double R = 8.0;
    const PointSet ps = gen_poisson_disk(d, R, 1.0, 2);
    const SpatialIndex index(ps, 1.0);
    const int m = static_cast<int>(R / 0.1);
    std::array<double, 3> q{};
    std::size_t insertable = 0;
    for (int i = -m; i <= m; ++i) {
      for (int j = (d > 1 ? -m : 0); j <= (d > 1 ? m : 0); ++j) {
        q = {0.1 * i, 0.1 * j, 0.0};
        if (std::hypot(q[0], q[1]) > R) continue;
        if (index.nearest_distance(q.data()) >= 1.0 + 1e-12) ++insertable;
      }
    }
    EXPECT_EQ(insertable, 0u) << "d=" << d;
  }
}

TEST(GenPoissonDisk, OneDimensionalCountExample) {
  const PointSet ps = gen_poisson_disk(1, 10.0, 1.0, 1);
  EXPECT_GE(ps.size(), 10u);
  EXPECT_LE(ps.size(), 20u);
}

TEST(GenPoissonDisk, Deterministic) {
  EXPECT_TRUE(gen_poisson_disk(2, 12.0, 1.0, 8) == gen_poisson_disk(2, 12.0, 1.0, 8));
}

TEST(GenPoissonDisk, Errors) {
  EXPECT_THROW(gen_poisson_disk(2, 5.0, 0.0, 1), InvalidArgument);
  EXPECT_THROW(gen_poisson_disk(2, 5.0, 6.0, 1), InvalidArgument);
}

TEST(MeasureRadii, OneDimensionalLattice) {
  const DeloneRadii r = measure_radii(gen_lattice(1, 50.0), 2.0, 0.01);
  EXPECT_DOUBLE_EQ(r.r_pack, 0.5);
  EXPECT_NEAR(r.r_cover, 0.5, 0.01);
  EXPECT_LE(r.r_cover, r.r_cover_upper);
  EXPECT_GE(r.r_cover_upper, 0.5);
}

TEST(MeasureRadii, TwoDimensionalLattice) {
  const DeloneRadii r = measure_radii(gen_lattice(2, 20.0), 2.0, 0.02);
  EXPECT_DOUBLE_EQ(r.r_pack, 0.5);
  EXPECT_NEAR(r.r_cover, std::sqrt(0.5), 0.02);
  EXPECT_GE(r.r_cover_upper, std::sqrt(0.5));
}

TEST(MeasureRadii, PoissonDisk) {
  const PointSet ps = gen_poisson_disk(2, 25.0, 1.0, 3);
  const DeloneRadii r = measure_radii(ps, 2.0, 0.05);
  EXPECT_GE(r.r_pack, 0.5);
  EXPECT_LE(r.r_cover, 1.0 + r.probe_spacing);
}

TEST(MeasureRadii, Errors) {
  const PointSet ps = gen_lattice(1, 3.0);
  EXPECT_THROW(measure_radii(ps, -1.0), InvalidArgument);
  EXPECT_THROW(measure_radii(ps, 3.0), InvalidArgument);
  EXPECT_THROW(measure_radii(ps, 2.5), InvalidArgument);  // one point left
}

TEST(CountAnnulus, Examples) {
  EXPECT_EQ(count_annulus(gen_lattice(1, 5.0), 1.0, 3.0).n_sites, 6u);
  EXPECT_EQ(count_annulus(gen_lattice(2, 5.0), 0.5, 1.5).n_sites, 8u);
  EXPECT_EQ(count_annulus(gen_lattice(2, 5.0), 1.5 - 1e-9, 1.5).n_sites, 0u);
  EXPECT_THROW(count_annulus(gen_lattice(2, 5.0), 1.0, 6.0), InvalidArgument);
}

TEST(AnnulusBounds, OneDimensionalExample) {
  const AnnulusBoundsReport r = check_annulus_bounds(gen_lattice(1, 5.0), lattice_1d_radii(), 1.0, 3.0);
  EXPECT_EQ(r.count.n_sites, 6u);
  EXPECT_DOUBLE_EQ(r.upper, 6.0);
  EXPECT_DOUBLE_EQ(r.lower, 2.0);
  EXPECT_TRUE(r.holds);
}

TEST(AnnulusBounds, RandomSweepAllKinds) {
  const CounterRng rng(77, 1);
  std::uint64_t k = 0;
  for (int d = 1; d <= 3; ++d) {
    const double R = d == 3 ? 10.0 : 30.0;
    for (const PointSet& ps : {gen_lattice(d, R), gen_jittered(d, R, 0.25, 3), gen_poisson_disk(d, R, 1.0, 3)}) {
      const DeloneRadii radii = measure_radii(ps, 2.0, d == 3 ? 0.1 : 0.05);
      for (int i = 0; i < 100; ++i) {
        const double a = radii.r_pack + rng.uniform(k++) * (R / 2 - radii.r_pack);
        const double b = a + 1e-6 + rng.uniform(k++) * (R - a - 1e-6);
        EXPECT_TRUE(check_annulus_bounds(ps, radii, a, b).holds) << to_string(ps.meta().kind) << " d=" << d;
      }
    }
  }
}

TEST(AnnulusBounds, RequiresInnerRadiusAbovePacking) {
  EXPECT_THROW(check_annulus_bounds(gen_lattice(1, 5.0), lattice_1d_radii(), 0.2, 3.0), InvalidArgument);
}

TEST(PointSet, InvariantsEnforced) {
  EXPECT_THROW(PointSet(2, {0.0, 0.0}, 1.0), InvalidArgument);            // origin
  EXPECT_THROW(PointSet(2, {3.0, 0.0}, 1.0), InvalidArgument);            // outside
  EXPECT_THROW(PointSet(1, {0.5, 0.5}, 1.0), InvalidArgument);            // duplicate
  EXPECT_THROW(PointSet(2, {0.5, 0.5, 0.1}, 1.0), InvalidArgument);       // ragged
  EXPECT_NO_THROW(PointSet(1, {0.5, -0.5}, 1.0));
}

TEST(PointSet, RadiiFromSortedDecreasing) {
  const auto r = gen_lattice(2, 6.0).radii_from(2.0);
  ASSERT_FALSE(r.empty());
  EXPECT_TRUE(std::is_sorted(r.rbegin(), r.rend()));
  EXPECT_GE(r.back(), 2.0);
}

TEST(Serialization, CsvRoundTrip) {
  const PointSet ps = gen_jittered(2, 6.0, 0.2, 11);
  std::stringstream ss;
  write_points_csv(ss, ps);
  EXPECT_EQ(ss.str().substr(0, 6), "x1,x2\n");
  const PointSet back = read_points_csv(ss, ps.region_radius(), ps.meta());
  EXPECT_TRUE(back == ps);
}

TEST(Serialization, JsonRoundTrip) {
  const PointSet ps = gen_poisson_disk(3, 4.0, 1.0, 2);
  const auto j = points_to_json(ps);
  EXPECT_EQ(j.at("dim"), 3);
  EXPECT_EQ(j.at("meta").at("kind"), "poisson_disk");
  const PointSet back = points_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(back == ps);
  EXPECT_EQ(back.meta().r_min, 1.0);
}
