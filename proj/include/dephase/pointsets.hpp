#pragma once

// Finite truncations of Delone sets in R^d (d = 1, 2, 3) around a central
// site at the origin: generators, radial queries and Delone radii.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dephase/numeric.hpp"

namespace dephase {

enum class SetKind { lattice, jittered, poisson_disk, custom };

inline const char* to_string(SetKind k) {
  switch (k) {
    case SetKind::lattice: return "lattice";
    case SetKind::jittered: return "jittered";
    case SetKind::poisson_disk: return "poisson_disk";
    case SetKind::custom: return "custom";
  }
  return "custom";
}

inline SetKind set_kind_from_string(const std::string& s) {
  if (s == "lattice") return SetKind::lattice;
  if (s == "jittered" || s == "jitter") return SetKind::jittered;
  if (s == "poisson_disk" || s == "poisson") return SetKind::poisson_disk;
  if (s == "custom") return SetKind::custom;
  throw InvalidArgument("unknown point-set kind: " + s);
}

/// How a PointSet was produced. Structural tail bounds are only trusted for
/// the generated kinds.
struct GenerationMeta {
  SetKind kind = SetKind::custom;
  double jitter = 0.0;   // jittered: offset half-width eta
  double r_min = 0.0;    // poisson_disk: hard-core distance
  double probe_spacing = 0.0;  // poisson_disk: maximality probe grid
  std::uint64_t seed = 0;
};

/// Immutable finite point set; every point satisfies 0 < |p| <= region_radius.
class PointSet {
 public:
  PointSet() = default;

  /// coords is row-major, dim values per point. Throws on any invariant
  /// violation (origin, outside region, duplicates).
  PointSet(int dim, std::vector<double> coords, double region_radius, GenerationMeta meta = {})
      : PointSet(dim, std::move(coords), region_radius, meta, Trusted{}) {
    check_duplicates();
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return norms_.size(); }
  [[nodiscard]] bool empty() const { return norms_.empty(); }
  [[nodiscard]] double region_radius() const { return region_radius_; }
  [[nodiscard]] const GenerationMeta& meta() const { return meta_; }

  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] double norm(std::size_t i) const { return norms_[i]; }
  [[nodiscard]] std::span<const double> norms() const { return norms_; }
  [[nodiscard]] std::span<const double> coords() const { return coords_; }

  /// Radii |p| with r <= |p| <= region_radius, sorted decreasing.
  [[nodiscard]] std::vector<double> radii_from(double r) const {
    std::vector<double> out;
    for (const double n : norms_) {
      if (n >= r) out.push_back(n);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.dim_ == b.dim_ && a.region_radius_ == b.region_radius_ && a.coords_ == b.coords_;
  }

 private:
  struct Trusted {};

  PointSet(int dim, std::vector<double> coords, double region_radius, GenerationMeta meta, Trusted)
      : dim_(dim), region_radius_(region_radius), meta_(meta), coords_(std::move(coords)) {
    if (dim < 1 || dim > 3) throw InvalidArgument("PointSet: dimension must be 1, 2 or 3");
    if (!(region_radius > 0.0)) throw InvalidArgument("PointSet: region_radius must be positive");
    if (coords_.size() % static_cast<std::size_t>(dim) != 0) {
      throw InvalidArgument("PointSet: coordinate count is not a multiple of dim");
    }
    const std::size_t n = coords_.size() / static_cast<std::size_t>(dim);
    norms_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double x = coords_[i * dim + k];
        if (!std::isfinite(x)) throw InvalidArgument("PointSet: non-finite coordinate");
        s += x * x;
      }
      const double r = std::sqrt(s);
      if (!(r > 0.0)) throw InvalidArgument("PointSet: the origin is reserved for the central spin");
      if (r > region_radius) throw InvalidArgument("PointSet: point outside region_radius");
      norms_[i] = r;
    }
  }

  void check_duplicates() const {
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
      const auto pa = point(a);
      const auto pb = point(b);
      return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };
    std::sort(idx.begin(), idx.end(), less);
    for (std::size_t i = 1; i < idx.size(); ++i) {
      const auto pa = point(idx[i - 1]);
      const auto pb = point(idx[i]);
      if (std::equal(pa.begin(), pa.end(), pb.begin())) {
        throw InvalidArgument("PointSet: duplicate point");
      }
    }
  }

  int dim_ = 1;
  double region_radius_ = 1.0;
  GenerationMeta meta_{};
  std::vector<double> coords_;
  std::vector<double> norms_;

  friend PointSet gen_lattice(int, double);
  friend PointSet gen_jittered(int, double, double, std::uint64_t);
  friend class PoissonDiskSampler;
};

/// Empirical Delone radii. r_cover is the largest probed hole;
/// r_cover_upper is a rigorous bound on the hole size over the probed ball.
struct DeloneRadii {
  double r_pack = 0.0;
  double r_cover = 0.0;
  double r_cover_upper = 0.0;
  double probe_spacing = 0.0;

  [[nodiscard]] double r_cover_uncertainty() const { return r_cover_upper - r_cover; }
};

struct AnnulusCount {
  double a = 0.0;
  double b = 0.0;
  std::size_t n_sites = 0;
};

struct AnnulusBoundsReport {
  AnnulusCount count;
  double lower = 0.0;  // clamped at 0
  double upper = 0.0;
  bool holds = false;
};

namespace detail {

inline void check_dim(int d) {
  if (d < 1 || d > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
}

// Visits integer vectors z in [-m, m]^d in lexicographic order.
template <typename Visit>
void for_each_cube_point(int d, std::int64_t m, Visit&& visit) {
  std::array<std::int64_t, 3> z{};
  for (int k = 0; k < d; ++k) z[k] = -m;
  while (true) {
    visit(std::span<const std::int64_t>(z.data(), static_cast<std::size_t>(d)));
    int k = d - 1;
    while (k >= 0 && z[k] == m) {
      z[k] = -m;
      --k;
    }
    if (k < 0) return;
    ++z[k];
  }
}

inline double unit_ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    default: return 4.0 * std::numbers::pi / 3.0;
  }
}

}  // namespace detail

/// All points of Z^d \ {0} with |p| <= r_max, lexicographic order.
inline PointSet gen_lattice(int d, double r_max) {
  detail::check_dim(d);
  if (!(r_max >= 1.0)) throw InvalidArgument("gen_lattice: r_max must be >= 1");
  const auto m = static_cast<std::int64_t>(std::floor(r_max));
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(detail::unit_ball_volume(d) * std::pow(r_max + 1.0, d)) * d);
  detail::for_each_cube_point(d, m, [&](std::span<const std::int64_t> z) {
    std::int64_t n2 = 0;
    for (const auto c : z) n2 += c * c;
    if (n2 == 0 || std::sqrt(static_cast<double>(n2)) > r_max) return;
    for (const auto c : z) coords.push_back(static_cast<double>(c));
  });
  GenerationMeta meta{SetKind::lattice};
  return PointSet(d, std::move(coords), r_max, meta, PointSet::Trusted{});
}

/// Integer lattice with each site displaced by an independent uniform offset
/// in [-eta, eta]^d drawn from a counter-based hash of (seed, site).
inline PointSet gen_jittered(int d, double r_max, double eta, std::uint64_t seed) {
  detail::check_dim(d);
  if (!(eta >= 0.0 && eta < 0.5)) throw InvalidArgument("gen_jittered: jitter must lie in [0, 0.5)");
  if (!(r_max >= 1.0)) throw InvalidArgument("gen_jittered: r_max must be >= 1");
  // Sites farther than r_max + eta sqrt(d) can never land inside the ball.
  const double reach = r_max + std::max(0.5, eta * std::sqrt(static_cast<double>(d)));
  const auto m = static_cast<std::int64_t>(std::floor(reach));
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(detail::unit_ball_volume(d) * std::pow(reach + 1.0, d)) * d);
  std::array<std::int64_t, 4> key{};
  detail::for_each_cube_point(d, m, [&](std::span<const std::int64_t> z) {
    std::int64_t n2 = 0;
    for (const auto c : z) n2 += c * c;
    if (n2 == 0 || std::sqrt(static_cast<double>(n2)) > reach) return;
    std::array<double, 3> p{};
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      std::copy(z.begin(), z.end(), key.begin());
      key[d] = k;
      const double u = unit_double(counter_hash(seed, std::span<const std::int64_t>(key.data(), d + 1)));
      p[k] = static_cast<double>(z[k]) + eta * (2.0 * u - 1.0);
      s += p[k] * p[k];
    }
    if (std::sqrt(s) > r_max) return;
    for (int k = 0; k < d; ++k) coords.push_back(p[k]);
  });
  GenerationMeta meta{SetKind::jittered, eta, 0.0, 0.0, seed};
  return PointSet(d, std::move(coords), r_max, meta, PointSet::Trusted{});
}

// ---------------------------------------------------------------------------
// Spatial index

/// Static uniform-grid index over a point set plus the origin (the central
/// site, which belongs to the underlying Delone set).
class SpatialIndex {
 public:
  SpatialIndex(const PointSet& ps, double cell) : dim_(ps.dim()), cell_(cell) {
    const double extent = ps.region_radius() + 3.0 * cell;
    side_ = static_cast<std::int64_t>(std::ceil(2.0 * extent / cell)) + 1;
    origin_shift_ = extent;
    std::size_t cells = 1;
    for (int k = 0; k < dim_; ++k) cells *= static_cast<std::size_t>(side_);
    const std::size_t n = ps.size() + 1;
    pts_.resize(n * dim_, 0.0);
    std::copy(ps.coords().begin(), ps.coords().end(), pts_.begin());
    std::vector<std::size_t> cell_of(n);
    offsets_.assign(cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of[i] = linear(cell_coords(&pts_[i * dim_]));
      ++offsets_[cell_of[i] + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    items_.resize(n);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] const double* point(std::size_t i) const { return &pts_[i * dim_]; }

  /// Distance from q to the nearest indexed point other than `skip`.
  [[nodiscard]] double nearest_distance(const double* q, std::size_t skip = kNone) const {
    const auto c = cell_coords(q);
    double best2 = std::numeric_limits<double>::infinity();
    for (std::int64_t ring = 0; ring < side_; ++ring) {
      scan_ring(c, ring, [&](std::uint32_t j) {
        if (j == skip) return;
        const double d2 = dist2(q, point(j));
        if (d2 < best2) best2 = d2;
      });
      const double reach = static_cast<double>(ring) * cell_;
      if (best2 <= reach * reach) break;
    }
    return std::sqrt(best2);
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

 private:
  using Cell = std::array<std::int64_t, 3>;

  [[nodiscard]] Cell cell_coords(const double* q) const {
    Cell c{};
    for (int k = 0; k < dim_; ++k) {
      auto v = static_cast<std::int64_t>(std::floor((q[k] + origin_shift_) / cell_));
      c[k] = std::clamp<std::int64_t>(v, 0, side_ - 1);
    }
    return c;
  }
  [[nodiscard]] std::size_t linear(const Cell& c) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim_; ++k) idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(c[k]);
    return idx;
  }
  [[nodiscard]] double dist2(const double* a, const double* b) const {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double t = a[k] - b[k];
      s += t * t;
    }
    return s;
  }

  // Visits items in cells at Chebyshev distance exactly `ring` from c.
  template <typename Fn>
  void scan_ring(const Cell& c, std::int64_t ring, Fn&& fn) const {
    Cell lo{}, hi{}, z{};
    for (int k = 0; k < dim_; ++k) {
      lo[k] = c[k] - ring;
      hi[k] = c[k] + ring;
      z[k] = lo[k];
    }
    while (true) {
      bool on_shell = false;
      bool inside = true;
      for (int k = 0; k < dim_; ++k) {
        if (z[k] == lo[k] || z[k] == hi[k]) on_shell = true;
        if (z[k] < 0 || z[k] >= side_) inside = false;
      }
      if (on_shell && inside) {
        const std::size_t li = linear(z);
        for (std::size_t p = offsets_[li]; p < offsets_[li + 1]; ++p) fn(items_[p]);
      }
      int k = dim_ - 1;
      while (k >= 0 && z[k] == hi[k]) {
        z[k] = lo[k];
        --k;
      }
      if (k < 0) return;
      ++z[k];
    }
  }

  int dim_;
  double cell_;
  std::int64_t side_ = 1;
  double origin_shift_ = 0.0;
  std::vector<double> pts_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> items_;
};

// ---------------------------------------------------------------------------
// Poisson-disk sampling

struct PoissonDiskOptions {
  int darts_per_cell = 30;
  /// Spacing of the maximality probe grid; 0 selects r_min / 10.
  double probe_spacing = 0.0;
};

/// Dart throwing over background cells of side r_min / sqrt(d) (at most one
/// point per cell) visited in seeded random order, then a completion pass
/// that inserts every probe-grid node q = spacing * z still at distance
/// >= r_min from the set and the origin.
class PoissonDiskSampler {
 public:
  PoissonDiskSampler(int d, double r_max, double r_min, std::uint64_t seed, PoissonDiskOptions opt)
      : d_(d), r_max_(r_max), r_min_(r_min), seed_(seed), opt_(opt) {
    detail::check_dim(d);
    if (!(r_min > 0.0 && r_min <= r_max)) throw InvalidArgument("gen_poisson_disk: requires 0 < r_min <= r_max");
    if (opt.darts_per_cell < 1) throw InvalidArgument("gen_poisson_disk: darts_per_cell must be >= 1");
    spacing_ = opt.probe_spacing > 0.0 ? opt.probe_spacing : r_min / 10.0;
    dart_cell_ = r_min / std::sqrt(static_cast<double>(d));
    dart_side_ = static_cast<std::int64_t>(std::ceil(2.0 * r_max / dart_cell_)) + 1;
    hash_side_ = static_cast<std::int64_t>(std::ceil(2.0 * r_max / r_min)) + 1;
    std::size_t hash_cells = 1;
    for (int k = 0; k < d; ++k) hash_cells *= static_cast<std::size_t>(hash_side_);
    hash_.assign(hash_cells * kSlots, -1);
  }

  PointSet run() {
    throw_darts();
    complete();
    GenerationMeta meta{SetKind::poisson_disk, 0.0, r_min_, spacing_, seed_};
    return PointSet(d_, std::move(coords_), r_max_, meta, PointSet::Trusted{});
  }

 private:
  using Cell = std::array<std::int64_t, 3>;
  // Upper bound on points of an r_min-separated set in a half-open cube of side r_min.
  static constexpr std::size_t kSlots = 8;

  [[nodiscard]] Cell cell_of(const double* p, double side_len, std::int64_t side) const {
    Cell c{};
    for (int k = 0; k < d_; ++k) {
      c[k] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((p[k] + r_max_) / side_len)), 0, side - 1);
    }
    return c;
  }
  [[nodiscard]] std::size_t linear(const Cell& c, std::int64_t side) const {
    std::size_t idx = 0;
    for (int k = 0; k < d_; ++k) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(c[k]);
    return idx;
  }
  [[nodiscard]] Cell unlinear(std::size_t idx, std::int64_t side) const {
    Cell c{};
    for (int k = d_ - 1; k >= 0; --k) {
      c[k] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(side));
      idx /= static_cast<std::size_t>(side);
    }
    return c;
  }

  // Squared distance to the nearest of {accepted points, origin}; exact
  // whenever that distance is below r_min. Returns early with any value
  // below cap2 once one is found.
  [[nodiscard]] double nearest2(const double* p, double cap2) const {
    double best = 0.0;
    for (int k = 0; k < d_; ++k) best += p[k] * p[k];
    if (best < cap2) return best;
    const Cell c = cell_of(p, r_min_, hash_side_);
    Cell lo{}, hi{}, z{};
    for (int k = 0; k < d_; ++k) {
      lo[k] = std::max<std::int64_t>(0, c[k] - 1);
      hi[k] = std::min<std::int64_t>(hash_side_ - 1, c[k] + 1);
      z[k] = lo[k];
    }
    while (true) {
      const std::size_t base = linear(z, hash_side_) * kSlots;
      for (std::size_t s = 0; s < kSlots; ++s) {
        const std::int32_t j = hash_[base + s];
        if (j < 0) break;
        double t2 = 0.0;
        for (int k = 0; k < d_; ++k) {
          const double t = p[k] - coords_[static_cast<std::size_t>(j) * d_ + k];
          t2 += t * t;
        }
        if (t2 < best) {
          best = t2;
          if (best < cap2) return best;
        }
      }
      int k = d_ - 1;
      while (k >= 0 && z[k] == hi[k]) {
        z[k] = lo[k];
        --k;
      }
      if (k < 0) break;
      ++z[k];
    }
    return best;
  }

  [[nodiscard]] bool insertable(const double* p) const {
    double n2 = 0.0;
    for (int k = 0; k < d_; ++k) n2 += p[k] * p[k];
    if (n2 > r_max_ * r_max_) return false;
    return nearest2(p, r_min_ * r_min_) >= r_min_ * r_min_;
  }

  void insert(const double* p) {
    const auto idx = static_cast<std::int32_t>(coords_.size() / d_);
    for (int k = 0; k < d_; ++k) coords_.push_back(p[k]);
    const std::size_t base = linear(cell_of(p, r_min_, hash_side_), hash_side_) * kSlots;
    std::size_t s = 0;
    while (s < kSlots && hash_[base + s] >= 0) ++s;
    if (s == kSlots) throw std::logic_error("PoissonDiskSampler: hash cell overflow");
    hash_[base + s] = idx;
  }

  [[nodiscard]] bool dart_cell_meets_ball(const Cell& c) const {
    double s = 0.0;
    for (int k = 0; k < d_; ++k) {
      const double lo = -r_max_ + static_cast<double>(c[k]) * dart_cell_;
      const double hi = lo + dart_cell_;
      const double t = lo > 0 ? lo : (hi < 0 ? -hi : 0.0);
      s += t * t;
    }
    return s <= r_max_ * r_max_;
  }

  void throw_darts() {
    std::size_t cells = 1;
    for (int k = 0; k < d_; ++k) cells *= static_cast<std::size_t>(dart_side_);
    std::vector<std::uint32_t> order;
    for (std::size_t i = 0; i < cells; ++i) {
      if (dart_cell_meets_ball(unlinear(i, dart_side_))) order.push_back(static_cast<std::uint32_t>(i));
    }
    const CounterRng perm(seed_, 0x5045524dULL);
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(perm.bits(i) % i);
      std::swap(order[i - 1], order[j]);
    }
    const CounterRng darts(seed_, 0x44415254ULL);
    std::uint64_t counter = 0;
    std::array<double, 3> p{};
    for (const std::uint32_t idx : order) {
      const Cell c = unlinear(idx, dart_side_);
      // The cell diagonal is r_min: skip cells already inside an exclusion ball.
      for (int k = 0; k < d_; ++k) p[k] = -r_max_ + (static_cast<double>(c[k]) + 0.5) * dart_cell_;
      if (nearest2(p.data(), 0.25 * r_min_ * r_min_) < 0.25 * r_min_ * r_min_) continue;
      for (int attempt = 0; attempt < opt_.darts_per_cell; ++attempt) {
        for (int k = 0; k < d_; ++k) {
          p[k] = -r_max_ + (static_cast<double>(c[k]) + darts.uniform(counter++)) * dart_cell_;
        }
        if (insertable(p.data())) {
          insert(p.data());
          break;
        }
      }
    }
  }

  // Branch and bound over boxes of probe-grid nodes.
  void complete() {
    const auto m = static_cast<std::int64_t>(std::floor(r_max_ / spacing_));
    const auto block = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(r_min_ / spacing_)));
    Cell lo{};
    for (int k = 0; k < d_; ++k) lo[k] = -m;
    while (true) {
      Cell hi{};
      for (int k = 0; k < d_; ++k) hi[k] = std::min(m, lo[k] + block - 1);
      refine(lo, hi);
      int k = d_ - 1;
      while (k >= 0 && lo[k] + block > m) {
        lo[k] = -m;
        --k;
      }
      if (k < 0) break;
      lo[k] += block;
    }
  }

  void refine(const Cell& lo, const Cell& hi) {
    std::array<double, 3> center{};
    double half_diag2 = 0.0;
    double box_dist2 = 0.0;
    for (int k = 0; k < d_; ++k) {
      center[k] = 0.5 * static_cast<double>(lo[k] + hi[k]) * spacing_;
      const double h = 0.5 * static_cast<double>(hi[k] - lo[k]) * spacing_;
      half_diag2 += h * h;
      const double a = static_cast<double>(lo[k]) * spacing_;
      const double b = static_cast<double>(hi[k]) * spacing_;
      const double t = a > 0 ? a : (b < 0 ? -b : 0.0);
      box_dist2 += t * t;
    }
    if (box_dist2 > r_max_ * r_max_) return;
    const double prune = r_min_ - std::sqrt(half_diag2);
    if (prune > 0.0 && nearest2(center.data(), prune * prune) < prune * prune) return;
    bool leaf = true;
    for (int k = 0; k < d_; ++k) leaf = leaf && lo[k] == hi[k];
    if (leaf) {
      if (insertable(center.data())) insert(center.data());
      return;
    }
    int axis = 0;
    for (int k = 1; k < d_; ++k) {
      if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
    }
    const std::int64_t mid = lo[axis] + (hi[axis] - lo[axis]) / 2;
    Cell left_hi = hi;
    left_hi[axis] = mid;
    Cell right_lo = lo;
    right_lo[axis] = mid + 1;
    refine(lo, left_hi);
    refine(right_lo, hi);
  }

  int d_;
  double r_max_;
  double r_min_;
  std::uint64_t seed_;
  PoissonDiskOptions opt_;
  double spacing_ = 0.0;
  double dart_cell_ = 0.0;
  std::int64_t dart_side_ = 0;
  std::int64_t hash_side_ = 0;
  std::vector<std::int32_t> hash_;
  std::vector<double> coords_;
};

/// Maximal hard-core sample in the ball of radius r_max, pairwise spacing
/// >= r_min, with the origin's r_min-neighbourhood excluded.
inline PointSet gen_poisson_disk(int d, double r_max, double r_min, std::uint64_t seed,
                                 PoissonDiskOptions opt = {}) {
  return PoissonDiskSampler(d, r_max, r_min, seed, opt).run();
}

// ---------------------------------------------------------------------------
// Radii and annuli

/// Packing radius from the closest pair among points with
/// |p| <= region_radius - margin (origin included); covering radius by
/// branch and bound over that ball down to boxes of side probe_spacing.
inline DeloneRadii measure_radii(const PointSet& ps, double margin, double probe_spacing = 0.05) {
  if (!(margin >= 0.0)) throw InvalidArgument("measure_radii: margin must be >= 0");
  if (!(probe_spacing > 0.0)) throw InvalidArgument("measure_radii: probe_spacing must be > 0");
  const double inner = ps.region_radius() - margin;
  if (!(inner > 0.0)) throw InvalidArgument("measure_radii: region_radius - margin must be > 0");
  std::size_t inside = 0;
  for (const double n : ps.norms()) inside += (n <= inner) ? 1 : 0;
  if (inside < 2) throw InvalidArgument("measure_radii: fewer than 2 points inside the margin region");

  const int d = ps.dim();
  const double density = static_cast<double>(ps.size() + 1) /
                         (detail::unit_ball_volume(d) * std::pow(ps.region_radius(), d));
  const double cell = std::max(probe_spacing, std::pow(2.0 / density, 1.0 / d));
  const SpatialIndex index(ps, cell);

  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= ps.size(); ++i) {
    if (i < ps.size() && ps.norm(i) > inner) continue;
    min_dist = std::min(min_dist, index.nearest_distance(index.point(i), i));
  }

  // Covering: maximise the nearest distance over the ball of radius inner.
  double best = 0.0;
  double upper = 0.0;
  const auto m = static_cast<std::int64_t>(std::ceil(inner / probe_spacing));
  struct Box {
    std::array<std::int64_t, 3> lo, hi;
  };
  std::vector<Box> stack;
  const auto block = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(cell / probe_spacing)));
  {
    std::array<std::int64_t, 3> lo{};
    for (int k = 0; k < d; ++k) lo[k] = -m;
    while (true) {
      Box b{lo, {}};
      for (int k = 0; k < d; ++k) b.hi[k] = std::min(m, lo[k] + block - 1);
      stack.push_back(b);
      int k = d - 1;
      while (k >= 0 && lo[k] + block > m) {
        lo[k] = -m;
        --k;
      }
      if (k < 0) break;
      lo[k] += block;
    }
  }
  auto evaluate = [&](const Box& b, std::array<double, 3>& c, double& half_diag, bool& meets, bool& center_in) {
    double hd2 = 0.0, box2 = 0.0, c2 = 0.0;
    for (int k = 0; k < d; ++k) {
      // Probe boxes are cells of side probe_spacing centred on grid nodes.
      const double a = (static_cast<double>(b.lo[k]) - 0.5) * probe_spacing;
      const double z = (static_cast<double>(b.hi[k]) + 0.5) * probe_spacing;
      c[k] = 0.5 * (a + z);
      hd2 += 0.25 * (z - a) * (z - a);
      const double t = a > 0 ? a : (z < 0 ? -z : 0.0);
      box2 += t * t;
      c2 += c[k] * c[k];
    }
    half_diag = std::sqrt(hd2);
    meets = box2 <= inner * inner;
    center_in = c2 <= inner * inner;
  };
  // Seed the incumbent with every block centre inside the ball.
  for (const auto& b : stack) {
    std::array<double, 3> c{};
    double hd = 0.0;
    bool meets = false, cin = false;
    evaluate(b, c, hd, meets, cin);
    if (meets && cin) best = std::max(best, index.nearest_distance(c.data()));
  }
  while (!stack.empty()) {
    const Box b = stack.back();
    stack.pop_back();
    std::array<double, 3> c{};
    double hd = 0.0;
    bool meets = false, cin = false;
    evaluate(b, c, hd, meets, cin);
    if (!meets) continue;
    const double dc = index.nearest_distance(c.data());
    if (cin) best = std::max(best, dc);
    if (dc + hd <= best) continue;
    bool leaf = true;
    for (int k = 0; k < d; ++k) leaf = leaf && b.lo[k] == b.hi[k];
    if (leaf) {
      upper = std::max(upper, dc + hd);
      continue;
    }
    int axis = 0;
    for (int k = 1; k < d; ++k) {
      if (b.hi[k] - b.lo[k] > b.hi[axis] - b.lo[axis]) axis = k;
    }
    const std::int64_t mid = b.lo[axis] + (b.hi[axis] - b.lo[axis]) / 2;
    Box left = b, right = b;
    left.hi[axis] = mid;
    right.lo[axis] = mid + 1;
    stack.push_back(left);
    stack.push_back(right);
  }
  DeloneRadii out;
  out.r_pack = 0.5 * min_dist;
  out.r_cover = best;
  out.r_cover_upper = std::max(best, upper);
  out.probe_spacing = probe_spacing;
  return out;
}

/// Count of points with a <= |p| <= b (closed annulus).
inline AnnulusCount count_annulus(const PointSet& ps, double a, double b) {
  if (!(a >= 0.0 && a < b)) throw InvalidArgument("count_annulus: requires 0 <= a < b");
  if (b > ps.region_radius()) throw InvalidArgument("count_annulus: b exceeds region_radius (set incomplete there)");
  std::size_t n = 0;
  for (const double r : ps.norms()) n += (a <= r && r <= b) ? 1 : 0;
  return {a, b, n};
}

/// Site-count sandwich for the annulus [a, b] from the packing radius
/// (upper bound) and covering radius (lower bound).
inline AnnulusBoundsReport check_annulus_bounds(const PointSet& ps, const DeloneRadii& radii, double a, double b) {
  if (!(radii.r_pack > 0.0 && radii.r_cover_upper > 0.0)) throw InvalidArgument("check_annulus_bounds: radii must be positive");
  if (a < radii.r_pack) throw InvalidArgument("check_annulus_bounds: requires a >= r_pack");
  AnnulusBoundsReport rep;
  rep.count = count_annulus(ps, a, b);
  const int d = ps.dim();
  const double rc = radii.r_cover_upper;
  const double rp = radii.r_pack;
  const double low = std::pow(std::max(0.0, b / rc - 1.0), d) - std::pow(a / rc + 1.0, d);
  rep.lower = std::max(0.0, low);
  rep.upper = std::pow(b / rp + 1.0, d) - std::pow(a / rp - 1.0, d);
  const auto n = static_cast<double>(rep.count.n_sites);
  rep.holds = rep.lower <= n && n <= rep.upper;
  return rep;
}

}  // namespace dephase
