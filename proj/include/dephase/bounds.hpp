#pragma once

// Sum-integral sandwich for power-law sums over Delone sets, the 1-D
// sum-integral estimate, the r^{d-alpha} asymptotics, and certified tail
// brackets used by the dephasing profile.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dephase/numeric.hpp"
#include "dephase/pointsets.hpp"

namespace dephase {

/// f(rho) = rho^{-alpha} summed over a d-dimensional set beyond radius r.
/// alpha > d keeps the sum finite and rho^{d-1} f(rho) decreasing.
struct PowerLawTail {
  double alpha = 0.0;
  int dim = 1;
  double r = 0.0;

  PowerLawTail(double alpha_, int dim_, double r_) : alpha(alpha_), dim(dim_), r(r_) {
    if (!(alpha > dim)) {
      throw DivergenceError("power-law sum diverges: requires alpha > d (alpha=" + std::to_string(alpha) +
                            ", d=" + std::to_string(dim) + ")");
    }
    if (!(r >= 0.0)) throw InvalidArgument("PowerLawTail: r must be >= 0");
  }
};

struct SandwichResult {
  double lower = 0.0;
  CertifiedValue finite_sum;
  double upper = 0.0;
  bool holds = false;
};

struct SeqSumReport {
  double alpha = 0.0;
  long a = 0;
  double integral_lower = 0.0;  // int_a^inf x^-alpha dx
  CertifiedValue sum;           // sum_{n>=a} n^-alpha
  double integral_upper = 0.0;  // int_{a-1}^inf x^-alpha dx
  bool holds = false;
};

struct RatioEntry {
  double r = 0.0;
  double ratio = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool within = false;
};

/// Where a tail bracket came from, tightest first.
enum class TailSource { exact_lattice, counting, sandwich };

inline const char* to_string(TailSource s) {
  switch (s) {
    case TailSource::exact_lattice: return "exact_lattice";
    case TailSource::counting: return "counting";
    case TailSource::sandwich: return "sandwich";
  }
  return "sandwich";
}

struct TailBracket {
  Bracket bracket;
  TailSource source = TailSource::sandwich;
};

/// Closed form of int_r^inf rho^{d-1-alpha} d rho = r^{d-alpha} / (alpha - d).
inline double integral_tail(double alpha, int dim, double r) {
  if (!(alpha > dim)) throw DivergenceError("integral_tail: diverges for alpha <= d");
  if (!(r > 0.0)) throw InvalidArgument("integral_tail: requires r > 0");
  return std::pow(r, dim - alpha) / (alpha - dim);
}

/// Compensated sum of |p|^{-s} over r <= |p| <= region_radius, small terms
/// first.
inline NeumaierSum finite_power_sum(const PointSet& ps, double s, double r) {
  const std::vector<double> radii = ps.radii_from(r);
  return chunked_sum(radii.size(), [&](std::size_t i) { return std::pow(radii[i], -s); });
}

/// Boxed two-sided bound on sum_{rho >= r} rho^{-alpha}. The lower bound
/// needs r >= 3 r_cover and is reported as 0 otherwise.
inline Bracket delone_sandwich_bounds(int d, const DeloneRadii& radii, double alpha, double r) {
  const PowerLawTail tail(alpha, d, r);
  const double rc = radii.r_cover_upper;
  const double rp = radii.r_pack;
  Bracket b;
  if (r >= 3.0 * rc) {
    b.lo = d / std::pow(3.0 * rc, d) * integral_tail(alpha, d, r + rc);
  }
  if (r - rp > 0.0) {
    b.hi = std::pow(3.0 / rp, d) * d * integral_tail(alpha, d, r - rp);
  } else {
    b.hi = std::numeric_limits<double>::infinity();
  }
  return b;
}

/// Sum of |p|^{-alpha} over set points with r <= |p| <= region_radius. The
/// error is the upper sandwich bound for the part beyond region_radius.
inline CertifiedValue delone_tail_sum(const PointSet& ps, const DeloneRadii& radii, double alpha, double r) {
  const PowerLawTail tail(alpha, ps.dim(), r);
  if (!(ps.region_radius() > r)) throw InvalidArgument("delone_tail_sum: requires region_radius > r");
  if (!(radii.r_pack > 0.0)) throw InvalidArgument("delone_tail_sum: packing radius must be positive");
  const NeumaierSum sum = finite_power_sum(ps, alpha, r);
  const double R = ps.region_radius();
  const int d = ps.dim();
  if (!(R - radii.r_pack > 0.0)) throw InvalidArgument("delone_tail_sum: region_radius must exceed r_pack");
  const double remainder = std::pow(3.0 / radii.r_pack, d) * d * integral_tail(alpha, d, R - radii.r_pack);
  return {sum.value(), remainder * (1.0 + 4.0 * kEps) + sum.rounding_bound()};
}

/// Checks lower <= certified finite sum <= upper for the tail beyond r.
inline SandwichResult sandwich_check(const PointSet& ps, const DeloneRadii& radii, double alpha, double r) {
  if (r < 3.0 * radii.r_cover_upper) {
    throw InvalidArgument("sandwich_check: requires r >= 3 r_cover (r=" + std::to_string(r) +
                          ", 3 r_cover=" + std::to_string(3.0 * radii.r_cover_upper) + ")");
  }
  if (!(r - radii.r_pack > 0.0)) throw InvalidArgument("sandwich_check: requires r > r_pack");
  const Bracket b = delone_sandwich_bounds(ps.dim(), radii, alpha, r);
  SandwichResult out;
  out.lower = std::max(0.0, b.lo);
  out.upper = b.hi;
  out.finite_sum = delone_tail_sum(ps, radii, alpha, r);
  out.holds = out.lower <= out.finite_sum.hi() && out.finite_sum.lo() <= out.upper;
  return out;
}

/// 1-D estimate int_a^inf f <= sum_{n>=a} f(n) <= int_{a-1}^inf f for
/// f(x) = x^{-alpha}. The sum is evaluated to `precision` by summing up to
/// M and bracketing the rest with the same estimate.
inline SeqSumReport seq_sum_integral_check(double alpha, long a, double precision = 1e-12) {
  if (!(alpha > 1.0)) throw DivergenceError("seq_sum_integral_check: requires alpha > 1");
  if (a < 2) throw InvalidArgument("seq_sum_integral_check: requires a >= 2");
  if (!(precision > 0.0)) throw InvalidArgument("seq_sum_integral_check: precision must be positive");
  // Bracket width for the tail from M on is int_{M-1}^{M} x^-alpha <= (M-1)^-alpha.
  const double m_real = std::max(static_cast<double>(a), 1.0 + std::pow(precision, -1.0 / alpha));
  if (m_real > 4e9) throw InvalidArgument("seq_sum_integral_check: precision unreachable by direct summation");
  const auto M = static_cast<long>(std::ceil(m_real));

  NeumaierSum head;
  for (long n = M - 1; n >= a; --n) head.add(std::pow(static_cast<double>(n), -alpha));
  const double tail_lo = integral_tail(alpha, 1, static_cast<double>(M));
  const double tail_hi = integral_tail(alpha, 1, static_cast<double>(M - 1));
  // pow is faithful per term, so the terms contribute at most one ulp of the total.
  const double rounding = head.rounding_bound() + kEps * head.value();

  SeqSumReport rep;
  rep.alpha = alpha;
  rep.a = a;
  rep.integral_lower = integral_tail(alpha, 1, static_cast<double>(a));
  rep.integral_upper = integral_tail(alpha, 1, static_cast<double>(a - 1));
  rep.sum = {head.value() + 0.5 * (tail_lo + tail_hi), 0.5 * (tail_hi - tail_lo) + rounding};
  rep.holds = rep.integral_lower <= rep.sum.hi() && rep.sum.lo() <= rep.integral_upper;
  return rep;
}

/// r^{alpha-d} times the tail sum, against the sandwich transported to the
/// ratio.
inline std::vector<RatioEntry> asymptotic_ratio(const PointSet& ps, const DeloneRadii& radii, double alpha,
                                                const std::vector<double>& r_list) {
  const int d = ps.dim();
  const PowerLawTail check(alpha, d, 0.0);
  std::vector<RatioEntry> out;
  out.reserve(r_list.size());
  for (const double r : r_list) {
    if (r > 0.5 * ps.region_radius()) throw InvalidArgument("asymptotic_ratio: requires r <= region_radius / 2");
    if (r < 3.0 * radii.r_cover_upper || !(r > radii.r_pack)) {
      throw InvalidArgument("asymptotic_ratio: r violates the sandwich preconditions");
    }
    const CertifiedValue s = delone_tail_sum(ps, radii, alpha, r);
    RatioEntry e;
    e.r = r;
    const double scale = std::pow(r, alpha - d);
    e.ratio = scale * s.value;
    const double rc = radii.r_cover_upper;
    const double rp = radii.r_pack;
    e.lo = d / (std::pow(3.0 * rc, d) * (alpha - d)) * std::pow(1.0 + rc / r, d - alpha);
    e.hi = std::pow(3.0, d) * d / (std::pow(rp, d) * (alpha - d)) * std::pow(1.0 - rp / r, d - alpha);
    e.within = e.lo <= scale * s.hi() && scale * s.lo() <= e.hi;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tail brackets for sum_{|p| > R} |p|^{-s}

namespace detail {

// int_R^inf (rho + shift)^d s rho^{-s-1} d rho by binomial expansion.
inline double shifted_moment(int d, double shift, double s, double R) {
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= d; ++j) {
    if (j > 0) binom = binom * (d - j + 1) / j;
    total += binom * std::pow(shift, d - j) * s * std::pow(R, j - s) / (s - j);
  }
  return total;
}

inline double shifted_moment_abs(int d, double shift, double s, double R) {
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= d; ++j) {
    if (j > 0) binom = binom * (d - j + 1) / j;
    total += binom * std::pow(std::abs(shift), d - j) * s * std::pow(R, j - s) / (s - j);
  }
  return total;
}

}  // namespace detail

/// Bracket from the counting function of a (jittered) integer lattice:
/// every site owns a unit cube, so V (rho - h)^d - 1 <= N(rho) <= V (rho + h)^d - 1
/// with h = (1/2 + eta) sqrt(d); integrated against -d(rho^{-s}) by parts.
inline Bracket counting_tail_bracket(const PointSet& ps, double s) {
  const int d = ps.dim();
  const double R = ps.region_radius();
  const double eta = ps.meta().kind == SetKind::jittered ? ps.meta().jitter : 0.0;
  const double h = (0.5 + eta) * std::sqrt(static_cast<double>(d));
  const double V = detail::unit_ball_volume(d);
  const double n_inside = static_cast<double>(ps.size());
  const double boundary = std::pow(R, -s) * n_inside;
  const double pad = 16.0 * kEps * (V * detail::shifted_moment_abs(d, h, s, R) + boundary);

  Bracket b;
  b.hi = V * detail::shifted_moment(d, h, s, R) - std::pow(R, -s) - boundary + pad;
  if (V * std::pow(R - h, d) >= 1.0) {
    b.lo = std::max(0.0, V * detail::shifted_moment(d, -h, s, R) - std::pow(R, -s) - boundary - pad);
  }
  return b;
}

/// Exact tail for the integer lattice in d = 1, 2 from closed-form lattice
/// sums: 2 zeta(s) and 4 zeta(s/2) beta(s/2).
inline Bracket exact_lattice_tail_bracket(const PointSet& ps, double s) {
  const double R = ps.region_radius();
  if (ps.dim() == 1) {
    const CertifiedValue z = hurwitz_zeta(s, std::floor(R) + 1.0);
    return {2.0 * (z.value - z.err), 2.0 * (z.value + z.err)};
  }
  if (ps.dim() != 2) throw InvalidArgument("exact_lattice_tail_bracket: only d = 1, 2");
  const CertifiedValue z = riemann_zeta(0.5 * s);
  const CertifiedValue be = dirichlet_beta(0.5 * s);
  const double total = 4.0 * z.value * be.value;
  const double total_err = 4.0 * (z.err * be.value + be.err * z.value + z.err * be.err) + 4.0 * kEps * total;
  const NeumaierSum inside = finite_power_sum(ps, s, 0.0);
  const double v = total - inside.value();
  const double err = total_err + inside.rounding_bound() + 2.0 * kEps * inside.value() + kEps * std::abs(v);
  return {std::max(0.0, v - err), v + err};
}

/// Certified bracket on sum_{|p| > region_radius} |p|^{-s}, from the
/// tightest source valid for the set's generation kind.
inline TailBracket tail_bracket(const PointSet& ps, const DeloneRadii& radii, double s) {
  const int d = ps.dim();
  const PowerLawTail check(s, d, 0.0);
  const double R = ps.region_radius();
  const auto kind = ps.meta().kind;
  if (kind == SetKind::lattice && d <= 2) {
    Bracket b = exact_lattice_tail_bracket(ps, s);
    const Bracket c = counting_tail_bracket(ps, s);
    b.lo = std::max(b.lo, c.lo);
    b.hi = std::min(b.hi, c.hi);
    return {b, TailSource::exact_lattice};
  }
  if (kind == SetKind::lattice || kind == SetKind::jittered) {
    return {counting_tail_bracket(ps, s), TailSource::counting};
  }
  Bracket b = delone_sandwich_bounds(d, radii, s, R);
  b.lo = std::max(0.0, b.lo);
  b.hi *= 1.0 + 4.0 * kEps;
  return {b, TailSource::sandwich};
}

}  // namespace dephase
