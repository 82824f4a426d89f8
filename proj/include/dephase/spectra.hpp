#pragma once

// Exponential-coupling counterexamples: C_b(t) = prod_{k>=1} cos(t / b^k),
// the Cantor function, the D map and the Cantor characteristic function.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dephase/basis.hpp"
#include "dephase/numeric.hpp"

namespace dephase {

/// C_3(pi), 40-digit reference rounded to double.
inline constexpr double kCantorL = 0.46627457895504917;

struct TernaryPoint {
  double y = 0.0;
  std::vector<std::uint8_t> digits;  // a_1 .. a_D
  int depth = 0;
};

struct OscillationEntry {
  int i = 0;
  CertifiedValue recursion;  // C(pi) times the exact sign product
  CertifiedValue direct;     // product evaluated at b^i pi
};

struct CharFunctionEntry {
  double t = 0.0;
  std::complex<double> empirical;
  std::complex<double> expected;
  double distance = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline void check_base(int base) {
  if (base < 2) throw InvalidArgument("cos_product: base must be an integer >= 2");
}

// Certified product of the first `depth` factors plus the geometric tail
// bound sum_{k>depth} (t/b^k)^2, valid once t/b^{depth+1} <= 1.
inline CertifiedValue cos_product_at_depth(int base, double t, int depth) {
  const double b = base;
  t = std::abs(t);
  double v = 1.0;
  double arg_err = 0.0;
  double scale = 1.0;
  for (int k = 1; k <= depth; ++k) {
    scale /= b;  // exact for powers of two, faithful otherwise
    const double x = t * scale;
    v *= std::cos(x);
    arg_err += x;
  }
  const double first_dropped = t * std::pow(b, -(depth + 1));
  if (first_dropped > 1.0) throw InvalidArgument("cos_product: depth too small for the tail bound at this t");
  const double tail = t * t / (std::pow(b, 2.0 * depth) * (b * b - 1.0));
  const double rounding = 4.0 * kEps * arg_err + 3.0 * kEps * depth;
  return {v, std::min(2.0, std::abs(v) * std::expm1(tail) + rounding * std::exp(tail))};
}

}  // namespace detail

/// Minimal depth K with t^2 / (b^{2K} (b^2 - 1)) <= tol.
inline int cos_product_depth(int base, double t, double tol) {
  detail::check_base(base);
  if (!(tol > 0.0)) throw InvalidArgument("cos_product: tol must be positive");
  const double b = base;
  int K = 1;
  while (t * t / (std::pow(b, 2.0 * K) * (b * b - 1.0)) > tol || std::abs(t) * std::pow(b, -(K + 1)) > 1.0) ++K;
  return K;
}

inline CertifiedValue cos_product(int base, double t, double tol) {
  if (!std::isfinite(t)) throw InvalidArgument("cos_product: t must be finite");
  return detail::cos_product_at_depth(base, t, cos_product_depth(base, t, tol));
}

/// Fixed-depth product, for callers that pin the truncation.
inline CertifiedValue cos_product_fixed(int base, double t, int depth) {
  detail::check_base(base);
  if (depth < 1) throw InvalidArgument("cos_product: depth must be >= 1");
  return detail::cos_product_at_depth(base, t, depth);
}

/// C(b t) = cos(t) C(t) within the combined certified error plus tol.
inline bool recursion_check(int base, double t, double tol) {
  const CertifiedValue lhs = cos_product(base, base * t, tol);
  const CertifiedValue rhs = cos_product(base, t, tol);
  const double c = std::cos(t);
  const double slack = lhs.err + std::abs(c) * rhs.err + 4.0 * kEps * (1.0 + std::abs(base * t)) + tol;
  return std::abs(lhs.value - c * rhs.value) <= slack;
}

/// C(b^i pi) for i = 0..i_max, from C(b^i pi) = C(pi) prod_{j<i} cos(b^j pi)
/// with cos(b^j pi) = (-1)^{b^j}, and directly.
inline std::vector<OscillationEntry> persistent_oscillation(int base, int i_max, double tol) {
  if (base < 3) throw InvalidArgument("persistent_oscillation: base must be >= 3");
  if (i_max < 0 || i_max > 12) throw InvalidArgument("persistent_oscillation: requires 0 <= i_max <= 12");
  const CertifiedValue c0 = cos_product(base, std::numbers::pi, tol);
  std::vector<OscillationEntry> out;
  double sign = 1.0;
  double bj = 1.0;  // b^j, exact below 2^53
  for (int i = 0; i <= i_max; ++i) {
    OscillationEntry e;
    e.i = i;
    e.recursion = {sign * c0.value, c0.err};
    e.direct = cos_product(base, bj * std::numbers::pi, tol);
    // pi is rounded, so the argument b^i pi carries a relative ulp.
    e.direct.err += 2.0 * kEps * bj * std::numbers::pi;
    out.push_back(e);
    if (std::fmod(bj, 2.0) != 0.0) sign = -sign;
    bj *= base;
  }
  return out;
}

/// Cantor function on an exact digit sequence: 0 -> bit 0, 2 -> bit 1,
/// first 1 -> bit 1 and stop.
inline double cantor_function(const TernaryPoint& p) {
  double v = 0.0;
  for (std::size_t n = 0; n < p.digits.size(); ++n) {
    const int a = p.digits[n];
    const double w = std::ldexp(1.0, -static_cast<int>(n) - 1);
    if (a == 1) return v + w;
    if (a == 2) v += w;
  }
  return v;
}

/// Ternary digits of a double y in [0, 1], extracted exactly.
inline TernaryPoint ternary_digits(double y, int depth) {
  if (!(y >= 0.0 && y <= 1.0)) throw InvalidArgument("ternary_digits: y outside [0, 1]");
  if (depth < 1 || depth > 60) throw InvalidArgument("ternary_digits: requires 1 <= depth <= 60");
  TernaryPoint p;
  p.y = y;
  p.depth = depth;
  p.digits.reserve(depth);
  if (y == 1.0) {
    p.digits.assign(depth, 2);  // 1 = 0.222..._3
    return p;
  }
  int e = 0;
  const double m = std::frexp(y, &e);  // y = m 2^e, m in [0.5, 1)
  // y = N / 2^E with N < 2^53. Keep E <= 125 so 3N fits in 128 bits.
  auto N = static_cast<unsigned __int128>(std::ldexp(m, 53));
  int E = 53 - e;
  if (y == 0.0) {
    N = 0;
    E = 1;
  }
  if (E > 125) {
    N >>= (E - 125);  // drops less than 2^-125
    E = 125;
  }
  const unsigned __int128 mask = (static_cast<unsigned __int128>(1) << E) - 1;
  for (int n = 0; n < depth; ++n) {
    N *= 3;
    p.digits.push_back(static_cast<std::uint8_t>(N >> E));
    N &= mask;
  }
  return p;
}

/// Cantor function of a real y, error <= 2^-depth.
inline double cantor_function(double y, int depth) { return cantor_function(ternary_digits(y, depth)); }

/// D(x) = 1/2 + sum_{n<=depth} theta_n(2x - 1) / 3^n. Digits are
/// theta_n + 1 in {0, 2}; x must not be a dyadic rational of level <= depth.
inline TernaryPoint d_map(double x, int depth) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("d_map: x outside [0, 1]");
  if (depth < 1 || depth > 60) throw InvalidArgument("d_map: requires 1 <= depth <= 60");
  const double scaled = std::ldexp(x, depth);
  if (scaled == std::floor(scaled)) {
    throw InvalidArgument("d_map: x is a dyadic rational at the resolved level");
  }
  TernaryPoint p;
  p.depth = depth;
  p.digits.reserve(depth);
  // theta_n(2x - 1) is the n-th binary digit of x; reading it off x avoids
  // rounding 2x - 1.
  NeumaierSum y;
  double w = 1.0;
  for (int n = 1; n <= depth; ++n) {
    w /= 3.0;
    const int th = std::fmod(std::floor(std::ldexp(x, n)), 2.0) != 0.0 ? 1 : -1;
    p.digits.push_back(static_cast<std::uint8_t>(th + 1));
    y.add(th * w);
  }
  y.add(0.5);
  p.y = y.value();
  return p;
}

/// Monte-Carlo check that X = D(U) has characteristic function
/// exp(i t / 2) C_3(t), tolerance 4 / sqrt(n).
inline std::vector<CharFunctionEntry> char_function_check(std::size_t n_samples, const std::vector<double>& t_list,
                                                          std::uint64_t seed, int depth) {
  if (n_samples < 10000) throw InvalidArgument("char_function_check: requires n_samples >= 10^4");
  if (depth < 1 || depth > 52) throw InvalidArgument("char_function_check: requires 1 <= depth <= 52");
  for (const double t : t_list) {
    if (!(std::abs(t) <= 50.0)) throw InvalidArgument("char_function_check: requires |t| <= 50");
  }
  const CounterRng rng(seed, 0);
  std::vector<double> X(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    // odd multiples of 2^-53 are never dyadic at level <= 52
    const double x = static_cast<double>((rng.bits(i) >> 11) | 1U) * 0x1.0p-53;
    X[i] = d_map(x, depth).y;
  });
  std::vector<CharFunctionEntry> out;
  for (const double t : t_list) {
    const NeumaierSum re = chunked_sum(n_samples, [&](std::size_t i) { return std::cos(t * X[i]); });
    const NeumaierSum im = chunked_sum(n_samples, [&](std::size_t i) { return std::sin(t * X[i]); });
    CharFunctionEntry e;
    e.t = t;
    const double n = static_cast<double>(n_samples);
    e.empirical = {re.value() / n, im.value() / n};
    const CertifiedValue c = cos_product(3, t, 1e-14);
    e.expected = std::polar(1.0, 0.5 * t) * c.value;
    e.distance = std::abs(e.empirical - e.expected);
    e.tolerance = 4.0 / std::sqrt(n) + c.err;
    e.pass = e.distance <= e.tolerance;
    out.push_back(e);
  }
  return out;
}

}  // namespace dephase
