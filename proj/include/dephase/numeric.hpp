#pragma once

// Numeric building blocks shared by every module: certified values,
// compensated summation, deterministic parallel reduction, counter-based
// random numbers and a few special functions with explicit error bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dephase {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Precondition violation on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sum or integral that does not converge for the requested exponent.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A number with a rigorous non-negative error bound: the exact quantity
/// lies in [value - err, value + err].
struct CertifiedValue {
  double value = 0.0;
  double err = 0.0;

  [[nodiscard]] double lo() const { return value - err; }
  [[nodiscard]] double hi() const { return value + err; }
  [[nodiscard]] bool contains(double x) const { return std::abs(x - value) <= err; }

  static CertifiedValue from_bracket(double lo, double hi) {
    return {0.5 * (lo + hi), 0.5 * (hi - lo)};
  }
};

/// Closed interval of reals, used for two-sided bounds on tails.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] double half_width() const { return 0.5 * (hi - lo); }
  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Neumaier (improved Kahan) compensated accumulator.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    ++count_;
  }
  void merge(const NeumaierSum& other) {
    add(other.sum_);
    add(other.comp_);
    count_ = count_ - 2 + other.count_;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }
  [[nodiscard]] std::size_t count() const { return count_; }

  // Worst-case rounding error of the compensated result for a sum of
  // non-negative terms.
  [[nodiscard]] double rounding_bound() const {
    const double n = static_cast<double>(count_);
    return 2.0 * kEps * std::abs(value()) * (1.0 + n * kEps);
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Threading

/// Worker count: DEPHASE_THREADS if set, otherwise hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("DEPHASE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks, so
/// the caller controls determinism by writing only to slot i.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline constexpr std::size_t kChunkSize = 4096;

/// Compensated sum of term(i) over [0, n) with fixed 4096-element chunks
/// combined in chunk order. Bit-identical for any thread count.
template <typename Term>
NeumaierSum chunked_sum(std::size_t n, Term&& term) {
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<NeumaierSum> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    NeumaierSum acc;
    for (std::size_t i = c * kChunkSize; i < end; ++i) acc.add(term(i));
    partial[c] = acc;
  });
  NeumaierSum total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

// ---------------------------------------------------------------------------
// Counter-based random numbers

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless hash of a key sequence; identical keys give identical output
/// regardless of call order.
inline std::uint64_t counter_hash(std::uint64_t seed, std::span<const std::int64_t> keys) {
  std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  for (const std::int64_t k : keys) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(k));
  }
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based stream: value(i) depends only on (seed, stream, i).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(seed) ^ splitmix64(~stream)) {}
  [[nodiscard]] std::uint64_t bits(std::uint64_t index) const {
    return splitmix64(key_ + splitmix64(index));
  }
  [[nodiscard]] double uniform(std::uint64_t index) const { return unit_double(bits(index)); }

 private:
  std::uint64_t key_;
};

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

// B_2, B_4, ..., B_26
inline constexpr std::array<double, 13> kBernoulliEven = {
    1.0 / 6.0,        -1.0 / 30.0,          1.0 / 42.0,     -1.0 / 30.0,
    5.0 / 66.0,       -691.0 / 2730.0,      7.0 / 6.0,      -3617.0 / 510.0,
    43867.0 / 798.0,  -174611.0 / 330.0,    854513.0 / 138.0,
    -236364091.0 / 2730.0, 8553103.0 / 6.0};

inline constexpr double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Hurwitz zeta(s, a) = sum_{k>=0} (k + a)^{-s} for real s > 1, a > 0, by
/// Euler-Maclaurin with the remainder bounded by the first omitted term.
inline CertifiedValue hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw DivergenceError("hurwitz_zeta: requires s > 1");
  if (!(a > 0.0)) throw InvalidArgument("hurwitz_zeta: requires a > 0");
  constexpr int kTerms = 9;
  const int direct = a < 24.0 ? static_cast<int>(std::ceil(24.0 - a)) : 0;

  NeumaierSum acc;
  for (int k = direct - 1; k >= 0; --k) acc.add(std::pow(k + a, -s));
  const double x = direct + a;
  acc.add(std::pow(x, 1.0 - s) / (s - 1.0));
  acc.add(0.5 * std::pow(x, -s));

  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double next_term = 0.0;
  for (int j = 1; j <= kTerms + 1; ++j) {
    const double term = detail::kBernoulliEven[j - 1] / detail::factorial(2 * j) * rising *
                        std::pow(x, -s - 2 * j + 1);
    if (j <= kTerms) {
      acc.add(term);
    } else {
      next_term = std::abs(term);
    }
    rising *= (s + 2 * j - 1) * (s + 2 * j);
  }
  const double v = acc.value();
  // pow is faithful to 1 ulp; the compensated sum adds at most 2 ulp.
  const double rounding = 6.0 * kEps * std::abs(v);
  return {v, next_term + rounding};
}

inline CertifiedValue riemann_zeta(double s) { return hurwitz_zeta(s, 1.0); }

/// Dirichlet beta(s) = sum_{n>=0} (-1)^n (2n+1)^{-s} for s > 1.
inline CertifiedValue dirichlet_beta(double s) {
  const auto z1 = hurwitz_zeta(s, 0.25);
  const auto z3 = hurwitz_zeta(s, 0.75);
  const double scale = std::pow(4.0, -s);
  const double v = scale * (z1.value - z3.value);
  return {v, scale * (z1.err + z3.err) + 4.0 * kEps * scale * (z1.value + z3.value)};
}

/// Coefficients of -log cos x = sum_{n>=1} c_n x^{2n}, n = 1..13.
inline const std::array<double, 13>& logcos_coefficients() {
  static const std::array<double, 13> c = [] {
    std::array<double, 13> out{};
    for (int n = 1; n <= 13; ++n) {
      const double p = std::ldexp(1.0, 2 * n);
      out[n - 1] = p * (p - 1.0) * std::abs(detail::kBernoulliEven[n - 1]) /
                   (2.0 * n * detail::factorial(2 * n));
    }
    return out;
  }();
  return c;
}

}  // namespace dephase
