#pragma once

// The theta_alpha family on [-1, 1]: products of Rademacher-type +-1
// functions. Evaluation, exact dyadic inner products, Fourier coefficients
// against exp(-i pi m x) and L2 partial-sum checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "dephase/numeric.hpp"

namespace dephase {

inline constexpr int kMaxThetaIndex = 30;
inline constexpr int kMaxMaterializedLevel = 26;

/// Finite set of positive indices; empty means theta = 1.
class ThetaIndex {
 public:
  ThetaIndex() = default;
  ThetaIndex(std::initializer_list<int> idx) : ThetaIndex(std::vector<int>(idx)) {}
  explicit ThetaIndex(std::vector<int> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
      throw InvalidArgument("ThetaIndex: duplicate index");
    }
    if (!idx_.empty() && idx_.front() < 1) throw InvalidArgument("ThetaIndex: indices must be positive");
  }

  [[nodiscard]] const std::vector<int>& indices() const { return idx_; }
  [[nodiscard]] bool empty() const { return idx_.empty(); }
  [[nodiscard]] int max_index() const { return idx_.empty() ? 0 : idx_.back(); }
  [[nodiscard]] bool contains(int n) const { return std::binary_search(idx_.begin(), idx_.end(), n); }

  friend bool operator==(const ThetaIndex&, const ThetaIndex&) = default;

  /// Symmetric difference alpha Delta beta.
  friend ThetaIndex symmetric_difference(const ThetaIndex& a, const ThetaIndex& b) {
    std::vector<int> out;
    std::set_symmetric_difference(a.idx_.begin(), a.idx_.end(), b.idx_.begin(), b.idx_.end(),
                                  std::back_inserter(out));
    return ThetaIndex(std::move(out));
  }

 private:
  std::vector<int> idx_;
};

/// Constant value on each dyadic cell [-1 + 2j/2^N, -1 + 2(j+1)/2^N).
struct PiecewiseDyadic {
  int level = 0;
  std::vector<double> cell_values;

  [[nodiscard]] double cell_width() const { return std::ldexp(2.0, -level); }
  [[nodiscard]] double cell_left(std::size_t j) const { return -1.0 + static_cast<double>(j) * cell_width(); }
  [[nodiscard]] double operator()(double x) const {
    if (x < -1.0 || x > 1.0) throw InvalidArgument("PiecewiseDyadic: x outside [-1, 1]");
    const double u = std::ldexp(x + 1.0, level - 1);
    const auto j = std::min(static_cast<std::size_t>(u), cell_values.size() - 1);
    return cell_values[j];
  }
};

/// theta_n(x): +1 if the n-th binary digit of (x + 1)/2 is 1, else -1.
/// Equals sign(T^{n-1} x) with T x = 2x - sign(x) and sign(0) = +1.
inline int theta_eval(int n, double x) {
  if (n < 1) throw InvalidArgument("theta_eval: n must be >= 1");
  if (!(x >= -1.0 && x <= 1.0)) throw InvalidArgument("theta_eval: x outside [-1, 1]");
  if (x == 1.0) return 1;
  // floor(2^n u) = floor(2^{n-1} x) + 2^{n-1}; the offset is even for n >= 2.
  const double f = std::floor(std::ldexp(x, n - 1));
  const bool odd = std::fmod(f, 2.0) != 0.0;
  const bool digit = n == 1 ? !odd : odd;
  return digit ? 1 : -1;
}

/// Reference: the recursion unrolled literally.
inline int theta_eval_recursive(int n, double x) {
  if (n < 1) throw InvalidArgument("theta_eval_recursive: n must be >= 1");
  for (int k = 1; k < n; ++k) x = 2.0 * x - (x >= 0.0 ? 1.0 : -1.0);
  return x >= 0.0 ? 1 : -1;
}

inline int theta_alpha_eval(const ThetaIndex& alpha, double x) {
  int v = 1;
  for (const int n : alpha.indices()) v *= theta_eval(n, x);
  return v;
}

namespace detail {

// theta_gamma on cell j at level N: digit n of the cell is bit N - n of j.
inline int theta_cell(const std::vector<int>& gamma, int level, std::uint64_t j) {
  int parity = 0;
  for (const int n : gamma) parity ^= static_cast<int>(~(j >> (level - n)) & 1U);
  return parity ? -1 : 1;
}

inline void check_index_cap(const ThetaIndex& a) {
  if (a.max_index() > kMaxThetaIndex) throw InvalidArgument("theta index too large (max 30)");
}

}  // namespace detail

/// Exact cell representation at level max(alpha).
inline PiecewiseDyadic to_piecewise(const ThetaIndex& alpha) {
  detail::check_index_cap(alpha);
  const int level = alpha.max_index();
  if (level > kMaxMaterializedLevel) {
    throw InvalidArgument("to_piecewise: level above 26 is not materialised; use the implicit operations");
  }
  PiecewiseDyadic p;
  p.level = level;
  const std::size_t cells = std::size_t{1} << level;
  p.cell_values.resize(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double mid = -1.0 + std::ldexp(static_cast<double>(2 * j + 1), -level);
    p.cell_values[j] = theta_alpha_eval(alpha, mid);
  }
  return p;
}

/// <theta_alpha, theta_beta> = (1/2^N) sum over cells of the product, with
/// N = max(max alpha, max beta, 1). Cells are iterated implicitly; above
/// level 20 the sum factorises into a low and a high bit block.
inline double inner_product(const ThetaIndex& alpha, const ThetaIndex& beta) {
  detail::check_index_cap(alpha);
  detail::check_index_cap(beta);
  const ThetaIndex gamma = symmetric_difference(alpha, beta);
  const int level = std::max({alpha.max_index(), beta.max_index(), 1});
  constexpr int kBlock = 20;
  const int low_bits = std::min(level, kBlock);
  const int high_bits = level - low_bits;

  // Digit n sits at bit level - n of the cell index; split by bit position.
  std::vector<int> low_pos;
  std::vector<int> high_pos;
  for (const int n : gamma.indices()) {
    const int bit = level - n;
    (bit < low_bits ? low_pos : high_pos).push_back(bit);
  }
  auto block_sum = [](int bits, const std::vector<int>& pos, int shift) {
    std::int64_t s = 0;
    const std::uint64_t cells = std::uint64_t{1} << bits;
    for (std::uint64_t j = 0; j < cells; ++j) {
      int parity = 0;
      for (const int p : pos) parity ^= static_cast<int>(~(j >> (p - shift)) & 1U);
      s += parity ? -1 : 1;
    }
    return s;
  };
  const std::int64_t low = block_sum(low_bits, low_pos, 0);
  const std::int64_t high = block_sum(high_bits, high_pos, low_bits);
  return std::ldexp(static_cast<double>(low) * static_cast<double>(high), -level);
}

/// (theta_k)_m = int_{-1}^{1} theta_k(x) exp(-i pi m x) dx / 2, summed
/// exactly cell by cell with phases reduced modulo 2^k.
inline std::complex<double> fourier_coeff(int k, std::int64_t m) {
  if (k < 1 || k > 20) throw InvalidArgument("fourier_coeff: requires 1 <= k <= 20");
  if (m < -1000000 || m > 1000000) throw InvalidArgument("fourier_coeff: requires |m| <= 10^6");
  const std::int64_t cells = std::int64_t{1} << k;
  if (m == 0) return {0.0, 0.0};  // theta_k has mean zero on every pair of sibling cells
  // exp(-i pi m (-1 + 2 j / 2^k)) = (-1)^m exp(-2 pi i (m j mod 2^k) / 2^k)
  auto edge = [&](std::int64_t j) {
    std::int64_t q = (m * j) % cells;
    if (q < 0) q += cells;
    const double ph = -2.0 * std::numbers::pi * std::ldexp(static_cast<double>(q), -k);
    return std::complex<double>(std::cos(ph), std::sin(ph));
  };
  NeumaierSum re;
  NeumaierSum im;
  std::complex<double> left = edge(0);
  for (std::int64_t j = 0; j < cells; ++j) {
    const std::complex<double> right = edge(j + 1);
    const double v = (j & 1) ? 1.0 : -1.0;
    const std::complex<double> d = v * (left - right);
    re.add(d.real());
    im.add(d.imag());
    left = right;
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  // divide by 2 i pi m
  const std::complex<double> total(re.value(), im.value());
  return sign * total / std::complex<double>(0.0, 2.0 * std::numbers::pi * static_cast<double>(m));
}

/// Closed form: nonzero only at m = 2^k n + 2^{k-1}, where it equals
/// -i/(pi (n + 1/2)) for k = 1 and +i/(pi (n + 1/2)) for k >= 2.
inline std::complex<double> fourier_coeff_formula(int k, std::int64_t m) {
  if (k < 1) throw InvalidArgument("fourier_coeff_formula: k must be >= 1");
  const std::int64_t period = std::int64_t{1} << k;
  const std::int64_t half = period / 2;
  std::int64_t rem = (m - half) % period;
  if (rem != 0) return {0.0, 0.0};
  const auto n = static_cast<double>((m - half) / period);
  const double mag = 1.0 / (std::numbers::pi * (n + 0.5));
  return {0.0, k == 1 ? -mag : mag};
}

/// (T f)_{2n} = (-1)^n f_n and (T f)_{2n+1} = 0 mapping the coefficients
/// of theta_k onto those of theta_{k+1} for |n| <= n_range.
inline bool t_fourier_action_check(int k, std::int64_t n_range, double tol = 1e-12) {
  if (k < 1 || k > 19) throw InvalidArgument("t_fourier_action_check: requires 1 <= k <= 19");
  for (std::int64_t n = -n_range; n <= n_range; ++n) {
    const std::complex<double> src = fourier_coeff(k, n);
    const std::complex<double> even = fourier_coeff(k + 1, 2 * n);
    const std::complex<double> odd = fourier_coeff(k + 1, 2 * n + 1);
    const double s = (n % 2 == 0) ? 1.0 : -1.0;
    if (std::abs(even - s * src) > tol || std::abs(odd) > tol) return false;
  }
  return true;
}

/// S_N = sum_{k<=N} theta_k / 2^k as a level-N dyadic function.
inline PiecewiseDyadic partial_sum_x(int N) {
  if (N < 0 || N > kMaxThetaIndex) throw InvalidArgument("partial_sum_x: requires 0 <= N <= 30");
  if (N > kMaxMaterializedLevel) throw InvalidArgument("partial_sum_x: level above 26 is not materialised");
  PiecewiseDyadic p;
  p.level = N;
  const std::size_t cells = std::size_t{1} << N;
  p.cell_values.resize(cells);
  std::vector<int> one(1);
  for (std::size_t j = 0; j < cells; ++j) {
    double s = 0.0;
    for (int k = 1; k <= N; ++k) {
      one[0] = k;
      s += std::ldexp(static_cast<double>(detail::theta_cell(one, N, j)), -k);
    }
    p.cell_values[j] = s;
  }
  return p;
}

/// || f - x ||_2 under dx/2 on [-1, 1], integrated exactly per cell.
inline double l2_distance_to_identity(const PiecewiseDyadic& f) {
  const double h = f.cell_width();
  NeumaierSum acc;
  for (std::size_t j = 0; j < f.cell_values.size(); ++j) {
    const double a = f.cell_left(j);
    const double c = f.cell_values[j];
    // int_a^{a+h} (c - x)^2 dx / 2 = ((c - a)^3 - (c - a - h)^3) / 6
    const double p = c - a;
    const double q = c - a - h;
    acc.add((p * p * p - q * q * q) / 6.0);
  }
  return std::sqrt(acc.value());
}

struct CauchyReport {
  double exact = 0.0;      // sqrt(sum_{N<k<=M} A_k^2)
  double piecewise = 0.0;  // ||phi_M - phi_N||_2 integrated over cells
  bool agree = false;
};

/// ||phi_M - phi_N||_2 for phi_N = sum_{n<=N} A_n theta_n, both by
/// orthonormality and by integrating over the 2^{M-N} digit patterns that
/// the difference depends on. A[k-1] holds A_k.
inline CauchyReport l2_cauchy_check(const std::vector<double>& A, int N, int M, double tol = 1e-12) {
  if (N < 0 || M < N || M > kMaxThetaIndex) throw InvalidArgument("l2_cauchy_check: requires 0 <= N <= M <= 30");
  if (static_cast<int>(A.size()) < M) throw InvalidArgument("l2_cauchy_check: coupling prefix shorter than M");
  if (M - N > 24) throw InvalidArgument("l2_cauchy_check: M - N above 24 is too many patterns");
  CauchyReport rep;
  NeumaierSum sq;
  for (int k = N + 1; k <= M; ++k) sq.add(A[k - 1] * A[k - 1]);
  rep.exact = std::sqrt(sq.value());

  const int width = M - N;
  const std::uint64_t patterns = std::uint64_t{1} << width;
  NeumaierSum acc;
  for (std::uint64_t j = 0; j < patterns; ++j) {
    double s = 0.0;
    for (int b = 0; b < width; ++b) s += ((j >> b) & 1U) ? A[N + b] : -A[N + b];
    acc.add(s * s);
  }
  rep.piecewise = std::sqrt(std::ldexp(acc.value(), -width));
  rep.agree = std::abs(rep.exact - rep.piecewise) <= tol;
  return rep;
}

}  // namespace dephase
