#pragma once

// Ramsey dephasing profile C_r(t) = prod_{|p| >= r} cos(Abar(|p|) t) for
// power-law couplings, with certified error, plus the diagnostics against
// the Gaussian limit.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dephase/bounds.hpp"
#include "dephase/numeric.hpp"
#include "dephase/pointsets.hpp"

namespace dephase {

/// A(rho) = amplitude * rho^{-alpha}.
struct CouplingPowerLaw {
  double alpha = 1.0;
  double amplitude = 1.0;

  [[nodiscard]] double operator()(double rho) const { return amplitude * std::pow(rho, -alpha); }
};

/// The requested tolerance cannot be met with the available region.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double required_region_radius)
      : std::runtime_error(what), required_region_radius_(required_region_radius) {}
  [[nodiscard]] double required_region_radius() const { return required_region_radius_; }

 private:
  double required_region_radius_;
};

enum class TailModel {
  automatic,  // certified bracket for the points beyond region_radius
  none,       // the set is the whole bath
};

struct RamseyOptions {
  TailModel tail = TailModel::automatic;
  std::size_t log_domain_threshold = 10000;  // near factors above this use log-magnitude
  double far_threshold = 0.5;                // max argument handled by the moment expansion
};

struct RamseyProfile {
  int dim = 1;
  double alpha = 0.0;
  double r = 0.0;
  double region_radius = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> err;
  CertifiedValue s2;  // sum_{|p| >= r} A^2
  CertifiedValue s4;  // sum_{|p| >= r} A^4
  std::size_t near_factors = 0;
  std::size_t far_factors = 0;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

struct SupDistance {
  double sup = 0.0;
  double argmax_t = 0.0;
  double grid_spacing = 0.0;  // largest gap between consecutive grid times
};

struct GaussianDiag {
  double sup_dist = 0.0;
  std::vector<double> bound_rhs;
  std::size_t failures = 0;
  bool envelope_ok = true;
};

struct ScanEntry {
  double r = 0.0;
  double sup_dist = 0.0;
};

struct ScanReport {
  std::vector<ScanEntry> entries;
  bool final_below = false;
  bool non_increasing = false;
};

namespace detail {

// Ratio bound c_{n+1}/c_n <= 4/pi^2 for the log-cos series, padded.
inline constexpr double kLogCosRatio = 4.0001 / (std::numbers::pi * std::numbers::pi);
// -log cos x - x^2/2 - x^4/12 <= kLogCosSixth x^6 on |x| <= 1.
inline constexpr double kLogCosSixth = 0.0323;
inline constexpr int kFarTerms = 12;

inline double max_gap(const std::vector<double>& t) {
  double g = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) g = std::max(g, t[i] - t[i - 1]);
  return g;
}

}  // namespace detail

/// Certified sum_{|p| >= r} A(|p|)^power: finite part plus the bracketed
/// tail beyond region_radius. Beyond the last point the value is 0 and the
/// error is the tail upper bound.
inline CertifiedValue normalization(const PointSet& ps, const DeloneRadii& radii, const CouplingPowerLaw& c, double r,
                                    int power, TailModel tail = TailModel::automatic) {
  if (power != 2 && power != 4) throw InvalidArgument("normalization: power must be 2 or 4");
  if (!(r >= 0.0)) throw InvalidArgument("normalization: requires r >= 0");
  const double s = power * c.alpha;
  const PowerLawTail check(s, ps.dim(), r);
  const double scale = std::pow(c.amplitude, power);
  Bracket t{0.0, 0.0};
  if (tail == TailModel::automatic) {
    t = tail_bracket(ps, radii, s).bracket;
    t.lo *= scale;
    t.hi *= scale;
  }
  if (r > ps.region_radius()) return {0.0, t.hi};
  const std::vector<double> rho = ps.radii_from(r);
  const NeumaierSum sum = chunked_sum(rho.size(), [&](std::size_t i) { return std::pow(c(rho[i]), power); });
  const double fin = sum.value();
  const double fin_err = sum.rounding_bound() + 2.0 * power * kEps * fin;
  return {fin + t.mid(), t.half_width() + fin_err + kEps * (fin + t.hi)};
}

/// Normalised couplings of one (set, coupling, r) triple, reusable across
/// time grids.
class RamseyModel {
 public:
  RamseyModel(const PointSet& ps, const DeloneRadii& radii, const CouplingPowerLaw& coupling, double r,
              RamseyOptions opt = {})
      : dim_(ps.dim()), alpha_(coupling.alpha), r_(r), region_radius_(ps.region_radius()), opt_(opt) {
    if (!(2.0 * alpha_ > dim_)) {
      throw DivergenceError("ramsey: requires 2 alpha > d (alpha=" + std::to_string(alpha_) +
                            ", d=" + std::to_string(dim_) + ")");
    }
    if (!(coupling.amplitude > 0.0)) throw InvalidArgument("ramsey: amplitude must be positive");
    if (!(r >= 0.0) || !(r <= region_radius_)) throw InvalidArgument("ramsey: requires 0 <= r <= region_radius");

    const std::vector<double> rho = ps.radii_from(r);
    if (rho.empty()) throw InvalidArgument("ramsey: no points with |p| >= r");
    std::vector<double> a(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) a[i] = coupling(rho[i]);
    const NeumaierSum s2 = chunked_sum(a.size(), [&](std::size_t i) { return a[i] * a[i]; });
    const NeumaierSum s4 = chunked_sum(a.size(), [&](std::size_t i) {
      const double q = a[i] * a[i];
      return q * q;
    });

    Bracket t2{0.0, 0.0};
    Bracket t4{0.0, 0.0};
    if (opt_.tail == TailModel::automatic) {
      t2 = tail_bracket(ps, radii, 2.0 * alpha_).bracket;
      t4 = tail_bracket(ps, radii, 4.0 * alpha_).bracket;
      const double a2 = coupling.amplitude * coupling.amplitude;
      t2 = {t2.lo * a2, t2.hi * a2};
      t4 = {t4.lo * a2 * a2, t4.hi * a2 * a2};
    }
    // pow is faithful, so each A carries one ulp and A^k about k ulps.
    const double f2_err = s2.rounding_bound() + 4.0 * kEps * s2.value();
    const double f4_err = s4.rounding_bound() + 8.0 * kEps * s4.value();
    s2_ = {s2.value() + t2.mid(), t2.half_width() + f2_err + kEps * (s2.value() + t2.hi)};
    s4_ = {s4.value() + t4.mid(), t4.half_width() + f4_err + kEps * (s4.value() + t4.hi)};
    if (!(s2_.lo() > 0.0)) throw InvalidArgument("ramsey: normalisation not resolved by the tail bracket");

    lambda_ = 1.0 / std::sqrt(s2_.value);
    lambda_lo_ = (1.0 - 2.0 * kEps) / std::sqrt(s2_.hi());
    lambda_hi_ = (1.0 + 2.0 * kEps) / std::sqrt(s2_.lo());
    abar_.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) abar_[i] = a[i] * lambda_;

    const double l2 = lambda_ * lambda_;
    tau2_ = {t2.lo * l2 * (1.0 - 4.0 * kEps), t2.hi * l2 * (1.0 + 4.0 * kEps)};
    tau4_ = {t4.lo * l2 * l2 * (1.0 - 8.0 * kEps), t4.hi * l2 * l2 * (1.0 + 8.0 * kEps)};
    tail_arg_ = opt_.tail == TailModel::automatic ? lambda_ * coupling(region_radius_) * (1.0 + 4.0 * kEps) : 0.0;
    amplitude_ = coupling.amplitude;
  }

  /// Normalised couplings, ordered by decreasing radius.
  [[nodiscard]] const std::vector<double>& normalized_couplings() const { return abar_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const CertifiedValue& s2() const { return s2_; }
  [[nodiscard]] const CertifiedValue& s4() const { return s4_; }

  /// Smallest region radius for which every dropped argument stays <= 1 up
  /// to |t| = t_max.
  [[nodiscard]] double required_region_radius(double t_max) const {
    return std::pow(lambda_hi_ * amplitude_ * t_max, 1.0 / alpha_);
  }

  [[nodiscard]] RamseyProfile profile(const std::vector<double>& times, double tol) const {
    if (!(tol > 0.0)) throw InvalidArgument("ramsey: tol must be positive");
    double t_max = 0.0;
    for (const double t : times) {
      if (!std::isfinite(t)) throw InvalidArgument("ramsey: times must be finite");
      t_max = std::max(t_max, std::abs(t));
    }
    if (opt_.tail == TailModel::automatic && tail_arg_ * t_max > 1.0) {
      const double need = required_region_radius(t_max);
      throw ToleranceError("ramsey: dropped coupling arguments exceed 1 at |t|=" + std::to_string(t_max) +
                               "; region_radius " + std::to_string(region_radius_) + " < required " +
                               std::to_string(need),
                           need);
    }

    // Couplings increase along abar_, so the near field is a suffix.
    const double cut = t_max > 0.0 ? opt_.far_threshold / t_max : std::numeric_limits<double>::infinity();
    const auto split = static_cast<std::size_t>(
        std::upper_bound(abar_.begin(), abar_.end(), cut) - abar_.begin());
    const auto moments = far_moments(split);
    const double x_far = split == 0 ? 0.0 : abar_[split - 1] * t_max;

    RamseyProfile p;
    p.dim = dim_;
    p.alpha = alpha_;
    p.r = r_;
    p.region_radius = region_radius_;
    p.times = times;
    p.values.assign(times.size(), 1.0);
    p.err.assign(times.size(), 0.0);
    p.s2 = s2_;
    p.s4 = s4_;
    p.near_factors = abar_.size() - split;
    p.far_factors = split;

    parallel_for(times.size(), [&](std::size_t i) {
      const auto [v, e] = evaluate(std::abs(times[i]), split, moments, x_far);
      p.values[i] = v;
      p.err[i] = e;
    });

    double worst = 0.0;
    for (const double e : p.err) worst = std::max(worst, e);
    if (worst > tol) {
      const double gap = 2.0 * alpha_ - dim_;
      const double need = region_radius_ * std::pow(worst / tol, 1.0 / gap);
      throw ToleranceError("ramsey: certified error " + std::to_string(worst) + " exceeds tol " +
                               std::to_string(tol) + "; estimated required region_radius " + std::to_string(need),
                           need);
    }
    return p;
  }

  /// Near-field product evaluated directly or in log-magnitude; exposed so
  /// the two paths can be compared at the crossover.
  [[nodiscard]] std::pair<double, double> near_product(double t, std::size_t split, bool log_domain) const {
    const std::size_t n = abar_.size() - split;
    double arg_err = 0.0;
    double value = 1.0;
    if (!log_domain) {
      for (std::size_t i = split; i < abar_.size(); ++i) {
        const double x = abar_[i] * t;
        value *= std::cos(x);
        arg_err += x;
      }
      return {value, 4.0 * kEps * arg_err + 2.0 * kEps * static_cast<double>(n)};
    }
    NeumaierSum logmag;
    bool negative = false;
    for (std::size_t i = split; i < abar_.size(); ++i) {
      const double x = abar_[i] * t;
      const double c = std::cos(x);
      if (c == 0.0) return {0.0, 4.0 * kEps * (arg_err + x) + 2.0 * kEps * static_cast<double>(n)};
      negative ^= c < 0.0;
      logmag.add(std::log(std::abs(c)));
      arg_err += x;
    }
    const double L = logmag.value();
    value = std::exp(L);
    const double rounding = value * kEps * (std::abs(L) + 2.0) * 2.0;
    return {negative ? -value : value, 4.0 * kEps * arg_err + 2.0 * kEps * static_cast<double>(n) + rounding};
  }

 private:
  using Moments = std::array<double, detail::kFarTerms + 1>;

  // M_{2k} = sum over far couplings of abar^{2k}, k = 1..13.
  [[nodiscard]] Moments far_moments(std::size_t split) const {
    const std::size_t chunks = (split + kChunkSize - 1) / kChunkSize;
    std::vector<std::array<NeumaierSum, detail::kFarTerms + 1>> part(chunks);
    parallel_for(chunks, [&](std::size_t c) {
      const std::size_t end = std::min(split, (c + 1) * kChunkSize);
      for (std::size_t i = c * kChunkSize; i < end; ++i) {
        const double y2 = abar_[i] * abar_[i];
        double pw = y2;
        for (auto& acc : part[c]) {
          acc.add(pw);
          pw *= y2;
        }
      }
    });
    std::array<NeumaierSum, detail::kFarTerms + 1> total;
    for (const auto& p : part) {
      for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(p[k]);
    }
    Moments m{};
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = total[k].value();
    return m;
  }

  [[nodiscard]] std::pair<double, double> evaluate(double t, std::size_t split, const Moments& m,
                                                   double x_far) const {
    if (t == 0.0) return {1.0, 0.0};
    const std::size_t n_near = abar_.size() - split;
    const auto [near, near_err] = near_product(t, split, n_near > opt_.log_domain_threshold);

    // Far field: -sum log cos = sum_k c_k t^{2k} M_{2k}.
    const auto& c = logcos_coefficients();
    const double t2 = t * t;
    double tp = t2;
    double far = 0.0;
    for (int k = 0; k < detail::kFarTerms; ++k) {
      far += c[k] * tp * m[k];
      tp *= t2;
    }
    const double x0 = std::min(x_far, opt_.far_threshold);
    const double far_rem = c[detail::kFarTerms] * tp * m[detail::kFarTerms] / (1.0 - detail::kLogCosRatio * x0 * x0);
    const double far_err = far_rem + 32.0 * kEps * far;

    // Tail beyond region_radius: x^2/2 + x^4/12 <= -log cos x <= ... + 0.0323 x^6.
    const double t4 = t2 * t2;
    const double g2 = tail_arg_ * tail_arg_ * t2;
    const double tail_lo = 0.5 * t2 * tau2_.lo + t4 * tau4_.lo / 12.0;
    const double tail_hi = 0.5 * t2 * tau2_.hi + t4 * tau4_.hi / 12.0 + detail::kLogCosSixth * g2 * t4 * tau4_.hi;
    const double tail_mid = 0.5 * (tail_lo + tail_hi);
    const double tail_err = 0.5 * (tail_hi - tail_lo) + 8.0 * kEps * tail_hi;

    const double expo = far + tail_mid;
    const double E = std::exp(-expo);
    const double delta = far_err + tail_err + kEps * (expo + 2.0);
    const double v = near * E;

    // Lipschitz bound in the normalisation: |dC/dlambda| <= lambda t^2 S2.
    const double dl = std::max(lambda_hi_ - lambda_, lambda_ - lambda_lo_);
    const double lip = t2 * lambda_hi_ * s2_.hi() * dl;

    double err = std::abs(near) * E * std::expm1(delta) + near_err * E * std::exp(delta) + lip + 2.0 * kEps * std::abs(v);
    err = std::min(err, 2.0);
    return {v, err};
  }

  int dim_;
  double alpha_;
  double r_;
  double region_radius_;
  RamseyOptions opt_;
  std::vector<double> abar_;
  CertifiedValue s2_;
  CertifiedValue s4_;
  double lambda_ = 0.0;
  double lambda_lo_ = 0.0;
  double lambda_hi_ = 0.0;
  Bracket tau2_;
  Bracket tau4_;
  double tail_arg_ = 0.0;
  double amplitude_ = 1.0;
};

inline RamseyProfile evaluate_profile(const PointSet& ps, const DeloneRadii& radii, const CouplingPowerLaw& coupling,
                                      double r, const std::vector<double>& times, double tol,
                                      RamseyOptions opt = {}) {
  return RamseyModel(ps, radii, coupling, r, opt).profile(times, tol);
}

/// Uniform grid lo, lo + dt, ..., up to hi inclusive (within dt/2).
inline std::vector<double> uniform_grid(double lo, double hi, double dt) {
  if (!(dt > 0.0) || !(hi >= lo)) throw InvalidArgument("uniform_grid: requires dt > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / dt + 0.5));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = lo + static_cast<double>(i) * dt;
  return t;
}

/// Grid supremum of |C(t) - exp(-t^2/2)|; a lower bound of the true sup.
inline SupDistance gaussian_sup_distance(const RamseyProfile& p) {
  SupDistance out;
  out.grid_spacing = detail::max_gap(p.times);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::abs(p.values[i] - std::exp(-0.5 * p.times[i] * p.times[i]));
    if (d > out.sup) {
      out.sup = d;
      out.argmax_t = p.times[i];
    }
  }
  return out;
}

/// Pointwise |exp(-t^2/2) - C(t)| <= (t^4/12) S4/S2^2 + err(t).
inline GaussianDiag compact_bound_check(const RamseyProfile& p) {
  GaussianDiag g;
  const double s2lo = p.s2.lo();
  if (!(s2lo > 0.0)) throw InvalidArgument("compact_bound_check: S2 not certified positive");
  const double ratio = p.s4.hi() / (s2lo * s2lo) * (1.0 + 4.0 * kEps);
  g.bound_rhs.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.times[i];
    const double t4 = t * t * t * t;
    g.bound_rhs[i] = t4 / 12.0 * ratio;
    const double d = std::abs(p.values[i] - std::exp(-0.5 * t * t));
    g.sup_dist = std::max(g.sup_dist, d);
    if (d > g.bound_rhs[i] + p.err[i] + 4.0 * kEps) ++g.failures;
  }
  g.envelope_ok = g.failures == 0;
  return g;
}

/// |C(t)| <= exp(-k t^{d/alpha}) + err(t) for every grid t >= T.
inline bool decay_envelope_check(const RamseyProfile& p, double k, double T) {
  if (!(k > 0.0) || !(T > 0.0)) throw InvalidArgument("decay_envelope_check: requires k > 0 and T > 0");
  if (p.times.empty() || p.times.back() <= T) throw InvalidArgument("decay_envelope_check: grid must extend beyond T");
  const double e = p.dim / p.alpha;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = std::abs(p.times[i]);
    if (t < T) continue;
    if (std::abs(p.values[i]) > std::exp(-k * std::pow(t, e)) + p.err[i]) return false;
  }
  return true;
}

/// k = 0.9 min_{t >= T} -log(|C| + err) / t^{d/alpha}.
inline double calibrate_envelope(const RamseyProfile& p, double T) {
  if (!(T > 0.0)) throw InvalidArgument("calibrate_envelope: requires T > 0");
  const double e = p.dim / p.alpha;
  std::size_t used = 0;
  double k = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = std::abs(p.times[i]);
    if (t < T) continue;
    ++used;
    const double m = std::abs(p.values[i]) + p.err[i];
    if (m >= 1.0) {
      throw InvalidArgument("calibrate_envelope: envelope not decaying at t=" + std::to_string(t));
    }
    k = std::min(k, -std::log(m) / std::pow(t, e));
  }
  if (used < 100) throw InvalidArgument("calibrate_envelope: need at least 100 grid points beyond T");
  return 0.9 * k;
}

/// Sup distance to the Gaussian along ascending inner cutoffs.
inline ScanReport uniform_convergence_scan(const PointSet& ps, const DeloneRadii& radii,
                                           const CouplingPowerLaw& coupling, const std::vector<double>& r_list,
                                           const std::vector<double>& times, double tol, double threshold,
                                           RamseyOptions opt = {}) {
  if (r_list.empty()) throw InvalidArgument("uniform_convergence_scan: empty r_list");
  if (!std::is_sorted(r_list.begin(), r_list.end())) {
    throw InvalidArgument("uniform_convergence_scan: r_list must be ascending");
  }
  ScanReport rep;
  for (const double r : r_list) {
    const RamseyProfile p = evaluate_profile(ps, radii, coupling, r, times, tol, opt);
    rep.entries.push_back({r, gaussian_sup_distance(p).sup});
  }
  rep.non_increasing = true;
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    if (rep.entries[i].sup_dist > rep.entries[i - 1].sup_dist + 2.0 * tol) rep.non_increasing = false;
  }
  rep.final_below = rep.entries.back().sup_dist <= threshold;
  return rep;
}

/// Least-squares sigma of exp(-t^2 / (2 sigma^2)) over grid points with
/// C > 0.05, by Newton iteration in u = 1/(2 sigma^2).
inline double fit_gaussian(const RamseyProfile& p) {
  std::size_t central = 0;
  for (const double t : p.times) central += std::abs(t) <= 3.0 ? 1 : 0;
  if (central < 5) throw InvalidArgument("fit_gaussian: need at least 5 grid points with |t| <= 3");
  std::vector<double> tt;
  std::vector<double> vv;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.values[i] > 0.05) {
      tt.push_back(p.times[i] * p.times[i]);
      vv.push_back(p.values[i]);
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < tt.size(); ++i) {
    if (tt[i] == 0.0) continue;
    num += -std::log(vv[i]) * tt[i];
    den += tt[i] * tt[i];
  }
  if (den == 0.0) throw InvalidArgument("fit_gaussian: no positive values away from t = 0");
  double u = std::max(num / den, 1e-12);
  for (int it = 0; it < 100; ++it) {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < tt.size(); ++i) {
      const double e = std::exp(-u * tt[i]);
      const double r = e - vv[i];
      g += -r * tt[i] * e;
      h += tt[i] * tt[i] * e * (e + r);
    }
    if (!(h > 0.0)) break;
    double step = g / h;
    while (u - step <= 0.0) step *= 0.5;
    u -= step;
    if (std::abs(step) <= 1e-15 * u) break;
  }
  return 1.0 / std::sqrt(2.0 * u);
}

/// Transverse Bloch components scale with the profile; z is conserved.
inline std::vector<std::array<double, 3>> bloch_evolution(const std::vector<double>& envelope,
                                                          const std::array<double, 3>& v0) {
  const double n = std::sqrt(v0[0] * v0[0] + v0[1] * v0[1] + v0[2] * v0[2]);
  if (n > 1.0 + 4.0 * kEps) throw InvalidArgument("bloch_evolution: |v0| must be <= 1");
  std::vector<std::array<double, 3>> out(envelope.size());
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    out[i] = {envelope[i] * v0[0], envelope[i] * v0[1], v0[2]};
  }
  return out;
}

inline std::vector<std::array<double, 3>> bloch_evolution(const RamseyProfile& p, const std::array<double, 3>& v0) {
  return bloch_evolution(p.values, v0);
}

}  // namespace dephase
