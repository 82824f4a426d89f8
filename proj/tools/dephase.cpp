// dephase: command-line front end. Subcommands emit CSV or JSON; every file
// written with --out gets a <out>.json sidecar with the config and version.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dephase/basis.hpp"
#include "dephase/bounds.hpp"
#include "dephase/io.hpp"
#include "dephase/pointsets.hpp"
#include "dephase/ramsey.hpp"
#include "dephase/spectra.hpp"
#include "dephase/verify.hpp"

namespace {

using namespace dephase;
using nlohmann::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr double kSpectraTol = 1e-12;

SetKind parse_set(const std::string& s) {
  if (s == "lattice") return SetKind::lattice;
  if (s == "jitter" || s == "jittered") return SetKind::jittered;
  if (s == "poisson" || s == "poisson_disk") return SetKind::poisson_disk;
  throw InvalidArgument("unknown --set '" + s + "' (lattice|jitter|poisson)");
}

PointSet make_set(const RunConfig& c, double rmax) {
  switch (parse_set(c.set)) {
    case SetKind::lattice: return gen_lattice(c.dim, rmax);
    case SetKind::jittered: return gen_jittered(c.dim, rmax, c.jitter, c.seed);
    default: return gen_poisson_disk(c.dim, rmax, c.r_min, c.seed);
  }
}

// Lattice radii are known in closed form; other sets are measured.
DeloneRadii radii_for(const RunConfig& c, const PointSet& ps) {
  if (parse_set(c.set) == SetKind::lattice) {
    const double rc = 0.5 * std::sqrt(static_cast<double>(c.dim));
    return {0.5, rc, rc * (1.0 + 4.0 * kEps), 0.0};
  }
  return measure_radii(ps, std::max(c.margin, 3.0), c.probe_spacing);
}

// Writes through `body` to --out (plus sidecar) or to stdout.
template <typename Body>
void emit(const RunConfig& cfg, Body&& body, const json& extra = json::object()) {
  if (cfg.out.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw InvalidArgument("cannot write " + cfg.out);
  body(f);
  std::ofstream side(cfg.out + ".json");
  side << sidecar(cfg, extra).dump(2) << '\n';
}

int run_points(const RunConfig& c, const std::string& format) {
  const PointSet ps = make_set(c, c.rmax);
  const json info = {{"n_points", ps.size()}};
  if (format == "json") {
    emit(c, [&](std::ostream& os) { os << points_to_json(ps).dump() << '\n'; }, info);
  } else {
    emit(c, [&](std::ostream& os) { write_points_csv(os, ps); }, info);
  }
  return 0;
}

int run_bounds(const RunConfig& c) {
  const PointSet ps = make_set(c, c.rmax);
  const DeloneRadii radii = radii_for(c, ps);
  json rows = json::array();
  bool all = true;
  for (const double r : c.r) {
    const SandwichResult s = sandwich_check(ps, radii, c.alpha, r);
    all = all && s.holds;
    rows.push_back({{"r", r},
                    {"lower", s.lower},
                    {"sum", s.finite_sum.value},
                    {"err", s.finite_sum.err},
                    {"upper", s.upper},
                    {"holds", s.holds}});
  }
  const json report = {{"inputs", c},
                       {"radii", {{"r_pack", radii.r_pack}, {"r_cover", radii.r_cover}, {"r_cover_upper", radii.r_cover_upper}}},
                       {"n_points", ps.size()},
                       {"results", rows},
                       {"pass", all}};
  emit(c, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  if (!all) std::cerr << "sandwich bound violated (lower <= sum <= upper)\n";
  return all ? 0 : kExitCheckFailed;
}

int run_ramsey(const RunConfig& c) {
  if (c.r.size() != 1) throw InvalidArgument("ramsey takes a single --r");
  const PointSet ps = make_set(c, c.rmax);
  const DeloneRadii radii = radii_for(c, ps);
  const RamseyProfile p = evaluate_profile(ps, radii, {c.alpha}, c.r[0], uniform_grid(0.0, c.tmax, c.dt), c.tol);
  const GaussianDiag g = compact_bound_check(p);
  CsvTable table({"t", "C", "err", "gauss", "bound_rhs"});
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.times[i];
    table.add_row({t, p.values[i], p.err[i], std::exp(-0.5 * t * t), g.bound_rhs[i]});
  }
  const json extra = {{"s2", {p.s2.value, p.s2.err}},
                      {"s4", {p.s4.value, p.s4.err}},
                      {"sup_dist", g.sup_dist},
                      {"compact_bound_failures", g.failures}};
  emit(c, [&](std::ostream& os) { table.write(os); }, extra);
  if (!g.envelope_ok) std::cerr << "compact-convergence bound violated at " << g.failures << " grid points\n";
  return g.envelope_ok ? 0 : kExitCheckFailed;
}

int run_spectra(const RunConfig& c) {
  CsvTable table({"t", "C", "err"});
  for (const double t : uniform_grid(0.0, c.tmax, c.dt)) {
    const CertifiedValue v = c.depth > 0 ? cos_product_fixed(c.base, t, c.depth) : cos_product(c.base, t, c.tol);
    table.add_row({t, v.value, v.err});
  }
  emit(c, [&](std::ostream& os) { table.write(os); }, {{"l_reference", kCantorL}});
  return 0;
}

int run_cantor(const RunConfig& c, std::size_t n) {
  const int depth = c.depth > 0 ? c.depth : 50;
  const CounterRng rng(c.seed, 0);
  CsvTable table({"x", "D", "C_of_D"});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>((rng.bits(i) >> 11) | 1U) * 0x1.0p-53;
    const TernaryPoint d = d_map(x, depth);
    table.add_row({x, d.y, cantor_function(d)});
  }
  emit(c, [&](std::ostream& os) { table.write(os); });
  return 0;
}

int run_basis(const RunConfig& c, int kmax, int nrange) {
  json ortho = json::array();
  bool ok = true;
  for (int a = 0; a <= kmax; ++a) {
    for (int b = 0; b <= kmax; ++b) {
      const ThetaIndex ia = a ? ThetaIndex{a} : ThetaIndex{};
      const ThetaIndex ib = b ? ThetaIndex{b} : ThetaIndex{};
      const double ip = inner_product(ia, ib);
      ok = ok && ip == (a == b ? 1.0 : 0.0);
      ortho.push_back({{"alpha", ia.indices()}, {"beta", ib.indices()}, {"inner_product", ip}});
    }
  }
  json fourier = json::array();
  for (int k = 1; k <= kmax; ++k) {
    double gap = 0.0;
    for (std::int64_t m = -nrange; m <= nrange; ++m) gap = std::max(gap, std::abs(fourier_coeff(k, m) - fourier_coeff_formula(k, m)));
    const std::complex<double> lead = fourier_coeff(k, std::int64_t{1} << (k - 1));
    ok = ok && gap <= 1e-12;
    fourier.push_back({{"k", k}, {"max_gap_to_formula", gap}, {"leading", {lead.real(), lead.imag()}}});
  }
  json partial = json::array();
  for (int N = 1; N <= std::min(kmax, 20); ++N) {
    const double e = l2_distance_to_identity(partial_sum_x(N));
    partial.push_back({{"N", N}, {"l2_error", e}, {"expected", std::ldexp(1.0, -N) / std::sqrt(3.0)}});
  }
  const json report = {{"orthonormality", ortho}, {"fourier", fourier}, {"partial_sums", partial}, {"pass", ok}};
  emit(c, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
  return ok ? 0 : kExitCheckFailed;
}

int run_verify(const RunConfig& c, const std::vector<int>& only) {
  AcceptanceSuite suite(c.quick);
  bool all = true;
  json rows = json::array();
  for (const CheckResult& r : suite.run(only)) {
    std::cout << format_check(r) << std::endl;
    all = all && r.pass;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  if (!c.out.empty()) {
    std::ofstream f(c.out);
    f << json({{"version", kVersion}, {"quick", c.quick}, {"checks", rows}, {"pass", all}}).dump(2) << '\n';
  }
  std::cout << (all ? "all checks passed" : "some checks FAILED") << std::endl;
  return all ? 0 : kExitCheckFailed;
}

// --config is read before the real parse so that explicit flags override it.
RunConfig initial_config(int argc, char** argv) {
  RunConfig c;
  bool tol_given = false;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      c = load_config(argv[i + 1]);
      std::ifstream f(argv[i + 1]);
      tol_given = json::parse(f, nullptr, false).contains("tol");
    }
  }
  // spectra tables are meant to be read at full precision
  for (int i = 1; i < argc && !tol_given; ++i) {
    if (std::string(argv[i]) == "spectra") c.tol = kSpectraTol;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    cfg = initial_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Certified central-spin dephasing on Delone sets"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::string config_path;
  std::string save_config;
  app.add_option("--config", config_path, "JSON run configuration (flags override it)");
  app.add_option("--save-config", save_config, "write the effective configuration as JSON");

  auto set_opts = [&](CLI::App* s) {
    s->add_option("--dim", cfg.dim, "dimension (1-3)")->capture_default_str();
    s->add_option("--rmax", cfg.rmax, "region radius")->capture_default_str();
    s->add_option("--set", cfg.set, "lattice|jitter|poisson")->capture_default_str();
    s->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    s->add_option("--jitter", cfg.jitter, "jitter half-width")->capture_default_str();
    s->add_option("--r-min", cfg.r_min, "Poisson-disk hard-core distance")->capture_default_str();
    s->add_option("--margin", cfg.margin, "radius-measurement margin")->capture_default_str();
    s->add_option("--probe-spacing", cfg.probe_spacing, "covering-radius probe spacing")->capture_default_str();
    s->add_option("--out", cfg.out, "output file (default stdout)");
  };

  std::string points_format = "csv";
  auto* points = app.add_subcommand("points", "generate a point set");
  set_opts(points);
  points->add_option("--format", points_format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "sum-integral sandwich report (JSON)");
  set_opts(bounds);
  bounds->add_option("--alpha", cfg.alpha, "power-law exponent (> dim)")->capture_default_str();
  bounds->add_option("--r", cfg.r, "cutoffs")->capture_default_str();

  auto* ramsey = app.add_subcommand("ramsey", "dephasing profile CSV: t,C,err,gauss,bound_rhs");
  set_opts(ramsey);
  ramsey->add_option("--alpha", cfg.alpha, "coupling exponent (2 alpha > dim)")->capture_default_str();
  ramsey->add_option("--r", cfg.r, "inner cutoff")->capture_default_str()->expected(1);
  ramsey->add_option("--tmax", cfg.tmax, "largest time")->capture_default_str();
  ramsey->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  ramsey->add_option("--tol", cfg.tol, "largest admissible certified error")->capture_default_str();

  auto* spectra = app.add_subcommand("spectra", "cosine product CSV: t,C,err");
  spectra->add_option("--base", cfg.base, "integer base >= 2")->capture_default_str();
  spectra->add_option("--tmax", cfg.tmax, "largest time")->capture_default_str();
  spectra->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  spectra->add_option("--depth", cfg.depth, "fixed product depth (0: from --tol)")->capture_default_str();
  spectra->add_option("--tol", cfg.tol, "log-tail tolerance (default 1e-12)")->capture_default_str();
  spectra->add_option("--out", cfg.out, "output file (default stdout)");
  std::size_t cantor_n = 1000;
  auto* cantor = spectra->add_subcommand("cantor", "samples x, D(x), C(D(x))");
  cantor->add_option("--n", cantor_n, "number of samples")->capture_default_str();
  cantor->add_option("--depth", cfg.depth, "digit depth (0: 50)")->capture_default_str();
  cantor->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  cantor->add_option("--out", cfg.out, "output file (default stdout)");

  int kmax = 10;
  int nrange = 64;
  auto* basis = app.add_subcommand("basis", "orthonormality and Fourier report (JSON)");
  basis->add_option("--kmax", kmax, "largest theta index")->check(CLI::Range(1, 20))->capture_default_str();
  basis->add_option("--nrange", nrange, "Fourier modes |m| <= nrange")->capture_default_str();
  basis->add_option("--out", cfg.out, "output file (default stdout)");

  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_flag("--quick", cfg.quick, "smaller regions and grids");
  verify->add_option("--only", only, "check ids to run")->check(CLI::Range(1, 10));
  verify->add_option("--out", cfg.out, "JSON report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    for (auto* sub : {points, bounds, ramsey, spectra, basis, verify}) {
      if (sub->parsed()) cfg.command = sub->get_name();
    }
    if (cantor->parsed()) cfg.command = "spectra cantor";
    if (!save_config.empty()) {
      std::ofstream f(save_config);
      f << json(cfg).dump(2) << '\n';
    }
    if (points->parsed()) return run_points(cfg, points_format);
    if (bounds->parsed()) return run_bounds(cfg);
    if (ramsey->parsed()) return run_ramsey(cfg);
    if (cantor->parsed()) return run_cantor(cfg, cantor_n);
    if (spectra->parsed()) return run_spectra(cfg);
    if (basis->parsed()) return run_basis(cfg, kmax, nrange);
    if (verify->parsed()) return run_verify(cfg, only);
  } catch (const ToleranceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
