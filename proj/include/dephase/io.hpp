#pragma once

// CSV and JSON serialisation for point sets, run configuration and
// tabular outputs. Numbers are written with 17 significant digits.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephase/numeric.hpp"
#include "dephase/pointsets.hpp"

#ifndef DEPHASE_VERSION
#define DEPHASE_VERSION "0.1.0"
#endif

namespace dephase {

inline constexpr const char* kVersion = DEPHASE_VERSION;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Point sets

inline void write_points_csv(std::ostream& os, const PointSet& ps) {
  for (int k = 1; k <= ps.dim(); ++k) os << (k > 1 ? "," : "") << 'x' << k;
  os << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    for (int k = 0; k < ps.dim(); ++k) os << (k > 0 ? "," : "") << format_double(p[k]);
    os << '\n';
  }
}

/// Reads the CSV form back; the file carries no region, so it is supplied.
inline PointSet read_points_csv(std::istream& is, double region_radius, GenerationMeta meta = {}) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("points csv: missing header");
  const int dim = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> coords;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        coords.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument("points csv: bad number '" + cell + "'");
      }
      ++n;
    }
    if (n != dim) throw InvalidArgument("points csv: row width does not match header");
  }
  return PointSet(dim, std::move(coords), region_radius, meta);
}

inline nlohmann::json meta_to_json(const GenerationMeta& m) {
  return {{"kind", to_string(m.kind)},
          {"jitter", m.jitter},
          {"r_min", m.r_min},
          {"probe_spacing", m.probe_spacing},
          {"seed", m.seed}};
}

inline GenerationMeta meta_from_json(const nlohmann::json& j) {
  GenerationMeta m;
  m.kind = set_kind_from_string(j.at("kind").get<std::string>());
  m.jitter = j.value("jitter", 0.0);
  m.r_min = j.value("r_min", 0.0);
  m.probe_spacing = j.value("probe_spacing", 0.0);
  m.seed = j.value("seed", std::uint64_t{0});
  return m;
}

inline nlohmann::json points_to_json(const PointSet& ps) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto p = ps.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  return {{"dim", ps.dim()}, {"region_radius", ps.region_radius()}, {"meta", meta_to_json(ps.meta())}, {"points", pts}};
}

inline PointSet points_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<double> coords;
  for (const auto& p : j.at("points")) {
    if (static_cast<int>(p.size()) != dim) throw InvalidArgument("points json: point width does not match dim");
    for (const auto& x : p) coords.push_back(x.get<double>());
  }
  return PointSet(dim, std::move(coords), j.at("region_radius").get<double>(), meta_from_json(j.at("meta")));
}

// ---------------------------------------------------------------------------
// Run configuration

/// Parameters for every subcommand; unused fields keep their defaults.
struct RunConfig {
  std::string command;
  int dim = 1;
  double alpha = 1.0;
  std::vector<double> r = {10.0};
  double rmax = 1000.0;
  double tmax = 8.0;
  double dt = 0.01;
  double tol = 1e-6;
  std::string set = "lattice";
  std::uint64_t seed = 1;
  double jitter = 0.25;
  double r_min = 1.0;
  double margin = 0.0;
  double probe_spacing = 0.05;
  int base = 3;
  int depth = 0;  // 0: depth chosen from tol
  bool quick = false;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"command", c.command}, {"dim", c.dim},       {"alpha", c.alpha},   {"r", c.r},
       {"rmax", c.rmax},       {"tmax", c.tmax},     {"dt", c.dt},         {"tol", c.tol},
       {"set", c.set},         {"seed", c.seed},     {"jitter", c.jitter}, {"r_min", c.r_min},
       {"margin", c.margin},   {"probe_spacing", c.probe_spacing},         {"base", c.base},
       {"depth", c.depth},     {"quick", c.quick},   {"out", c.out}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
  const RunConfig d;
  c.command = j.value("command", d.command);
  c.dim = j.value("dim", d.dim);
  c.alpha = j.value("alpha", d.alpha);
  c.r = j.value("r", d.r);
  c.rmax = j.value("rmax", d.rmax);
  c.tmax = j.value("tmax", d.tmax);
  c.dt = j.value("dt", d.dt);
  c.tol = j.value("tol", d.tol);
  c.set = j.value("set", d.set);
  c.seed = j.value("seed", d.seed);
  c.jitter = j.value("jitter", d.jitter);
  c.r_min = j.value("r_min", d.r_min);
  c.margin = j.value("margin", d.margin);
  c.probe_spacing = j.value("probe_spacing", d.probe_spacing);
  c.base = j.value("base", d.base);
  c.depth = j.value("depth", d.depth);
  c.quick = j.value("quick", d.quick);
  c.out = j.value("out", d.out);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config file " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Tables

/// Header row plus rows of numbers.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw InvalidArgument("CsvTable: row width does not match header");
    rows_.push_back(row);
  }

  void write(std::ostream& os) const {
    for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << header_[k];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
      os << '\n';
    }
  }

  [[nodiscard]] std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Sidecar written next to every output file.
inline nlohmann::json sidecar(const RunConfig& cfg, const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = {{"version", kVersion}, {"config", cfg}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

}  // namespace dephase
