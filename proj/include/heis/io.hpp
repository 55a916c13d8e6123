#pragma once

// CSV and JSON serialization for paths, reports, chains and sampled fields.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heis/error.hpp"
#include "heis/measure.hpp"
#include "heis/path.hpp"
#include "heis/reifenberg.hpp"
#include "heis/surfaces.hpp"

namespace heis {

using json = nlohmann::json;

/// Shortest-safe 17 significant digits; round-trips every double.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw DomainError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline std::vector<std::vector<double>> read_table(std::istream& in, const std::vector<std::vector<std::string>>& headers,
                                                   std::size_t& which) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("csv: empty input");
  const auto head = split_csv(line);
  which = headers.size();
  for (std::size_t h = 0; h < headers.size(); ++h)
    if (head == headers[h]) which = h;
  if (which == headers.size()) throw DomainError("csv: unexpected header '" + line + "'");
  std::vector<std::vector<double>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != head.size()) throw DomainError("csv line " + std::to_string(n) + ": wrong column count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, n));
    rows.push_back(std::move(row));
  }
  return rows;
}
}  // namespace detail

// ------------------------------------------------------------- paths

inline void write_path_csv(std::ostream& out, const SampledPath& p) {
  validate(p, "write_path_csv");
  out << (p.planar() ? "t,x,y\n" : "t,x,y,z\n");
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << fmt17(p.t[i]) << ',' << fmt17(p.x[i]) << ',' << fmt17(p.y[i]);
    if (!p.planar()) out << ',' << fmt17(p.z[i]);
    out << '\n';
  }
}

inline SampledPath read_path_csv(std::istream& in) {
  std::size_t which = 0;
  const auto rows = detail::read_table(in, {{"t", "x", "y"}, {"t", "x", "y", "z"}}, which);
  SampledPath p;
  p.kind = which == 0 ? PathKind::Planar : PathKind::Heisenberg;
  for (const auto& r : rows) {
    if (p.planar())
      p.push_back(r[0], r[1], r[2]);
    else
      p.push_back(r[0], {r[1], r[2], r[3]});
  }
  validate(p, "read_path_csv");
  return p;
}

inline json path_to_json(const SampledPath& p) {
  json j{{"kind", p.planar() ? "planar" : "heisenberg"}, {"t", p.t}, {"x", p.x}, {"y", p.y}};
  if (!p.planar()) j["z"] = p.z;
  return j;
}

inline SampledPath path_from_json(const json& j) {
  SampledPath p;
  try {
    p.kind = j.at("kind").get<std::string>() == "planar" ? PathKind::Planar : PathKind::Heisenberg;
    p.t = j.at("t").get<std::vector<double>>();
    p.x = j.at("x").get<std::vector<double>>();
    p.y = j.at("y").get<std::vector<double>>();
    if (!p.planar()) p.z = j.at("z").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DomainError(std::string("path json: ") + e.what());
  }
  validate(p, "path_from_json");
  return p;
}

// ----------------------------------------------------------- reports

inline json to_json(const AreaReport& r) {
  json j{{"mesh", r.mesh},       {"estimate", r.estimate},         {"verdict", to_string(r.verdict)},
         {"level", r.level},     {"spread", r.spread},             {"argmin", r.argmin},
         {"family", r.family}};
  j["extrapolated"] = std::isfinite(r.extrapolated) ? json(r.extrapolated) : json("inf");
  if (!r.vertical_term.empty()) {
    j["vertical_term"] = r.vertical_term;
    j["levy_term"] = r.levy_term;
  }
  return j;
}

inline json to_json(const ScaleProfile& p) {
  return {{"scale", p.scale_lo}, {"value", p.value}, {"count", p.count}};
}

namespace detail {
inline json nan_as_null(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}
}  // namespace detail

/// {"r":[...],"epsilon":[...],"whitney":[...]}; whitney values sit on their own
/// distance buckets listed under "whitney_r".
inline json profile_json(const EpsilonProfile& eps, const WhitneyProfile& w) {
  return {{"r", eps.r},
          {"epsilon", detail::nan_as_null(eps.epsilon)},
          {"sampled", eps.sampled},
          {"whitney", w.ratio.value},
          {"whitney_r", w.ratio.scale_lo},
          {"coincident", w.coincident}};
}

inline void write_chain_csv(std::ostream& out, const PointCloud& c, const ParametrizeResult& r) {
  out << "level,idx,x,y,z\n";
  for (std::size_t n = 0; n < r.levels.size(); ++n)
    for (std::size_t i : r.levels[n]) {
      const HPoint& p = c.points[i];
      out << n << ',' << i << ',' << fmt17(p.x) << ',' << fmt17(p.y) << ',' << fmt17(p.z) << '\n';
    }
}

inline json to_json(const ParametrizeResult& r) {
  json j{{"levels", r.levels.size()},     {"max_chord", r.max_chord},   {"decay", r.decay},
         {"base_distance", r.base_distance}, {"ok", r.ok},              {"certificate", r.certificate},
         {"injective", r.injective},       {"ordered", r.ordered},       {"cones_coherent", r.cones_coherent}};
  if (!r.ok) {
    j["failed_level"] = r.failed_level;
    j["failed_cell"] = r.failed_cell;
    j["message"] = r.message;
  }
  return j;
}

inline json to_json(const CoareaReport& r) {
  json boxes = json::array();
  for (const auto& b : r.boxes)
    boxes.push_back({{"box", {b.box.x0, b.box.x1, b.box.y0, b.box.y1, b.box.z0, b.box.z1}},
                     {"lhs", b.lhs},
                     {"rhs", b.rhs},
                     {"ratio", b.ratio},
                     {"coverage", b.coverage},
                     {"failed", b.failed}});
  return {{"map", r.label}, {"boxes", boxes}, {"spread", r.spread}};
}

// ------------------------------------------------------------ fields

/// phi sampled on a rectangular (y,z) grid, bilinear in between, clamped at the edges.
struct TabulatedField {
  std::vector<double> ys, zs;
  std::vector<double> values;  ///< row-major in y

  double operator()(double y, double z) const {
    auto locate = [](const std::vector<double>& g, double v, std::size_t& i, double& u) {
      if (g.size() == 1) {
        i = 0;
        u = 0.0;
        return;
      }
      v = std::clamp(v, g.front(), g.back());
      i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), v) - g.begin());
      i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
      u = (v - g[i]) / (g[i + 1] - g[i]);
    };
    std::size_t i = 0, j = 0;
    double u = 0.0, w = 0.0;
    locate(ys, y, i, u);
    locate(zs, z, j, w);
    const std::size_t nz = zs.size();
    auto at = [&](std::size_t a, std::size_t b) { return values[std::min(a, ys.size() - 1) * nz + std::min(b, nz - 1)]; };
    return (1 - u) * (1 - w) * at(i, j) + u * (1 - w) * at(i + 1, j) + (1 - u) * w * at(i, j + 1) + u * w * at(i + 1, j + 1);
  }
};

inline TabulatedField read_field_csv(std::istream& in) {
  std::size_t which = 0;
  const auto rows = detail::read_table(in, {{"y", "z", "phi"}}, which);
  require(!rows.empty(), "field csv: no samples");
  TabulatedField f;
  for (const auto& r : rows) {
    f.ys.push_back(r[0]);
    f.zs.push_back(r[1]);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(f.ys);
  uniq(f.zs);
  require(f.ys.size() * f.zs.size() == rows.size(), "field csv: samples do not form a full grid");
  f.values.assign(rows.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(std::lower_bound(f.ys.begin(), f.ys.end(), r[0]) - f.ys.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(f.zs.begin(), f.zs.end(), r[1]) - f.zs.begin());
    f.values[i * f.zs.size() + j] = r[2];
  }
  for (double v : f.values) require(std::isfinite(v), "field csv: duplicate or non-finite sample");
  return f;
}

}  // namespace heis
