#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "heis/error.hpp"

namespace heis {

/// Ordered indices into a parameter grid; first and last are the grid ends.
struct Subdivision {
  std::vector<std::size_t> idx;

  std::size_t cells() const { return idx.empty() ? 0 : idx.size() - 1; }
};

/// The integer k with 2^{-k-1} <= h < 2^{-k}.
inline int dyadic_scale(double h) {
  require(h > 0.0 && std::isfinite(h), "dyadic_scale: h must be finite and > 0");
  int e = 0;
  std::frexp(h, &e);  // h = m 2^e with m in [0.5, 1)
  return -e;
}

inline void validate(const Subdivision& s, std::size_t grid_size) {
  require(s.idx.size() >= 2, "subdivision needs at least two points");
  require(s.idx.front() == 0 && s.idx.back() == grid_size - 1, "subdivision must start and end at the grid ends");
  for (std::size_t i = 1; i < s.idx.size(); ++i)
    require(s.idx[i] > s.idx[i - 1], "subdivision indices must be strictly increasing");
}

inline double mesh(const Subdivision& s, const std::vector<double>& grid) {
  double m = 0.0;
  for (std::size_t i = 1; i < s.idx.size(); ++i) m = std::max(m, grid[s.idx[i]] - grid[s.idx[i - 1]]);
  return m;
}

inline std::vector<double> increments(const Subdivision& s, const std::vector<double>& grid) {
  std::vector<double> d;
  d.reserve(s.cells());
  for (std::size_t i = 1; i < s.idx.size(); ++i) d.push_back(grid[s.idx[i]] - grid[s.idx[i - 1]]);
  return d;
}

inline Subdivision full_subdivision(std::size_t grid_size) {
  require(grid_size >= 2, "grid needs at least two points");
  Subdivision s;
  s.idx.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) s.idx[i] = i;
  return s;
}

/// Index of the grid point nearest to `value` (grid increasing).
inline std::size_t nearest_index(const std::vector<double>& grid, double value) {
  auto it = std::lower_bound(grid.begin(), grid.end(), value);
  if (it == grid.begin()) return 0;
  if (it == grid.end()) return grid.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  return (value - grid[hi - 1] <= grid[hi] - value) ? hi - 1 : hi;
}

/// Snap parameter values to grid indices, dropping duplicates and forcing the ends.
inline Subdivision snap_to_grid(const std::vector<double>& grid, const std::vector<double>& params) {
  Subdivision s;
  s.idx.push_back(0);
  for (double p : params) {
    const std::size_t k = nearest_index(grid, p);
    if (k > s.idx.back() && k < grid.size() - 1) s.idx.push_back(k);
  }
  if (grid.size() - 1 > s.idx.back()) s.idx.push_back(grid.size() - 1);
  return s;
}

/// `cells` parameter-uniform cells, snapped to the grid.
inline Subdivision uniform_subdivision(const std::vector<double>& grid, std::size_t cells) {
  require(cells >= 1, "uniform_subdivision: need at least one cell");
  const double a = grid.front(), b = grid.back();
  std::vector<double> params;
  for (std::size_t i = 1; i < cells; ++i) params.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(cells));
  return snap_to_grid(grid, params);
}

/// 2^level equal cells.
inline Subdivision dyadic_subdivision(const std::vector<double>& grid, int level) {
  require(level >= 0 && level < 31, "dyadic_subdivision: bad level");
  return uniform_subdivision(grid, std::size_t{1} << level);
}

/// Uniform double in [0,1) from 53 random bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random cells with lengths drawn in [mesh/2, mesh] (relative to the grid span).
inline Subdivision random_subdivision(const std::vector<double>& grid, double rel_mesh, std::mt19937_64& rng) {
  require(rel_mesh > 0.0, "random_subdivision: mesh must be > 0");
  const double a = grid.front(), b = grid.back(), L = b - a;
  std::vector<double> params;
  double p = a + L * rel_mesh * (0.5 + 0.5 * unit_uniform(rng)) * unit_uniform(rng);
  while (p < b - 0.25 * L * rel_mesh) {
    params.push_back(p);
    p += L * rel_mesh * (0.5 + 0.5 * unit_uniform(rng));
  }
  return snap_to_grid(grid, params);
}

/// Labelled family standing in for "all subdivisions of mesh about 2^-level".
struct SubdivisionFamily {
  std::vector<Subdivision> members;
  std::vector<std::string> labels;
};

inline SubdivisionFamily standard_family(const std::vector<double>& grid, int level, int random_count,
                                         std::uint64_t seed) {
  SubdivisionFamily fam;
  const std::size_t dy = std::size_t{1} << level;
  fam.members.push_back(dyadic_subdivision(grid, level));
  fam.labels.push_back("dyadic");
  fam.members.push_back(uniform_subdivision(grid, std::max<std::size_t>(1, dy + dy / 2)));
  fam.labels.push_back("uniform");
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(level + 1)));
  const double rel = std::ldexp(1.0, -level);
  for (int r = 0; r < random_count; ++r) {
    fam.members.push_back(random_subdivision(grid, rel, rng));
    fam.labels.push_back("random");
  }
  return fam;
}

}  // namespace heis
