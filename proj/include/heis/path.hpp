#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/error.hpp"

namespace heis {

enum class PathKind { Planar, Heisenberg };

/// Ordered samples of a curve on a strictly increasing parameter grid.
/// Planar paths leave `z` empty.
struct SampledPath {
  PathKind kind = PathKind::Planar;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;

  std::size_t size() const { return t.size(); }
  bool planar() const { return kind == PathKind::Planar; }

  HPoint point(std::size_t i) const { return {x[i], y[i], planar() ? 0.0 : z[i]}; }

  void push_back(double ti, double xi, double yi) {
    t.push_back(ti);
    x.push_back(xi);
    y.push_back(yi);
  }
  void push_back(double ti, const HPoint& p) {
    t.push_back(ti);
    x.push_back(p.x);
    y.push_back(p.y);
    z.push_back(p.z);
  }
};

/// Scalar samples on a grid (one coordinate of a path, a Stieltjes integrand, ...).
struct ScalarPath {
  std::vector<double> t;
  std::vector<double> v;

  std::size_t size() const { return t.size(); }
};

inline void validate_grid(const std::vector<double>& t, const char* who) {
  if (t.empty()) throw DomainError(std::string(who) + ": empty grid");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) throw DomainError(std::string(who) + ": non-finite grid value");
    if (i > 0 && !(t[i] > t[i - 1]))
      throw DomainError(std::string(who) + ": grid not strictly increasing at index " + std::to_string(i));
  }
}

inline void validate(const SampledPath& p, const char* who = "path") {
  validate_grid(p.t, who);
  const std::size_t n = p.t.size();
  if (p.x.size() != n || p.y.size() != n)
    throw DomainError(std::string(who) + ": coordinate length differs from grid length");
  if (!p.planar() && p.z.size() != n)
    throw DomainError(std::string(who) + ": z length differs from grid length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.x[i]) || !std::isfinite(p.y[i]) || (!p.planar() && !std::isfinite(p.z[i])))
      throw DomainError(std::string(who) + ": non-finite value at index " + std::to_string(i));
  }
}

inline void validate(const ScalarPath& p, const char* who = "scalar path") {
  validate_grid(p.t, who);
  if (p.v.size() != p.t.size()) throw DomainError(std::string(who) + ": value length differs from grid length");
}

inline ScalarPath x_component(const SampledPath& p) { return {p.t, p.x}; }
inline ScalarPath y_component(const SampledPath& p) { return {p.t, p.y}; }

/// 2^k + 1 equispaced points on [a, b].
inline std::vector<double> dyadic_grid(int k, double a = 0.0, double b = 1.0) {
  require(k >= 0 && k <= 30, "dyadic_grid: level must be in [0,30]");
  const std::size_t n = (std::size_t{1} << k);
  std::vector<double> t(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) t[i] = a + h * static_cast<double>(i);
  t[n] = b;
  return t;
}

/// Restriction to the index window [i0, i1].
inline SampledPath slice(const SampledPath& p, std::size_t i0, std::size_t i1) {
  require(i0 <= i1 && i1 < p.size(), "slice: bad window");
  SampledPath out;
  out.kind = p.kind;
  out.t.assign(p.t.begin() + i0, p.t.begin() + i1 + 1);
  out.x.assign(p.x.begin() + i0, p.x.begin() + i1 + 1);
  out.y.assign(p.y.begin() + i0, p.y.begin() + i1 + 1);
  if (!p.planar()) out.z.assign(p.z.begin() + i0, p.z.begin() + i1 + 1);
  return out;
}

inline ScalarPath slice(const ScalarPath& p, std::size_t i0, std::size_t i1) {
  require(i0 <= i1 && i1 < p.size(), "slice: bad window");
  return {{p.t.begin() + i0, p.t.begin() + i1 + 1}, {p.v.begin() + i0, p.v.begin() + i1 + 1}};
}

}  // namespace heis
