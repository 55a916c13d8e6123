#pragma once

// Group law, dilations and the homogeneous max-norm metric on the
// first Heisenberg group, in exponential coordinates (x, y, z).

#include <algorithm>
#include <cmath>
#include <string>

#include "heis/error.hpp"

namespace heis {

struct HPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const HPoint&, const HPoint&) = default;
};

inline bool is_finite(const HPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

inline void check_finite(const HPoint& p, const char* who) {
  if (!is_finite(p)) throw DomainError(std::string(who) + ": non-finite coordinate");
}

/// (x,y,z)(x',y',z') = (x+x', y+y', z+z'+2(x'y - xy')).
inline HPoint group_mul(const HPoint& p, const HPoint& q) {
  check_finite(p, "group_mul");
  check_finite(q, "group_mul");
  return {p.x + q.x, p.y + q.y, p.z + q.z + 2.0 * (q.x * p.y - p.x * q.y)};
}

inline HPoint inverse(const HPoint& p) { return {-p.x, -p.y, -p.z}; }

inline HPoint dilate(double t, const HPoint& p) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("dilate: factor must be finite and > 0");
  check_finite(p, "dilate");
  return {t * p.x, t * p.y, t * t * p.z};
}

/// max{ sqrt(x^2 + y^2), |z|^(1/2) }
inline double rho_inf(const HPoint& p) {
  return std::max(std::hypot(p.x, p.y), std::sqrt(std::abs(p.z)));
}

/// Vertical coordinate of p^{-1} q, expanded so no intermediate point is formed.
/// Along a vertical curve ordered by increasing parameter this is the
/// positive "contact" quantity z(B) - z(A) - 2(x(B)y(A) - x(A)y(B)).
inline double contact_z(const HPoint& p, const HPoint& q) {
  return q.z - p.z - 2.0 * (q.x * p.y - p.x * q.y);
}

inline double horizontal_dist(const HPoint& p, const HPoint& q) {
  return std::hypot(q.x - p.x, q.y - p.y);
}

/// d(p, q) = rho(q^{-1} p); symmetric and left invariant.
inline double dist_inf(const HPoint& p, const HPoint& q) {
  check_finite(p, "dist_inf");
  check_finite(q, "dist_inf");
  return std::max(horizontal_dist(p, q), std::sqrt(std::abs(contact_z(p, q))));
}

/// Squared distance; the natural flat quasi-metric on vertical curves.
inline double dist_inf_sq(const HPoint& p, const HPoint& q) {
  const double dx = q.x - p.x, dy = q.y - p.y;
  return std::max(dx * dx + dy * dy, std::abs(contact_z(p, q)));
}

enum class ConeSign { Plus, Minus, Both };

struct ConeSpec {
  HPoint apex;
  double opening = 0.5;  ///< in (0, 1)
  double radius = 1.0;   ///< > 0
  ConeSign sign = ConeSign::Both;
};

inline void validate(const ConeSpec& c) {
  require(c.opening > 0.0 && c.opening < 1.0, "cone opening must lie in (0,1)");
  require(c.radius > 0.0, "cone radius must be > 0");
  check_finite(c.apex, "cone apex");
}

/// Horizontal offset at most opening * distance, distance below radius,
/// and the sign of z(apex^{-1} b) as requested. The apex itself is excluded
/// from the signed halves.
inline bool in_vertical_cone(const ConeSpec& c, const HPoint& b) {
  validate(c);
  const double d = dist_inf(c.apex, b);
  if (!(d < c.radius)) return false;
  if (horizontal_dist(c.apex, b) > c.opening * d) return false;
  const double zc = contact_z(c.apex, b);
  switch (c.sign) {
    case ConeSign::Plus: return zc > 0.0;
    case ConeSign::Minus: return zc < 0.0;
    case ConeSign::Both: return true;
  }
  return false;
}

/// Upper bound on diam(C^-(a) ∩ C^+(o)) when a lies in C^+(o).
inline double cone_intersection_diameter_bound(double dist_oa, double opening) {
  const double e2 = opening * opening;
  return 2.0 * dist_oa * (e2 + std::sqrt(1.0 + e2 * e2));
}

}  // namespace heis
