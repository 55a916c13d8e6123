#pragma once

// Whitney-ratio and vertical Reifenberg flatness profiles of finite point
// clouds, and the dyadic midpoint parametrization of flat clouds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/measure.hpp"

namespace heis {

struct PointCloud {
  std::vector<HPoint> points;
  double r_min = 0.0;  ///< 0 selects 4x the largest nearest-neighbour spacing
  double r_max = 0.0;  ///< 0 selects half the cloud diameter

  std::size_t size() const { return points.size(); }
};

inline void validate(const PointCloud& c) {
  require(!c.points.empty(), "point cloud is empty");
  for (const auto& p : c.points) check_finite(p, "point cloud");
}

inline PointCloud cloud_from_path(const SampledPath& p) {
  validate(p, "cloud_from_path");
  PointCloud c;
  for (std::size_t i = 0; i < p.size(); ++i) c.points.push_back(p.point(i));
  return c;
}

/// Largest nearest-neighbour distance; the finite-sample scale floor is four times this.
inline double nearest_neighbour_spacing(const PointCloud& c) {
  validate(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.size(); ++j)
      if (j != i) {
        const double d = dist_inf(c.points[i], c.points[j]);
        if (d > 0.0) best = std::min(best, d);
      }
    if (std::isfinite(best)) worst = std::max(worst, best);
  }
  return worst;
}

inline double cloud_diameter(const PointCloud& c) {
  double d = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) d = std::max(d, dist_inf(c.points[i], c.points[j]));
  return d;
}

struct ScaleRange {
  double lo = 0.0;
  double hi = 0.0;
};

inline ScaleRange working_scales(const PointCloud& c) {
  ScaleRange r{c.r_min, c.r_max};
  if (!(r.lo > 0.0)) r.lo = 4.0 * nearest_neighbour_spacing(c);
  if (!(r.hi > 0.0)) r.hi = 0.5 * cloud_diameter(c);
  return r;
}

// -------------------------------------------------------------- Whitney

struct WhitneyProfile {
  ScaleProfile ratio;             ///< per dyadic d_inf bucket, max |pi(B)-pi(A)| / d_inf(A,B)
  std::size_t coincident = 0;     ///< pairs skipped at zero distance
};

inline WhitneyProfile whitney_profile(const PointCloud& c) {
  validate(c);
  require(c.size() >= 2, "whitney_profile: needs at least two points");
  std::map<int, std::pair<double, std::size_t>> buckets;
  WhitneyProfile out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = dist_inf(c.points[i], c.points[j]);
      if (!(d > 0.0)) {
        ++out.coincident;
        continue;
      }
      detail::bump(buckets, log2_bucket(d), horizontal_dist(c.points[i], c.points[j]) / d);
    }
  out.ratio = detail::to_profile(buckets);
  return out;
}

// -------------------------------------------------- Reifenberg flatness

struct EpsilonOptions {
  std::vector<double> scales;          ///< empty: dyadic scales across the working range
  std::vector<std::size_t> bases;      ///< empty: every point (thinned by max_bases)
  std::size_t max_bases = 512;
  int segment_resolution = 64;         ///< vertical segment sampled at r / resolution
};

struct EpsilonProfile {
  std::vector<double> r;
  std::vector<double> epsilon;         ///< NaN marks an unsampled scale
  std::vector<std::size_t> sampled;    ///< bases with at least one other point in the ball
};

/// Two-sided Hausdorff distance between E ∩ B(A, r) and the vertical segment
/// {A (0,0,s) : |s| <= r^2}, divided by r. The segment side is sampled at
/// d_inf-radius steps of r / resolution.
inline double flatness_at(const PointCloud& c, std::size_t base, double r, int resolution,
                          std::size_t* neighbours = nullptr) {
  const HPoint& A = c.points[base];
  std::vector<std::pair<double, double>> ball;  // (horizontal offset, contact z)
  for (const auto& B : c.points) {
    if (dist_inf(A, B) <= r) ball.emplace_back(horizontal_dist(A, B), contact_z(A, B));
  }
  if (neighbours) *neighbours = ball.size() - 1;
  double e_to_z = 0.0;
  for (const auto& [h, z] : ball) e_to_z = std::max(e_to_z, h);  // |z| <= r^2 inside the ball
  double z_to_e = 0.0;
  for (int j = -resolution; j <= resolution; ++j) {
    const double u = r * static_cast<double>(j) / resolution;
    const double s = u * std::abs(u);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [h, z] : ball) best = std::min(best, std::max(h, std::sqrt(std::abs(z - s))));
    z_to_e = std::max(z_to_e, best);
  }
  return std::max(e_to_z, z_to_e) / r;
}

inline EpsilonProfile reifenberg_epsilon(const PointCloud& c, const EpsilonOptions& opt = {}) {
  validate(c);
  require(c.size() >= 2, "reifenberg_epsilon: needs at least two points");
  std::vector<double> scales = opt.scales;
  if (scales.empty()) {
    const ScaleRange w = working_scales(c);
    for (double r = w.hi; r >= w.lo; r *= 0.5) scales.push_back(r);
    std::reverse(scales.begin(), scales.end());
  }
  std::vector<std::size_t> bases = opt.bases;
  if (bases.empty())
    for (std::size_t i = 0; i < c.size(); ++i) bases.push_back(i);
  if (bases.size() > opt.max_bases) {
    std::vector<std::size_t> thin;
    const double step = static_cast<double>(bases.size()) / static_cast<double>(opt.max_bases);
    for (std::size_t k = 0; k < opt.max_bases; ++k) thin.push_back(bases[static_cast<std::size_t>(k * step)]);
    bases.swap(thin);
  }
  EpsilonProfile out;
  for (double r : scales) {
    double worst = 0.0;
    std::size_t sampled = 0;
    for (std::size_t b : bases) {
      std::size_t nb = 0;
      const double e = flatness_at(c, b, r, opt.segment_resolution, &nb);
      if (nb == 0) continue;
      ++sampled;
      worst = std::max(worst, e);
    }
    out.r.push_back(r);
    out.epsilon.push_back(sampled ? worst : std::numeric_limits<double>::quiet_NaN());
    out.sampled.push_back(sampled);
  }
  return out;
}

// ------------------------------------------------------ parametrization

/// 2^{-1/2} (eps^2 + sqrt(1 + eps^2 + eps^4)).
inline double chord_decay_constant(double eps) {
  const double e2 = eps * eps;
  return (e2 + std::sqrt(1.0 + e2 + e2 * e2)) / std::sqrt(2.0);
}

struct ParametrizeOptions {
  std::optional<std::size_t> origin;  ///< default: lowest z
  std::optional<std::size_t> end;     ///< default: highest z
  int max_levels = 30;
  double scale_floor = 0.0;           ///< 0 selects 4x nearest-neighbour spacing
  double tol = 0.05;
};

struct ParametrizeResult {
  std::vector<std::vector<std::size_t>> levels;  ///< cloud indices, level n has 2^n + 1 points
  std::vector<double> max_chord;
  double decay = 0.0;           ///< c(eps)
  double base_distance = 0.0;   ///< d_inf(O, A)
  bool ok = true;               ///< every level refined without failure
  bool certificate = true;      ///< chord decay and level ratios hold
  bool injective = true;
  bool ordered = true;          ///< z(P^{-1} Q) > 0 along each level
  bool cones_coherent = true;   ///< each new point lies in C+(prev) ∩ C-(next)
  int failed_level = -1;
  std::size_t failed_cell = 0;
  std::string message;
};

inline ParametrizeResult dyadic_parametrize(const PointCloud& c, double eps, const ParametrizeOptions& opt = {}) {
  validate(c);
  if (!(eps > 0.0) || eps > 0.5) throw DomainError("dyadic_parametrize: eps must lie in (0, 0.5]");
  require(c.size() >= 2, "dyadic_parametrize: needs at least two points");
  const auto& P = c.points;
  ParametrizeResult res;
  res.decay = chord_decay_constant(eps);
  std::size_t O = 0, A = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i].z < P[O].z) O = i;
    if (P[i].z > P[A].z) A = i;
  }
  if (opt.origin) O = *opt.origin;
  if (opt.end) A = *opt.end;
  require(O < P.size() && A < P.size() && O != A, "dyadic_parametrize: bad endpoints");
  res.base_distance = dist_inf(P[O], P[A]);
  const double floor = opt.scale_floor > 0.0 ? opt.scale_floor : 4.0 * nearest_neighbour_spacing(c);

  ConeSpec up{P[O], eps, std::numeric_limits<double>::max(), ConeSign::Plus};
  if (!in_vertical_cone(up, P[A])) {
    res.ok = false;
    res.failed_level = 0;
    res.message = "end point is not in the upper cone of the origin";
    return res;
  }
  res.levels.push_back({O, A});
  res.max_chord.push_back(res.base_distance);

  for (int n = 0; n < opt.max_levels; ++n) {
    const auto& cur = res.levels.back();
    double min_chord = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < cur.size(); ++k) min_chord = std::min(min_chord, dist_inf(P[cur[k]], P[cur[k + 1]]));
    if (min_chord / std::sqrt(2.0) < floor) break;
    std::vector<std::size_t> next;
    next.reserve(2 * cur.size());
    for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
      const HPoint& prev = P[cur[k]];
      const HPoint& nxt = P[cur[k + 1]];
      const double r1 = dist_inf(prev, nxt) / std::sqrt(2.0);
      const HPoint ideal = group_mul(prev, {0.0, 0.0, r1 * r1});
      const ConeSpec lower_of_prev{prev, eps, std::numeric_limits<double>::max(), ConeSign::Plus};
      const ConeSpec upper_of_next{nxt, eps, std::numeric_limits<double>::max(), ConeSign::Minus};
      std::size_t pick = P.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = dist_inf(P[i], ideal);
        if (d > eps * r1 || !(d < best)) continue;
        if (!in_vertical_cone(lower_of_prev, P[i]) || !in_vertical_cone(upper_of_next, P[i])) continue;
        best = d;
        pick = i;
      }
      if (pick == P.size()) {
        res.ok = false;
        res.failed_level = n + 1;
        res.failed_cell = k;
        res.message = "no midpoint within eps r1 of the ideal point in cell " + std::to_string(k) + " at level " +
                      std::to_string(n + 1);
        break;
      }
      next.push_back(cur[k]);
      next.push_back(pick);
    }
    if (!res.ok) break;
    next.push_back(cur.back());
    double mc = 0.0;
    for (std::size_t k = 0; k + 1 < next.size(); ++k) mc = std::max(mc, dist_inf(P[next[k]], P[next[k + 1]]));
    res.levels.push_back(std::move(next));
    res.max_chord.push_back(mc);
  }

  for (std::size_t n = 0; n < res.levels.size(); ++n) {
    const auto& lev = res.levels[n];
    if (res.max_chord[n] > std::pow(res.decay, static_cast<double>(n)) * res.base_distance * (1.0 + opt.tol))
      res.certificate = false;
    if (n > 0 && res.max_chord[n] > res.decay * res.max_chord[n - 1] * (1.0 + opt.tol)) res.certificate = false;
    std::vector<std::size_t> sorted = lev;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) res.injective = false;
    for (std::size_t k = 0; k + 1 < lev.size(); ++k)
      if (!(contact_z(P[lev[k]], P[lev[k + 1]]) > 0.0)) res.ordered = false;
    if (n > 0)
      for (std::size_t k = 1; k + 1 < lev.size(); k += 2) {
        const ConeSpec up_prev{P[lev[k - 1]], eps, std::numeric_limits<double>::max(), ConeSign::Plus};
        const ConeSpec down_next{P[lev[k + 1]], eps, std::numeric_limits<double>::max(), ConeSign::Minus};
        if (!in_vertical_cone(up_prev, P[lev[k]]) || !in_vertical_cone(down_next, P[lev[k]])) res.cones_coherent = false;
      }
  }
  return res;
}

}  // namespace heis
