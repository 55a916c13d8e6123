#pragma once

// Flat quasi-metric diagnostics along sampled curves: flatness modulus,
// area-formula Hausdorff estimates, bisection dimension, diameter ratios,
// and a box-counting dimension for planar polylines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "heis/core.hpp"
#include "heis/path.hpp"
#include "heis/stieltjes.hpp"
#include "heis/subdivision.hpp"
#include "heis/summation.hpp"

namespace heis {

/// A quasi-metric along a sampled curve. `on_index` is used for grid scans,
/// `on_param` for bisection at arbitrary parameters.
struct QuasiMetricCurve {
  std::vector<double> grid;
  std::function<double(std::size_t, std::size_t)> on_index;
  std::function<double(double, double)> on_param;
  const SampledPath* base = nullptr;  ///< set for Heisenberg curves (decomposition report)
  std::string label;

  std::size_t size() const { return grid.size(); }
};

namespace detail {
/// Piecewise-linear interpolation of a path at parameter s.
inline HPoint interpolate(const SampledPath& p, double s) {
  const auto& t = p.t;
  if (s <= t.front()) return p.point(0);
  if (s >= t.back()) return p.point(p.size() - 1);
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), s) - t.begin());
  const std::size_t i = j - 1;
  const double u = (s - t[i]) / (t[j] - t[i]);
  const HPoint a = p.point(i), b = p.point(j);
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), a.z + u * (b.z - a.z)};
}
}  // namespace detail

/// kappa = d_inf^2 along a Heisenberg path. The path must outlive the curve.
inline QuasiMetricCurve kappa_dinf2(const SampledPath& p) {
  validate(p, "kappa_dinf2");
  require(!p.planar(), "kappa_dinf2: needs a Heisenberg path");
  QuasiMetricCurve c;
  c.grid = p.t;
  c.on_index = [&p](std::size_t i, std::size_t j) { return dist_inf_sq(p.point(i), p.point(j)); };
  c.on_param = [&p](double s, double t) { return dist_inf_sq(detail::interpolate(p, s), detail::interpolate(p, t)); };
  c.base = &p;
  c.label = "dinf2";
  return c;
}

/// kappa = |z(A^{-1}B)| along a Heisenberg path.
inline QuasiMetricCurve kappa_contact(const SampledPath& p) {
  validate(p, "kappa_contact");
  require(!p.planar(), "kappa_contact: needs a Heisenberg path");
  QuasiMetricCurve c;
  c.grid = p.t;
  c.on_index = [&p](std::size_t i, std::size_t j) { return std::abs(contact_z(p.point(i), p.point(j))); };
  c.on_param = [&p](double s, double t) {
    return std::abs(contact_z(detail::interpolate(p, s), detail::interpolate(p, t)));
  };
  c.base = &p;
  c.label = "contact";
  return c;
}

/// kappa(s, t) = scale |t - s| on a grid.
inline QuasiMetricCurve kappa_parameter(std::vector<double> grid, double scale = 1.0) {
  validate_grid(grid, "kappa_parameter");
  QuasiMetricCurve c;
  c.grid = grid;
  c.on_index = [grid = std::move(grid), scale](std::size_t i, std::size_t j) {
    return scale * std::abs(grid[j] - grid[i]);
  };
  c.on_param = [scale](double s, double t) { return scale * std::abs(t - s); };
  c.label = "parameter";
  return c;
}

/// Bucket index floor(log2 v) for v > 0.
inline int log2_bucket(double v) {
  int e = 0;
  std::frexp(v, &e);
  return e - 1;  // v in [2^{e-1}, 2^e)
}

// ----------------------------------------------------------- flatness

struct ScaleProfile {
  std::vector<double> scale_lo;   ///< bucket lower edge (bucket is [lo, 2 lo))
  std::vector<double> value;      ///< max ratio seen in the bucket
  std::vector<std::size_t> count; ///< samples in the bucket

  std::size_t size() const { return value.size(); }

  /// Smallest nondecreasing majorant read from the finest scale upward.
  std::vector<double> envelope() const {
    std::vector<double> e(value);
    for (std::size_t i = 1; i < e.size(); ++i) e[i] = std::max(e[i], e[i - 1]);
    return e;
  }
};

namespace detail {
inline ScaleProfile to_profile(const std::map<int, std::pair<double, std::size_t>>& buckets) {
  ScaleProfile p;
  for (const auto& [b, v] : buckets) {
    p.scale_lo.push_back(std::ldexp(1.0, b));
    p.value.push_back(v.first);
    p.count.push_back(v.second);
  }
  return p;
}

inline void bump(std::map<int, std::pair<double, std::size_t>>& buckets, int b, double v) {
  auto& slot = buckets[b];
  slot.first = std::max(slot.first, v);
  slot.second += 1;
}
}  // namespace detail

struct FlatnessOptions {
  std::size_t bases_per_gap = 512;   ///< triple starts per index gap
  std::size_t middles = 15;          ///< interior points tried per (A, C)
};

/// Per dyadic bucket of kappa(A, C), the max over sampled triples A <= B <= C of
/// |kappa(A,B) + kappa(B,C) - kappa(A,C)| / kappa(A,C). Scales ascend.
inline ScaleProfile flatness_modulus(const QuasiMetricCurve& c, const FlatnessOptions& opt = {}) {
  const std::size_t n = c.size();
  require(n >= 3, "flatness_modulus: needs at least 3 grid points");
  std::map<int, std::pair<double, std::size_t>> buckets;
  bool any_positive = false;
  std::vector<std::size_t> gaps;
  for (std::size_t g = 2; g < n; g *= 2) {
    gaps.push_back(g);
    if (g + g / 2 < n) gaps.push_back(g + g / 2);
  }
  for (std::size_t G : gaps) {
    const std::size_t starts = n - G;
    const std::size_t stride = std::max<std::size_t>(1, starts / opt.bases_per_gap);
    for (std::size_t a = 0; a < starts; a += stride) {
      const std::size_t cc = a + G;
      const double kac = c.on_index(a, cc);
      if (!(kac > 0.0)) continue;
      any_positive = true;
      const std::size_t m = std::min(opt.middles, G - 1);
      double worst = 0.0;
      for (std::size_t q = 1; q <= m; ++q) {
        const std::size_t b = a + (G * q) / (m + 1);
        if (b <= a || b >= cc) continue;
        worst = std::max(worst, std::abs(c.on_index(a, b) + c.on_index(b, cc) - kac) / kac);
      }
      detail::bump(buckets, log2_bucket(kac), worst);
    }
  }
  if (!any_positive) throw DomainError("flatness_modulus: degenerate curve (kappa vanishes identically)");
  return detail::to_profile(buckets);
}

// ------------------------------------------------------ area estimates

enum class Verdict { Convergent, Divergent, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct AreaOptions {
  int min_level = 0;
  int max_level = 10;
  int random_count = 32;
  std::uint64_t seed = 1;
  double ceiling = std::numeric_limits<double>::infinity();
  double growth_factor = 1.5;
  int window = 3;
  double plateau_tol = 1e-3;     ///< relative increment below which a step is a plateau
  double converge_tol = 2e-2;    ///< relative increment accepted as converged
};

struct AreaReport {
  std::vector<int> level;
  std::vector<double> mesh;
  std::vector<double> estimate;       ///< family minimum of sum kappa
  std::vector<double> spread;         ///< family max - min
  std::vector<std::string> argmin;    ///< family member attaining the minimum
  std::vector<double> vertical_term;  ///< z(end) - z(start) (Heisenberg curves)
  std::vector<double> levy_term;      ///< Levy area over the minimizing subdivision
  double extrapolated = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string family = "dyadic+uniform+random";
};

/// Verdict rules on a level sequence e_0..e_m:
///  divergent   the last `window` steps all increase by more than plateau_tol
///              (relative) and the sequence has grown by growth_factor over its
///              first value or passed the ceiling;
///  convergent  the last `window` steps are all nonincreasing (a decreasing
///              sequence of nonnegative sums) or all below converge_tol;
///  otherwise inconclusive.
inline Verdict classify_levels(const std::vector<double>& e, const AreaOptions& opt) {
  const int m = static_cast<int>(e.size()) - 1;
  if (m < opt.window) return Verdict::Inconclusive;
  bool rising = true, falling = true, small = true;
  for (int k = m - opt.window + 1; k <= m; ++k) {
    const double d = e[k] - e[k - 1];
    const double ref = std::max(std::abs(e[k]), 1e-300);
    if (!(d > opt.plateau_tol * ref)) rising = false;
    if (d > 0.0) falling = false;
    if (std::abs(d) > opt.converge_tol * ref) small = false;
  }
  if (rising && (e[m] >= opt.growth_factor * e[0] || e[m] > opt.ceiling)) return Verdict::Divergent;
  if (falling || small) return Verdict::Convergent;
  return Verdict::Inconclusive;
}

inline double extrapolate_levels(const std::vector<double>& e, Verdict v) {
  if (e.empty()) return 0.0;
  if (v == Verdict::Divergent) return std::numeric_limits<double>::infinity();
  if (e.size() < 3) return e.back();
  const double d1 = e[e.size() - 1] - e[e.size() - 2], d0 = e[e.size() - 2] - e[e.size() - 3];
  if (d0 == 0.0) return e.back();
  const double q = d1 / d0;
  if (q > 0.0 && q < 0.95) return e.back() + d1 * q / (1.0 - q);
  return e.back();
}

inline double kappa_sum(const QuasiMetricCurve& c, const Subdivision& s) {
  return pairwise_sum(0, s.cells(), [&](std::size_t i) { return c.on_index(s.idx[i], s.idx[i + 1]); });
}

/// Per mesh level 2^-k of the parameter span, the minimum of sum kappa over the
/// standard subdivision family, plus a verdict on the level sequence.
inline AreaReport hausdorff_area(const QuasiMetricCurve& c, const AreaOptions& opt = {}) {
  require(c.size() >= 2, "hausdorff_area: needs at least two points");
  require(opt.min_level >= 0 && opt.min_level <= opt.max_level, "hausdorff_area: bad level range");
  const double span = c.grid.back() - c.grid.front();
  AreaReport r;
  for (int k = opt.min_level; k <= opt.max_level; ++k) {
    const SubdivisionFamily fam = standard_family(c.grid, k, opt.random_count, opt.seed);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t best = 0;
    for (std::size_t m = 0; m < fam.members.size(); ++m) {
      const double v = kappa_sum(c, fam.members[m]);
      if (v < lo) {
        lo = v;
        best = m;
      }
      hi = std::max(hi, v);
    }
    r.level.push_back(k);
    r.mesh.push_back(std::ldexp(span, -k));
    r.estimate.push_back(lo);
    r.spread.push_back(hi - lo);
    r.argmin.push_back(fam.labels[best]);
    if (c.base != nullptr && !c.base->planar()) {
      const SampledPath& p = *c.base;
      r.vertical_term.push_back(p.z.back() - p.z.front());
      r.levy_term.push_back(levy_area(p, fam.members[best]));
    }
  }
  r.verdict = classify_levels(r.estimate, opt);
  r.extrapolated = extrapolate_levels(r.estimate, r.verdict);
  return r;
}

// ------------------------------------------------------------ bisection

struct BisectionInterval {
  double a = 0.0, b = 0.0;
  double kappa = 0.0;
};

struct BisectionFamily {
  std::vector<std::vector<BisectionInterval>> levels;
  std::vector<double> longest;   ///< L_k
  std::vector<double> shortest;  ///< l_k
  std::vector<double> flatness;  ///< measured m_k at level k
  bool envelope_ok = true;       ///< L_0 2^-n prod(1-m_k) <= l_n <= L_n <= L_0 2^-n prod(1+m_k)
};

struct DimensionReport {
  BisectionFamily family;
  double dimension = 0.0;  ///< slope of log mu against log kappa
  double ahlfors_min = 0.0;
  double ahlfors_max = 0.0;
  std::vector<double> ahlfors_level_min;
  std::vector<double> ahlfors_level_max;
};

/// Parameter m in (a, b) with kappa(a, m) = kappa(m, b) to `tol` relative.
inline double kappa_midpoint(const QuasiMetricCurve& c, double a, double b, double tol = 1e-10) {
  const double whole = c.on_param(a, b);
  auto f = [&](double m) { return c.on_param(a, m) - c.on_param(m, b); };
  double lo = a, hi = b;
  double flo = f(lo), fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw DomainError("bisection fails to bracket on interval [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= tol * whole) return mid;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
    if (!(hi - lo > std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)))) break;
  }
  return mid;
}

inline DimensionReport bisect_dimension(const QuasiMetricCurve& c, int depth, double tol = 1e-10) {
  require(depth >= 1 && depth <= 20, "bisect_dimension: depth must lie in [1,20]");
  DimensionReport rep;
  BisectionFamily& fam = rep.family;
  const double a0 = c.grid.front(), b0 = c.grid.back();
  const double k0 = c.on_param(a0, b0);
  if (!(k0 > 0.0)) throw DomainError("bisect_dimension: kappa vanishes on the whole curve");
  fam.levels.push_back({{a0, b0, k0}});
  for (int k = 0; k < depth; ++k) {
    std::vector<BisectionInterval> next;
    next.reserve(2 * fam.levels.back().size());
    double mk = 0.0;
    for (const auto& I : fam.levels.back()) {
      if (!(I.kappa > 0.0))
        throw DomainError("bisect_dimension: kappa vanishes on interval [" + std::to_string(I.a) + ", " +
                          std::to_string(I.b) + "]");
      const double m = kappa_midpoint(c, I.a, I.b, tol);
      const BisectionInterval L{I.a, m, c.on_param(I.a, m)}, R{m, I.b, c.on_param(m, I.b)};
      mk = std::max(mk, std::abs(L.kappa + R.kappa - I.kappa) / I.kappa);
      next.push_back(L);
      next.push_back(R);
    }
    fam.flatness.push_back(mk);
    fam.levels.push_back(std::move(next));
  }
  for (const auto& lev : fam.levels) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& I : lev) {
      lo = std::min(lo, I.kappa);
      hi = std::max(hi, I.kappa);
    }
    fam.shortest.push_back(lo);
    fam.longest.push_back(hi);
  }
  double plo = 1.0, phi = 1.0;
  for (int n = 1; n <= depth; ++n) {
    plo *= 1.0 - fam.flatness[n - 1];
    phi *= 1.0 + fam.flatness[n - 1];
    // kappa-balance within tol lets each half differ from L(1 +- m)/2 by tol L
    const double slack = 1.0 + 4.0 * tol * n + 1e-12;
    const double L0n = std::ldexp(fam.longest[0], -n);
    if (!(L0n * plo <= fam.shortest[n] * slack && fam.shortest[n] <= fam.longest[n] &&
          fam.longest[n] <= L0n * phi * slack))
      fam.envelope_ok = false;
  }
  // regression over the deepest ceil(depth/2) levels
  const int first = depth - (depth + 1) / 2 + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  rep.ahlfors_min = std::numeric_limits<double>::infinity();
  rep.ahlfors_max = 0.0;
  for (int k = 0; k <= depth; ++k) {
    const double mu = std::ldexp(1.0, -k);
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
    for (const auto& I : fam.levels[k]) {
      const double ratio = mu / I.kappa;
      lmin = std::min(lmin, ratio);
      lmax = std::max(lmax, ratio);
      if (k >= first) {
        const double x = std::log(I.kappa), y = std::log(mu);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
      }
    }
    rep.ahlfors_level_min.push_back(lmin);
    rep.ahlfors_level_max.push_back(lmax);
    rep.ahlfors_min = std::min(rep.ahlfors_min, lmin);
    rep.ahlfors_max = std::max(rep.ahlfors_max, lmax);
  }
  const double n = static_cast<double>(cnt);
  const double den = n * sxx - sx * sx;
  // all intervals of a level may share one length; then the levels still spread x
  rep.dimension = den != 0.0 ? (n * sxy - sx * sy) / den : 1.0;
  return rep;
}

// ------------------------------------------------------- diameter ratio

struct DiameterProfile {
  ScaleProfile diameter;  ///< max diam_kappa([A,B]) / kappa(A,B)
  ScaleProfile cover;     ///< max_P sqrt(kappa(M,P)) / (sqrt(kappa(A,B)) / sqrt 2), M the kappa-midpoint
};

inline DiameterProfile diameter_ratio(const QuasiMetricCurve& c, std::size_t bases_per_gap = 128,
                                      std::size_t inner = 33) {
  const std::size_t n = c.size();
  require(n >= 2, "diameter_ratio: needs two points");
  std::map<int, std::pair<double, std::size_t>> dia, cov;
  for (std::size_t G = 1; G < n; G *= 2) {
    const std::size_t starts = n - G;
    const std::size_t stride = std::max<std::size_t>(1, starts / bases_per_gap);
    for (std::size_t a = 0; a < starts; a += stride) {
      const std::size_t b = a + G;
      const double kab = c.on_index(a, b);
      if (!(kab > 0.0)) continue;
      std::vector<std::size_t> pts;
      const std::size_t m = std::min(inner, G + 1);
      for (std::size_t q = 0; q < m; ++q) pts.push_back(a + (G * q) / (m - 1 == 0 ? 1 : m - 1));
      pts.push_back(b);
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      double diam = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, c.on_index(pts[i], pts[j]));
      detail::bump(dia, log2_bucket(kab), diam / kab);
      if (pts.size() < 3) continue;  // no interior sample to serve as the midpoint
      std::size_t mid = pts.front();
      double bal = std::numeric_limits<double>::infinity();
      for (std::size_t p : pts) {
        const double d = std::abs(c.on_index(a, p) - c.on_index(p, b));
        if (d < bal) {
          bal = d;
          mid = p;
        }
      }
      double reach = 0.0;
      for (std::size_t p : pts) reach = std::max(reach, std::sqrt(c.on_index(mid, p)));
      detail::bump(cov, log2_bucket(kab), reach / (std::sqrt(kab) / std::sqrt(2.0)));
    }
  }
  return {detail::to_profile(dia), detail::to_profile(cov)};
}

// --------------------------------------------------------- box counting

struct BoxCountReport {
  std::vector<double> box;
  std::vector<std::size_t> count;
  double dimension = 0.0;
};

/// Occupied boxes of side 2^-j (j in [j_lo, j_hi]) for the polyline through the
/// path's points, each segment densified below the finest box size.
inline BoxCountReport box_counting_dimension(const SampledPath& p, int j_lo, int j_hi) {
  validate(p, "box_counting_dimension");
  require(j_lo < j_hi, "box_counting_dimension: need at least two box sizes");
  BoxCountReport r;
  const double finest = std::ldexp(1.0, -j_hi);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double dx = p.x[i + 1] - p.x[i], dy = p.y[i + 1] - p.y[i];
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.0 * std::hypot(dx, dy) / finest)));
    for (std::size_t q = 0; q < k; ++q) {
      const double u = static_cast<double>(q) / static_cast<double>(k);
      pts.emplace_back(p.x[i] + u * dx, p.y[i] + u * dy);
    }
  }
  pts.emplace_back(p.x.back(), p.y.back());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double s = std::ldexp(1.0, -j);
    std::unordered_set<std::uint64_t> occupied;
    for (const auto& [x, y] : pts) {
      const auto ix = static_cast<std::int64_t>(std::floor(x / s)), iy = static_cast<std::int64_t>(std::floor(y / s));
      occupied.insert((static_cast<std::uint64_t>(ix) << 32) ^ (static_cast<std::uint64_t>(iy) & 0xffffffffULL));
    }
    r.box.push_back(s);
    r.count.push_back(occupied.size());
    const double lx = -std::log(s), ly = std::log(static_cast<double>(occupied.size()));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(j_hi - j_lo + 1);
  r.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

}  // namespace heis
