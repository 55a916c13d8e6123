#pragma once

// Intrinsic graphs over the (y,z)-plane, integral curves of W^phi = d/dy - 4 phi d/dz,
// horizontal Newton iteration, and a numerical coarea comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/error.hpp"
#include "heis/summation.hpp"

namespace heis {

using Field2 = std::function<double(double, double)>;  // (y, z) -> value

struct Rect {
  double y0 = 0.0, y1 = 1.0, z0 = 0.0, z1 = 1.0;

  bool contains(double y, double z) const { return y >= y0 && y <= y1 && z >= z0 && z <= z1; }
  double area() const { return std::max(0.0, y1 - y0) * std::max(0.0, z1 - z0); }
};

struct IntrinsicGraph {
  Field2 phi;
  std::optional<Field2> w;  ///< W^phi phi; finite differences along the flow when absent
  Rect domain{-1e300, 1e300, -1e300, 1e300};
  std::string label;

  /// Phi(y,z) = exp(phi X)(0,y,z) = (phi, y, z + 2 phi y).
  HPoint lift(double y, double z) const {
    const double p = phi(y, z);
    return {p, y, z + 2.0 * p * y};
  }

  double slope(double y, double z, double delta = 1e-5) const {
    if (w) return (*w)(y, z);
    const double p = phi(y, z);
    return (phi(y + delta, z - 4.0 * delta * p) - phi(y - delta, z + 4.0 * delta * p)) / (2.0 * delta);
  }
};

/// Distinct (y,z) samples must give distinct Phi values. Only same-y columns can collide.
inline bool check_injective(const IntrinsicGraph& g, const Rect& region, int ny, int nz, double resolution = 1e-12) {
  require(ny >= 1 && nz >= 2, "check_injective: need a 1 x 2 grid at least");
  for (int i = 0; i < ny; ++i) {
    const double y = region.y0 + (region.y1 - region.y0) * (i + 0.5) / ny;
    std::vector<double> col;
    for (int j = 0; j < nz; ++j) col.push_back(g.lift(y, region.z0 + (region.z1 - region.z0) * (j + 0.5) / nz).z);
    std::sort(col.begin(), col.end());
    for (std::size_t j = 1; j < col.size(); ++j)
      if (col[j] - col[j - 1] <= resolution) return false;
  }
  return true;
}

// ------------------------------------------------------- integral curves

struct IntegralCurve {
  std::vector<double> t, y, z;
  std::vector<double> phi;        ///< phi along the curve
  std::vector<double> quotient;   ///< (phi_{k+1} - phi_k) / dt
  std::vector<double> slope;      ///< w at the cell midpoints, for comparison with quotient
  double richardson = 0.0;        ///< max |z_h - z_{h/2}| on shared nodes
  bool exited = false;

  std::size_t size() const { return t.size(); }
};

namespace detail {
struct EulerRun {
  std::vector<double> t, y, z;
  bool exited = false;
};

inline EulerRun euler(const IntrinsicGraph& g, double y0, double z0, double h, std::size_t steps, double drift = 0.0) {
  EulerRun r;
  r.t.push_back(0.0);
  r.y.push_back(y0);
  r.z.push_back(z0);
  double z = z0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double y = y0 + static_cast<double>(k) * h;
    z += h * (-4.0 * g.phi(y, z)) + std::abs(h) * drift;
    const double yn = y0 + static_cast<double>(k + 1) * h;
    if (!std::isfinite(z)) throw DomainError("integrate_Wphi: non-finite field value");
    if (!g.domain.contains(yn, z)) {
      r.exited = true;
      break;
    }
    r.t.push_back(static_cast<double>(k + 1) * h);
    r.y.push_back(yn);
    r.z.push_back(z);
  }
  return r;
}
}  // namespace detail

/// Explicit Euler for z' = -4 phi(y0 + t, z) over t in [0, span] (span may be negative),
/// with a half-step rerun for the Richardson estimate.
inline IntegralCurve integrate_Wphi(const IntrinsicGraph& g, double y0, double z0, double step, double span) {
  require(step > 0.0 && std::isfinite(step), "integrate_Wphi: step must be > 0");
  require(std::isfinite(span), "integrate_Wphi: span must be finite");
  require(g.domain.contains(y0, z0), "integrate_Wphi: start outside the domain");
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(span) / step - 1e-12)));
  const double h = span == 0.0 ? 0.0 : span / static_cast<double>(n);
  const auto coarse = detail::euler(g, y0, z0, h, span == 0.0 ? 0 : n);
  const auto fine = detail::euler(g, y0, z0, 0.5 * h, span == 0.0 ? 0 : 2 * n);
  IntegralCurve c;
  c.t = coarse.t;
  c.y = coarse.y;
  c.z = coarse.z;
  c.exited = coarse.exited;
  for (std::size_t k = 0; k < c.size(); ++k) {
    c.phi.push_back(g.phi(c.y[k], c.z[k]));
    if (2 * k < fine.z.size()) c.richardson = std::max(c.richardson, std::abs(c.z[k] - fine.z[2 * k]));
  }
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    c.quotient.push_back((c.phi[k + 1] - c.phi[k]) / h);
    c.slope.push_back(g.slope(0.5 * (c.y[k] + c.y[k + 1]), 0.5 * (c.z[k] + c.z[k + 1])));
  }
  return c;
}

// --------------------------------------------------------- extremal flow

struct FlowOptions {
  bool upper = true;     ///< max selection; false selects the lowest solutions
  double drift = -1.0;   ///< selection drift added to z'; negative selects 32 step
};

struct ExtremalFlow {
  std::vector<double> seeds;
  std::vector<IntegralCurve> curves;
  bool ordered = true;
  std::string label = "extremal selection: one admissible ordered family";
};

/// Integral curves from (y0, seed) for seeds sorted ascending. A small drift
/// toward the selected side picks the extremal Peano solution, and the lattice
/// join (meet) with the neighbouring curve keeps the family ordered.
/// The default drift 32 step parks a branch point at offset 64 step^2, where
/// Euler no longer overshoots it, and biases the selected branch by O(step).
inline ExtremalFlow extremal_flow(const IntrinsicGraph& g, double y0, std::vector<double> seeds, double step,
                                  double span, const FlowOptions& opt = {}) {
  require(!seeds.empty(), "extremal_flow: no seeds");
  require(span > 0.0 && step > 0.0, "extremal_flow: span and step must be > 0");
  std::sort(seeds.begin(), seeds.end());
  const std::size_t n = static_cast<std::size_t>(std::ceil(span / step - 1e-12));
  const double h = span / static_cast<double>(n);
  const double drift = (opt.drift < 0.0 ? 32.0 * step : opt.drift) * (opt.upper ? 1.0 : -1.0);
  ExtremalFlow f;
  f.seeds = seeds;
  for (double s : seeds) {
    const auto run = detail::euler(g, y0, s, h, n, drift);
    IntegralCurve c;
    c.t = run.t;
    c.y = run.y;
    c.z = run.z;
    c.exited = run.exited;
    f.curves.push_back(std::move(c));
  }
  // Lattice operations: upper family takes running max from below, lower takes running min from above.
  if (opt.upper) {
    for (std::size_t j = 1; j < f.curves.size(); ++j) {
      auto& c = f.curves[j];
      const auto& prev = f.curves[j - 1];
      for (std::size_t k = 0; k < std::min(c.size(), prev.size()); ++k) c.z[k] = std::max(c.z[k], prev.z[k]);
    }
  } else {
    for (std::size_t j = f.curves.size() - 1; j-- > 0;) {
      auto& c = f.curves[j];
      const auto& next = f.curves[j + 1];
      for (std::size_t k = 0; k < std::min(c.size(), next.size()); ++k) c.z[k] = std::min(c.z[k], next.z[k]);
    }
  }
  for (auto& c : f.curves)
    for (std::size_t k = 0; k < c.size(); ++k) c.phi.push_back(g.phi(c.y[k], c.z[k]));
  for (std::size_t j = 1; j < f.curves.size(); ++j) {
    const auto& a = f.curves[j - 1];
    const auto& b = f.curves[j];
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
      if (a.z[k] > b.z[k]) f.ordered = false;
  }
  if (!f.ordered) throw InternalError("extremal_flow: ordering violated after selection");
  return f;
}

// ------------------------------------------------- distance and measure

/// max{|dy| sqrt(1 + w(A)^2), |z2 - zhat|^(1/2)} with zhat the integral curve from A at y2.
inline double dg_distance(const IntrinsicGraph& g, double y1, double z1, double y2, double z2, double step = 1e-4) {
  const double dy = y2 - y1;
  double zhat = z1;
  if (dy != 0.0) {
    const auto c = integrate_Wphi(g, y1, z1, std::min(step, std::abs(dy)), dy);
    if (c.exited) throw DomainError("dg_distance: integral curve leaves the domain");
    // Richardson: the half-step value 2 z_{h/2} - z_h is available through one more run.
    const auto fine = detail::euler(g, y1, z1, 0.5 * (c.t[1] - c.t[0]), 2 * (c.size() - 1));
    zhat = 2.0 * fine.z.back() - c.z.back();
  }
  const double w = g.slope(y1, z1);
  return std::max(std::abs(dy) * std::sqrt(1.0 + w * w), std::sqrt(std::abs(z2 - zhat)));
}

/// Integral of 2 sqrt(1 + w^2) over the region by the midpoint rule.
inline double surface_measure(const IntrinsicGraph& g, const Rect& region, int ny = 128, int nz = 128) {
  require(ny >= 1 && nz >= 1, "surface_measure: grid must be nonempty");
  if (region.area() == 0.0) return 0.0;
  const double hy = (region.y1 - region.y0) / ny, hz = (region.z1 - region.z0) / nz;
  const double sum = pairwise_sum(0, static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz), [&](std::size_t k) {
    const double y = region.y0 + (static_cast<double>(k / static_cast<std::size_t>(nz)) + 0.5) * hy;
    const double z = region.z0 + (static_cast<double>(k % static_cast<std::size_t>(nz)) + 0.5) * hz;
    const double w = g.slope(y, z);
    return 2.0 * std::sqrt(1.0 + w * w);
  });
  return sum * hy * hz;
}

// ----------------------------------------------------------- divergence

struct DivergenceCheck {
  double omega = 0.0;        ///< measured 1/2-Holder constant of phi between the two curves
  double constant = 0.0;     ///< C = 4 omega
  double worst_margin = 0.0; ///< min over t of bound - lhs
  bool holds = true;
};

/// |z2(t)-z1(t)|^(1/2) <= {|dz(0)| + C |dy(0)|^(1/2) t}^(1/2) + C t along two curves of equal step.
inline DivergenceCheck divergence_bound_check(const IntegralCurve& a, const IntegralCurve& b) {
  require(a.size() >= 2 && b.size() >= 2, "divergence_bound_check: curves too short");
  const std::size_t n = std::min(a.size(), b.size());
  require(std::abs((a.t[1] - a.t[0]) - (b.t[1] - b.t[0])) < 1e-15, "divergence_bound_check: steps differ");
  const double dy0 = std::abs(b.y[0] - a.y[0]);
  DivergenceCheck r;
  for (std::size_t k = 0; k < n; ++k) {
    const double den = std::sqrt(dy0) + std::sqrt(std::abs(b.z[k] - a.z[k]));
    if (den > 0.0) r.omega = std::max(r.omega, std::abs(b.phi[k] - a.phi[k]) / den);
  }
  r.constant = 4.0 * r.omega;
  const double dz0 = std::abs(b.z[0] - a.z[0]);
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::abs(a.t[k]);
    const double lhs = std::sqrt(std::abs(b.z[k] - a.z[k]));
    const double rhs = std::sqrt(dz0 + r.constant * std::sqrt(dy0) * t) + r.constant * t;
    r.worst_margin = std::min(r.worst_margin, rhs - lhs);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-14) r.holds = false;
  }
  return r;
}

// ------------------------------------------------------- maps to R^2

using Field3 = std::function<double(const HPoint&)>;

/// F = (f, g) with horizontal derivatives X = d/dx + 2y d/dz, Y = d/dy - 2x d/dz.
struct ScalarMapPair {
  Field3 f, g;
  Field3 xf, yf, xg, yg;
  std::string label;

  std::array<double, 2> value(const HPoint& p) const { return {f(p), g(p)}; }
  double det(const HPoint& p) const { return xf(p) * yg(p) - yf(p) * xg(p); }
};

/// F = (a x + b y, c x + d y).
inline ScalarMapPair linear_pair(double a, double b, double c, double d) {
  ScalarMapPair F;
  F.f = [=](const HPoint& p) { return a * p.x + b * p.y; };
  F.g = [=](const HPoint& p) { return c * p.x + d * p.y; };
  F.xf = [=](const HPoint&) { return a; };
  F.yf = [=](const HPoint&) { return b; };
  F.xg = [=](const HPoint&) { return c; };
  F.yg = [=](const HPoint&) { return d; };
  F.label = "linear";
  return F;
}

/// Horizontal derivatives by central differences along left translations.
inline ScalarMapPair numeric_pair(Field3 f, Field3 g, double delta = 1e-6) {
  ScalarMapPair F;
  F.f = f;
  F.g = g;
  auto dx = [delta](Field3 u) {
    return [u, delta](const HPoint& p) {
      return (u(group_mul(p, {delta, 0.0, 0.0})) - u(group_mul(p, {-delta, 0.0, 0.0}))) / (2.0 * delta);
    };
  };
  auto dy = [delta](Field3 u) {
    return [u, delta](const HPoint& p) {
      return (u(group_mul(p, {0.0, delta, 0.0})) - u(group_mul(p, {0.0, -delta, 0.0}))) / (2.0 * delta);
    };
  };
  F.xf = dx(f);
  F.yf = dy(f);
  F.xg = dx(g);
  F.yg = dy(g);
  F.label = "numeric";
  return F;
}

struct NewtonResult {
  HPoint point;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  ///< residual before each step
};

/// A_{n+1} = A_n (u, v, 0) with d_hF(A_n) (u,v) = target - F(A_n).
inline NewtonResult horizontal_newton(const ScalarMapPair& F, std::array<double, 2> target, HPoint start,
                                      double tol = 1e-12, int max_iter = 50) {
  check_finite(start, "horizontal_newton");
  NewtonResult r;
  r.point = start;
  for (int it = 0;; ++it) {
    const auto v = F.value(r.point);
    const double e0 = target[0] - v[0], e1 = target[1] - v[1];
    r.residual = std::hypot(e0, e1);
    r.history.push_back(r.residual);
    if (!std::isfinite(r.residual)) throw DomainError("horizontal_newton: non-finite residual");
    if (r.residual <= tol) {
      r.converged = true;
      r.iterations = it;
      return r;
    }
    if (it == max_iter) {
      r.iterations = it;
      return r;
    }
    const double a = F.xf(r.point), b = F.yf(r.point), c = F.xg(r.point), d = F.yg(r.point);
    const double det = a * d - b * c;
    if (!(std::abs(det) > 1e-14)) throw DomainError("horizontal_newton: degenerate horizontal differential");
    const double u = (d * e0 - b * e1) / det, w = (a * e1 - c * e0) / det;
    r.point = group_mul(r.point, {u, w, 0.0});
  }
}

// --------------------------------------------------------------- coarea

struct Box3 {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0, z0 = 0.0, z1 = 1.0;

  bool contains(const HPoint& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1 && p.z >= z0 && p.z <= z1;
  }
  double volume() const { return (x1 - x0) * (y1 - y0) * (z1 - z0); }
};

struct CoareaOptions {
  int grid = 64;          ///< RHS midpoint grid per axis; also the z-march steps per box height
  int a_grid = 192;       ///< level values per axis; the midpoint rule on the image edge costs O(1/a_grid)
  double pad = 0.1;       ///< a-rectangle margin, relative to its width
  double newton_tol = 1e-12;
};

struct CoareaBox {
  Box3 box;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double coverage = 1.0;       ///< fraction of level values tracked without failure
  std::size_t failed = 0;
};

struct CoareaReport {
  std::vector<CoareaBox> boxes;
  double spread = 0.0;         ///< (max - min) / mean of the per-box ratios
  std::string label;
};

namespace detail {
/// Fraction of the segment p -> q (linear in coordinates) lying inside the box.
inline double inside_fraction(const Box3& b, const HPoint& p, const HPoint& q) {
  double lo = 0.0, hi = 1.0;
  auto clip = [&](double a, double d, double mn, double mx) {
    if (d == 0.0) {
      if (a < mn || a > mx) hi = -1.0;
      return;
    }
    double s0 = (mn - a) / d, s1 = (mx - a) / d;
    if (s0 > s1) std::swap(s0, s1);
    lo = std::max(lo, s0);
    hi = std::min(hi, s1);
  };
  clip(p.x, q.x - p.x, b.x0, b.x1);
  clip(p.y, q.y - p.y, b.y0, b.y1);
  clip(p.z, q.z - p.z, b.z0, b.z1);
  return std::max(0.0, hi - lo);
}
}  // namespace detail

/// H^2 of F^{-1}(a) inside the box: from one Newton-projected point, march the
/// level set up and down with vertical steps and horizontal Newton corrections,
/// summing the contact increments of consecutive points, clipped to the box.
inline std::optional<double> level_set_area(const ScalarMapPair& F, std::array<double, 2> a, const Box3& box,
                                            int steps, double tol) {
  const double height = box.z1 - box.z0;
  const double dz = height / steps;
  const double lo = box.z0 - 0.25 * height, hi = box.z1 + 0.25 * height;
  const auto seed = horizontal_newton(F, a, {0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1), 0.5 * (box.z0 + box.z1)}, tol);
  if (!seed.converged) return std::nullopt;
  double area = 0.0;
  const int limit = 16 * steps + 64;
  for (double dir : {1.0, -1.0}) {
    HPoint p = seed.point;
    int k = 0;
    for (; k < limit; ++k) {
      auto next = horizontal_newton(F, a, group_mul(p, {0.0, 0.0, dir * dz}), tol);
      if (!next.converged) return std::nullopt;
      const double frac = detail::inside_fraction(box, p, next.point);
      if (frac > 0.0) area += frac * std::abs(contact_z(p, next.point));
      const bool leaving = (next.point.z > hi && next.point.z > p.z) || (next.point.z < lo && next.point.z < p.z);
      p = next.point;
      if (leaving) break;
    }
    if (k == limit) return std::nullopt;
  }
  return area;
}

inline CoareaBox coarea_box(const ScalarMapPair& F, const Box3& box, const CoareaOptions& opt = {}) {
  require(box.volume() > 0.0, "coarea_check: empty box");
  require(opt.grid >= 2 && opt.a_grid >= 2, "coarea_check: grids too small");
  CoareaBox out;
  out.box = box;
  // a-rectangle: bounding box of F over a coarse sample of the box, padded.
  double a0 = std::numeric_limits<double>::infinity(), a1 = -a0, b0 = a0, b1 = -a0;
  const int s = 8;
  for (int i = 0; i <= s; ++i)
    for (int j = 0; j <= s; ++j)
      for (int k = 0; k <= s; ++k) {
        const HPoint p{box.x0 + (box.x1 - box.x0) * i / s, box.y0 + (box.y1 - box.y0) * j / s,
                       box.z0 + (box.z1 - box.z0) * k / s};
        const auto v = F.value(p);
        a0 = std::min(a0, v[0]);
        a1 = std::max(a1, v[0]);
        b0 = std::min(b0, v[1]);
        b1 = std::max(b1, v[1]);
      }
  const double pa = opt.pad * (a1 - a0), pb = opt.pad * (b1 - b0);
  a0 -= pa;
  a1 += pa;
  b0 -= pb;
  b1 += pb;
  const double ha = (a1 - a0) / opt.a_grid, hb = (b1 - b0) / opt.a_grid;
  std::vector<double> areas;
  for (int i = 0; i < opt.a_grid; ++i)
    for (int j = 0; j < opt.a_grid; ++j) {
      const std::array<double, 2> a{a0 + (i + 0.5) * ha, b0 + (j + 0.5) * hb};
      const auto h2 = level_set_area(F, a, box, opt.grid, opt.newton_tol);
      if (!h2) {
        ++out.failed;
        continue;
      }
      areas.push_back(*h2);
    }
  const double total = static_cast<double>(opt.a_grid) * opt.a_grid;
  out.coverage = static_cast<double>(areas.size()) / total;
  // Failed level values are excluded; the tracked sum is rescaled and the coverage reported.
  out.lhs = out.coverage > 0.0 ? pairwise_sum(areas) * ha * hb / out.coverage : 0.0;

  const int n = opt.grid;
  const double hx = (box.x1 - box.x0) / n, hy = (box.y1 - box.y0) / n, hz = (box.z1 - box.z0) / n;
  const std::size_t cells = static_cast<std::size_t>(n) * n * n;
  const double sum = pairwise_sum(0, cells, [&](std::size_t c) {
    const std::size_t i = c / (static_cast<std::size_t>(n) * n), j = (c / n) % n, k = c % n;
    const HPoint p{box.x0 + (i + 0.5) * hx, box.y0 + (j + 0.5) * hy, box.z0 + (k + 0.5) * hz};
    return std::abs(F.det(p));
  });
  out.rhs = sum * hx * hy * hz;
  out.ratio = out.lhs / out.rhs;
  return out;
}

inline CoareaReport coarea_check(const ScalarMapPair& F, const std::vector<Box3>& boxes, const CoareaOptions& opt = {}) {
  require(!boxes.empty(), "coarea_check: no boxes");
  CoareaReport r;
  r.label = F.label;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
  for (const auto& b : boxes) {
    r.boxes.push_back(coarea_box(F, b, opt));
    const double q = r.boxes.back().ratio;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    mean += q / static_cast<double>(boxes.size());
  }
  r.spread = (hi - lo) / mean;
  return r;
}

}  // namespace heis
