#pragma once

// Riemann-Stieltjes sums, Levy area, the sewing integrator, the Young
// estimate, and subdivision extrema computed by dynamic programming.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "heis/path.hpp"
#include "heis/subdivision.hpp"
#include "heis/summation.hpp"

namespace heis {

namespace detail {
inline void same_grid(const ScalarPath& x, const ScalarPath& y, const char* who) {
  if (x.t.size() != y.t.size() || x.v.size() != x.t.size() || y.v.size() != y.t.size())
    throw DomainError(std::string(who) + ": paths must share the parameter grid");
  for (std::size_t i = 0; i < x.t.size(); ++i)
    if (x.t[i] != y.t[i]) throw DomainError(std::string(who) + ": grid mismatch at index " + std::to_string(i));
}

/// Running sum with Neumaier compensation (deterministic, order-fixed).
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};
}  // namespace detail

/// sum_i x(t_i) (y(t_{i+1}) - y(t_i)) over the cells of `sub`.
inline double stieltjes_sum(const ScalarPath& x, const ScalarPath& y, const Subdivision& sub) {
  detail::same_grid(x, y, "stieltjes_sum");
  validate(sub, x.size());
  const auto& I = sub.idx;
  return pairwise_sum(0, sub.cells(), [&](std::size_t i) { return x.v[I[i]] * (y.v[I[i + 1]] - y.v[I[i]]); });
}

inline double stieltjes_sum(const ScalarPath& x, const ScalarPath& y) {
  return stieltjes_sum(x, y, full_subdivision(x.size()));
}

/// 2 sum_i (x_i y_{i+1} - y_i x_{i+1}): the doubled mixed sum of x dy - y dx.
inline double levy_area(const SampledPath& g, const Subdivision& sub) {
  validate(g, "levy_area");
  validate(sub, g.size());
  const auto& I = sub.idx;
  return 2.0 * pairwise_sum(0, sub.cells(), [&](std::size_t i) {
           const std::size_t a = I[i], b = I[i + 1];
           return g.x[a] * g.y[b] - g.y[a] * g.x[b];
         });
}

inline double levy_area(const SampledPath& g) { return levy_area(g, full_subdivision(g.size())); }

/// Z(t_j) for every grid point, using the full grid as subdivision.
inline std::vector<double> levy_area_cumulative(const SampledPath& g) {
  validate(g, "levy_area_cumulative");
  std::vector<double> Z(g.size(), 0.0);
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    acc.add(2.0 * (g.x[i] * g.y[i + 1] - g.y[i] * g.x[i + 1]));
    Z[i + 1] = acc.value();
  }
  return Z;
}

/// int x dy + int y dx - (xy)|_0^T; algebraically equal to -sum dx dy.
inline double ibp_defect(const ScalarPath& x, const ScalarPath& y, const Subdivision& sub) {
  detail::same_grid(x, y, "ibp_defect");
  validate(sub, x.size());
  const std::size_t a = sub.idx.front(), b = sub.idx.back();
  return stieltjes_sum(x, y, sub) + stieltjes_sum(y, x, sub) - (x.v[b] * y.v[b] - x.v[a] * y.v[a]);
}

inline double quadratic_covariation(const ScalarPath& x, const ScalarPath& y, const Subdivision& sub) {
  detail::same_grid(x, y, "quadratic_covariation");
  validate(sub, x.size());
  const auto& I = sub.idx;
  return pairwise_sum(0, sub.cells(), [&](std::size_t i) {
    return (x.v[I[i + 1]] - x.v[I[i]]) * (y.v[I[i + 1]] - y.v[I[i]]);
  });
}

/// Empirical alpha-Holder seminorm: max |v(s)-v(t)| / |s-t|^alpha over all
/// sample pairs whose index gap is a power of two.
inline double holder_seminorm(const ScalarPath& p, double alpha) {
  validate(p, "holder_seminorm");
  require(alpha > 0.0 && alpha <= 1.0, "holder_seminorm: exponent must lie in (0,1]");
  double best = 0.0;
  for (std::size_t g = 1; g < p.size(); g *= 2)
    for (std::size_t i = 0; i + g < p.size(); ++i)
      best = std::max(best, std::abs(p.v[i + g] - p.v[i]) / std::pow(p.t[i + g] - p.t[i], alpha));
  return best;
}

/// Same estimator for a planar path under the Euclidean norm.
inline double holder_seminorm(const SampledPath& p, double alpha) {
  validate(p, "holder_seminorm");
  require(alpha > 0.0 && alpha <= 1.0, "holder_seminorm: exponent must lie in (0,1]");
  double best = 0.0;
  for (std::size_t g = 1; g < p.size(); g *= 2)
    for (std::size_t i = 0; i + g < p.size(); ++i) {
      double d = std::hypot(p.x[i + g] - p.x[i], p.y[i + g] - p.y[i]);
      if (!p.planar()) d = std::hypot(d, p.z[i + g] - p.z[i]);
      best = std::max(best, d / std::pow(p.t[i + g] - p.t[i], alpha));
    }
  return best;
}

// ---------------------------------------------------------------- sewing

/// A germ mu(a, b) on grid index pairs a <= b together with the control
/// modulus omega on parameter lengths.
struct Germ {
  std::function<double(std::size_t, std::size_t)> mu;
  std::function<double(double)> omega;
};

/// sum_{i>=0} 2^i omega(h 2^-i), truncated once terms stop mattering.
inline double sewing_tail_bound(const std::function<double(double)>& omega, double h) {
  double total = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double term = std::ldexp(omega(std::ldexp(h, -i)), i);
    total += term;
    if (i > 8 && term <= 1e-17 * total) break;
  }
  return total;
}

struct SewingOptions {
  bool check_defect = true;
  std::size_t random_triples = 4096;
  std::uint64_t seed = 7;
  double slack = 1e-9;  ///< relative slack on the declared modulus
};

/// Additive integral of a near-additive germ on the grid, nu(t_0) = 0.
///
/// On a finite grid the dyadic refinements terminate at the grid itself, so
/// nu is the accumulated germ over consecutive grid cells. The declared
/// modulus is checked on dyadic triples and on random triples; a violation
/// throws PreconditionViolation naming the worst triple.
inline ScalarPath sewing_integrate(const Germ& germ, const std::vector<double>& grid,
                                   const SewingOptions& opt = {}) {
  validate_grid(grid, "sewing_integrate");
  require(grid.size() >= 2, "sewing_integrate: grid needs two points");
  const std::size_t n = grid.size();
  if (opt.check_defect) {
    auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
      const double d = std::abs(germ.mu(a, b) + germ.mu(b, c) - germ.mu(a, c));
      const double w = germ.omega(grid[c] - grid[a]);
      if (d > w * (1.0 + opt.slack) + 1e-14) {
        std::ostringstream os;
        os << "sewing_integrate: additivity defect " << d << " exceeds declared modulus " << w << " on triple ("
           << grid[a] << ", " << grid[b] << ", " << grid[c] << ")";
        throw PreconditionViolation(os.str());
      }
    };
    for (std::size_t g = 1; 2 * g < n; g *= 2) {
      const std::size_t stride = std::max<std::size_t>(1, (n / g) / 256);
      for (std::size_t i = 0; i + 2 * g < n; i += g * stride) check(i, i + g, i + 2 * g);
    }
    std::mt19937_64 rng(opt.seed);
    for (std::size_t r = 0; r < opt.random_triples && n >= 3; ++r) {
      std::size_t a = rng() % n, b = rng() % n, c = rng() % n;
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      if (a == b || b == c) continue;
      check(a, b, c);
    }
  }
  ScalarPath nu{grid, std::vector<double>(n, 0.0)};
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc.add(germ.mu(i, i + 1));
    nu.v[i + 1] = acc.value();
  }
  return nu;
}

struct YoungReport {
  double integral = 0.0;      ///< int_0^T x dy via sewing
  double defect = 0.0;        ///< |integral - x(anchor)(y(T) - y(0))|
  double holder_x = 0.0;
  double holder_y = 0.0;
  double scale = 0.0;         ///< |x|_a |y|_b T^{a+b}
  double ratio = 0.0;         ///< defect / scale (0 when scale = 0)
  double theory_constant = 0.0;  ///< 1 + 1/(1 - 2^{1-a-b})
};

/// Young estimate on the whole grid of x and y, anchored at grid index `anchor`.
inline YoungReport young_bound_check(const ScalarPath& x, const ScalarPath& y, double alpha, double beta,
                                     std::size_t anchor = 0, const SewingOptions& opt = {}) {
  if (!(alpha + beta > 1.0)) throw DomainError("young_bound_check: exponents must satisfy alpha + beta > 1");
  detail::same_grid(x, y, "young_bound_check");
  require(anchor < x.size(), "young_bound_check: anchor outside grid");
  YoungReport r;
  r.holder_x = holder_seminorm(x, alpha);
  r.holder_y = holder_seminorm(y, beta);
  const double hx = r.holder_x, hy = r.holder_y, ab = alpha + beta;
  Germ germ{[&](std::size_t a, std::size_t b) { return x.v[a] * (y.v[b] - y.v[a]); },
            [=](double h) { return hx * hy * std::pow(h, ab); }};
  const ScalarPath nu = sewing_integrate(germ, x.t, opt);
  const std::size_t last = x.size() - 1;
  r.integral = nu.v[last];
  r.defect = std::abs(r.integral - x.v[anchor] * (y.v[last] - y.v[0]));
  const double T = x.t[last] - x.t[0];
  r.scale = hx * hy * std::pow(T, ab);
  r.ratio = r.scale > 0.0 ? r.defect / r.scale : 0.0;
  r.theory_constant = 1.0 + 1.0 / (1.0 - std::pow(2.0, 1.0 - ab));
  return r;
}

// ------------------------------------------------- subdivision extrema (DP)

/// best[j] = extremum over index chains first = i_0 < ... < i_m = j of
/// sum weight(i_k, i_{k+1}); best[first] = 0. Exact on the grid, O(n^2).
template <class Weight>
std::vector<double> chain_extremum(std::size_t first, std::size_t last, const Weight& weight, bool maximize) {
  require(first <= last, "chain_extremum: empty window");
  const std::size_t n = last - first + 1;
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double b = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < j; ++i) {
      const double v = best[i] + weight(first + i, first + j);
      b = maximize ? std::max(b, v) : std::min(b, v);
    }
    best[j] = b;
  }
  return best;
}

struct ExtremalArea {
  double v_plus = 0.0;
  double v_minus = 0.0;
};

/// 2 det(g(t_j), g(t_i)) for i < j.
inline double det_increment(const SampledPath& g, std::size_t i, std::size_t j) {
  return 2.0 * (g.x[j] * g.y[i] - g.y[j] * g.x[i]);
}

/// Extrema over grid subdivisions of [t_s, t_t] of sum 2 det(g(t_{k+1}), g(t_k)).
inline ExtremalArea extremal_area_dp(const SampledPath& g, std::size_t s, std::size_t t) {
  validate(g, "extremal_area_dp");
  if (!(s < t) || t >= g.size()) throw DomainError("extremal_area_dp: empty or out-of-range window");
  auto w = [&](std::size_t i, std::size_t j) { return det_increment(g, i, j); };
  return {chain_extremum(s, t, w, true).back(), chain_extremum(s, t, w, false).back()};
}

/// The same sum for one subdivision (for comparisons against the extrema).
inline double det_sum(const SampledPath& g, const Subdivision& sub) {
  validate(sub, g.size());
  const auto& I = sub.idx;
  return pairwise_sum(0, sub.cells(), [&](std::size_t k) { return det_increment(g, I[k], I[k + 1]); });
}

}  // namespace heis
