#pragma once

// Curve generators: lacunary Fourier pairs, Koch-type polylines,
// Weierstrass-type Holder curves, vertical lifts and rough lifts.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "heis/path.hpp"
#include "heis/stieltjes.hpp"

namespace heis {

using cplx = std::complex<double>;

// ------------------------------------------------------------ lacunary

/// Coefficients of f = sum 2^{-n/2}(a_n phi_n + b_n psi_n) and
/// g = sum 2^{-n/2}(c_n phi_n + d_n psi_n), with
/// phi_n(t) = e^{-2 pi i 2^n t}/(2 pi), psi_n(t) = e^{2 pi i 2^n t}/(2 pi).
struct LacunarySpec {
  std::vector<cplx> a, b, c, d;

  std::size_t terms() const { return std::max({a.size(), b.size(), c.size(), d.size()}); }

  /// Real f and g: b = conj(a), d = conj(c).
  static LacunarySpec real_pair(const std::vector<cplx>& a, const std::vector<cplx>& c) {
    LacunarySpec s;
    s.a = a;
    s.c = c;
    for (const auto& v : a) s.b.push_back(std::conj(v));
    for (const auto& v : c) s.d.push_back(std::conj(v));
    return s;
  }
};

namespace detail {
inline cplx coef(const std::vector<cplx>& v, std::size_t n) { return n < v.size() ? v[n] : cplx{}; }

/// e^{-2 pi i 2^n t} with the phase reduced mod 1 before the trig call.
inline cplx lacunary_phase(int n, double t) {
  double frac = std::ldexp(t, n);
  frac -= std::floor(frac);
  return std::polar(1.0, -2.0 * std::numbers::pi * frac);
}

inline int max_frequency_for_grid(const std::vector<double>& t) {
  double hmax = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) hmax = std::max(hmax, t[i] - t[i - 1]);
  if (hmax <= 0.0) return std::numeric_limits<int>::max();
  // grid of 2^k cells per unit: k = -log2(h); frequencies up to k - 2
  return static_cast<int>(std::floor(-std::log2(hmax) + 1e-9)) - 2;
}
}  // namespace detail

struct LacunaryEval {
  ScalarPath f;
  ScalarPath g;
  double max_imag = 0.0;  ///< largest |Im| seen; ~0 for real pairs
};

/// Evaluates the truncated pair on `grid`. The top frequency 2^N must sit at
/// least two dyadic levels below the grid resolution.
inline LacunaryEval lacunary_eval(const LacunarySpec& spec, const std::vector<double>& grid) {
  validate_grid(grid, "lacunary_eval");
  const std::size_t N = spec.terms();
  if (N > 0 && static_cast<int>(N) - 1 > detail::max_frequency_for_grid(grid))
    throw DomainError("lacunary_eval: truncation exceeds the grid's Nyquist limit (N_max <= k - 2)");
  LacunaryEval out;
  out.f.t = grid;
  out.g.t = grid;
  out.f.v.resize(grid.size());
  out.g.v.resize(grid.size());
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cplx fs{}, gs{};
    for (std::size_t n = 0; n < N; ++n) {
      const cplx ph = detail::lacunary_phase(static_cast<int>(n), grid[i]) * inv2pi;
      const cplx ps = std::conj(ph);
      const double w = std::pow(2.0, -0.5 * static_cast<double>(n));
      fs += w * (detail::coef(spec.a, n) * ph + detail::coef(spec.b, n) * ps);
      gs += w * (detail::coef(spec.c, n) * ph + detail::coef(spec.d, n) * ps);
    }
    out.f.v[i] = fs.real();
    out.g.v[i] = gs.real();
    out.max_imag = std::max({out.max_imag, std::abs(fs.imag()), std::abs(gs.imag())});
  }
  return out;
}

/// Planar path (f, g) from a lacunary pair.
inline SampledPath lacunary_path(const LacunarySpec& spec, const std::vector<double>& grid) {
  const LacunaryEval e = lacunary_eval(spec, grid);
  SampledPath p;
  p.t = grid;
  p.x = e.f.v;
  p.y = e.g.v;
  return p;
}

/// L_k = 2 (sum_{n<=k} |a_n| 2^{-(k-n)/2} + sum_{n>k} 2^{-(n-k)/2} |a_n|).
inline double tail_coefficient(const std::vector<cplx>& seq, int k) {
  double s = 0.0;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const double gap = std::abs(static_cast<double>(k) - static_cast<double>(n));
    s += std::abs(seq[n]) * std::pow(2.0, -0.5 * gap);
  }
  return 2.0 * s;
}

struct LacunaryLimit {
  cplx predicted{};                 ///< (2 pi)^{-1} i sum (a_n d_n - b_n c_n)
  std::vector<cplx> partial;        ///< partial sums of the same series
  LacunarySpec spec;
  double constant = 10.0;

  /// C max_{k >= k(mesh)} (L_k(a) + L_k(b)) (L_k(c) + L_k(d)).
  double remainder_bound(double mesh) const {
    const int k0 = dyadic_scale(mesh);
    const int kmax = static_cast<int>(spec.terms()) + 60;
    double m = 0.0;
    for (int k = std::max(k0, 0); k <= kmax; ++k) {
      const double ab = tail_coefficient(spec.a, k) + tail_coefficient(spec.b, k);
      const double cd = tail_coefficient(spec.c, k) + tail_coefficient(spec.d, k);
      m = std::max(m, ab * cd);
    }
    if (k0 < 0) {
      const double ab = tail_coefficient(spec.a, 0) + tail_coefficient(spec.b, 0);
      const double cd = tail_coefficient(spec.c, 0) + tail_coefficient(spec.d, 0);
      m = std::max(m, ab * cd);
    }
    return constant * m;
  }
};

inline LacunaryLimit lacunary_limit(const LacunarySpec& spec) {
  LacunaryLimit out;
  out.spec = spec;
  const cplx scale = cplx(0.0, 1.0) / (2.0 * std::numbers::pi);
  cplx acc{};
  for (std::size_t n = 0; n < spec.terms(); ++n) {
    using detail::coef;
    acc += scale * (coef(spec.a, n) * coef(spec.d, n) - coef(spec.b, n) * coef(spec.c, n));
    out.partial.push_back(acc);
  }
  out.predicted = acc;
  return out;
}

/// Cluster interval of the Stieltjes sums for a real pair, read off the
/// partial sums A_n = -pi^{-1} sum_{k<=n} Im(a_k d_k) over n >= tail_start.
/// A_n is the real part of the partial predicted limit, so the sign matches
/// lacunary_limit.
struct AdherenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> partial;
};

inline AdherenceInterval adherence_interval(const LacunarySpec& spec, std::size_t tail_start = 0) {
  AdherenceInterval out;
  double acc = 0.0;
  for (std::size_t n = 0; n < spec.terms(); ++n) {
    acc -= (detail::coef(spec.a, n) * detail::coef(spec.d, n)).imag() / std::numbers::pi;
    out.partial.push_back(acc);
  }
  require(tail_start < out.partial.size(), "adherence_interval: tail start beyond truncation");
  out.lower = *std::min_element(out.partial.begin() + static_cast<std::ptrdiff_t>(tail_start), out.partial.end());
  out.upper = *std::max_element(out.partial.begin() + static_cast<std::ptrdiff_t>(tail_start), out.partial.end());
  return out;
}

/// Real pair whose Stieltjes sums grow like the harmonic series:
/// a_n = -i s/sqrt(n+1), d_n = s/sqrt(n+1), so Im(a_n d_n) = -s^2/(n+1).
inline LacunarySpec infinite_measure_spec(std::size_t terms, double amplitude = 1.0) {
  std::vector<cplx> a, c;
  for (std::size_t n = 0; n < terms; ++n) {
    const double r = amplitude / std::sqrt(static_cast<double>(n + 1));
    a.emplace_back(0.0, -r);
    c.emplace_back(r, 0.0);  // d = conj(c) = c
  }
  return LacunarySpec::real_pair(a, c);
}

/// b_k = -i/k, c_k = 1/k for k >= k0 (zero below), f and g real.
inline LacunarySpec null_measure_spec(std::size_t terms, std::size_t k0 = 1) {
  require(k0 >= 1, "null_measure_spec: k0 must be >= 1");
  LacunarySpec s;
  s.a.assign(terms, {});
  s.b.assign(terms, {});
  s.c.assign(terms, {});
  s.d.assign(terms, {});
  for (std::size_t k = k0; k < terms; ++k) {
    const double r = 1.0 / static_cast<double>(k);
    s.b[k] = {0.0, -r};
    s.a[k] = std::conj(s.b[k]);
    s.c[k] = {r, 0.0};
    s.d[k] = std::conj(s.c[k]);
  }
  return s;
}

/// sum_{l > k, l >= k0} 1/l^2 for the untruncated null-measure recipe.
inline double null_measure_tail(int k, std::size_t k0 = 1) {
  const double start = std::max<double>(static_cast<double>(k) + 1.0, static_cast<double>(k0));
  const double cut = start + 4096.0;
  double s = 0.0;
  for (double l = start; l < cut; l += 1.0) s += 1.0 / (l * l);
  return s + 1.0 / (cut - 0.5);
}

// ------------------------------------------------------ Weierstrass-type

/// sum_{n<N} amp 2^{-alpha n} cos(2 pi 2^n t + phase n): alpha-Holder with a
/// seminorm of order amp.
inline ScalarPath weierstrass(const std::vector<double>& grid, double alpha, int terms, double amp = 1.0,
                              double phase = 0.0) {
  validate_grid(grid, "weierstrass");
  require(alpha > 0.0 && alpha <= 1.0, "weierstrass: exponent must lie in (0,1]");
  if (terms - 1 > detail::max_frequency_for_grid(grid))
    throw DomainError("weierstrass: frequencies exceed the grid's Nyquist limit");
  ScalarPath p{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (int n = 0; n < terms; ++n) {
      double frac = std::ldexp(grid[i], n);
      frac -= std::floor(frac);
      s += std::pow(2.0, -alpha * n) * std::cos(2.0 * std::numbers::pi * frac + phase * n);
    }
    p.v[i] = amp * s;
  }
  return p;
}

/// Planar alpha-Holder curve built from two Weierstrass sums with different phases.
inline SampledPath holder_curve(const std::vector<double>& grid, double alpha, int terms, double amp,
                                double phase_x = 0.7, double phase_y = 1.9) {
  const ScalarPath wx = weierstrass(grid, alpha, terms, amp, phase_x);
  const ScalarPath wy = weierstrass(grid, alpha, terms, amp, phase_y);
  SampledPath p;
  p.t = grid;
  p.x = wx.v;
  p.y = wy.v;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // drop the constant offset so the curve starts at the origin
    p.x[i] -= wx.v[0];
    p.y[i] -= wy.v[0];
  }
  return p;
}

// ------------------------------------------------------------------ Koch

/// Koch-type polyline: level-n segments all have length |A1 - A0| l_n,
/// l_n = 2^{-n(1/2 + h_n)}; each refinement keeps the old vertices and adds
/// an isoceles apex, alternating sides from level to level.
struct KochSpec {
  std::function<double(int)> h = [](int) { return 1.0 / 6.0; };
  int depth = 0;
  std::array<double, 2> start{0.0, 0.0};
  std::array<double, 2> end{1.0, 0.0};
};

inline double koch_length(const KochSpec& s, int n) {
  return std::pow(2.0, -static_cast<double>(n) * (0.5 + s.h(n)));
}

/// h_n = 1/(n (ln(n+1))^2 + 2): decreasing to 0, yielding a curve of
/// Euclidean dimension 2 whose Levy area still converges.
inline double koch_slow_h(int n) {
  const double l = std::log(static_cast<double>(n) + 1.0);
  return 1.0 / (static_cast<double>(n) * l * l + 2.0);
}

inline SampledPath koch_generate(const KochSpec& s) {
  require(s.depth >= 0 && s.depth <= 24, "koch_generate: depth must lie in [0,24]");
  const double base = std::hypot(s.end[0] - s.start[0], s.end[1] - s.start[1]);
  require(base > 0.0, "koch_generate: endpoints coincide");
  std::vector<double> X{s.start[0], s.end[0]}, Y{s.start[1], s.end[1]};
  for (int n = 0; n < s.depth; ++n) {
    const double hn1 = s.h(n + 1);
    if (!(hn1 >= 0.0 && hn1 < 0.5)) throw DomainError("koch_generate: h_n must lie in [0, 1/2)");
    const double ln = base * koch_length(s, n), ln1 = base * koch_length(s, n + 1);
    const double h2 = ln1 * ln1 - 0.25 * ln * ln;
    if (h2 < -1e-15 * ln * ln)
      throw DomainError("koch_generate: infeasible h at level " + std::to_string(n + 1) + " (2 l_{n+1} < l_n)");
    const double height = std::sqrt(std::max(0.0, h2));
    const double side = (n % 2 == 0) ? 1.0 : -1.0;
    std::vector<double> NX, NY;
    NX.reserve(2 * X.size());
    NY.reserve(2 * Y.size());
    for (std::size_t i = 0; i + 1 < X.size(); ++i) {
      const double dx = X[i + 1] - X[i], dy = Y[i + 1] - Y[i];
      const double len = std::hypot(dx, dy);
      const double mx = 0.5 * (X[i] + X[i + 1]), my = 0.5 * (Y[i] + Y[i + 1]);
      NX.push_back(X[i]);
      NY.push_back(Y[i]);
      NX.push_back(mx - side * height * dy / len);
      NY.push_back(my + side * height * dx / len);
    }
    NX.push_back(X.back());
    NY.push_back(Y.back());
    X.swap(NX);
    Y.swap(NY);
  }
  SampledPath p;
  p.t = dyadic_grid(s.depth);
  p.x = std::move(X);
  p.y = std::move(Y);
  return p;
}

/// Self-similar quasi-helix target dimension beta in (1, 2]: constant h = 1/beta - 1/2.
inline KochSpec quasi_helix_spec(double beta, int depth) {
  require(beta > 1.0 && beta <= 2.0, "quasi_helix_spec: beta must lie in (1, 2]");
  KochSpec s;
  const double h = 1.0 / beta - 0.5;
  s.h = [h](int) { return h; };
  s.depth = depth;
  return s;
}

// ------------------------------------------------------------------ lifts

/// t -> (x, y, z0 - Z(t) + (t - t_0)) with Z the cumulative Levy area.
inline SampledPath vertical_lift(const SampledPath& g, double z0 = 0.0) {
  validate(g, "vertical_lift");
  const std::vector<double> Z = levy_area_cumulative(g);
  SampledPath out;
  out.kind = PathKind::Heisenberg;
  out.t = g.t;
  out.x = g.x;
  out.y = g.y;
  out.z.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out.z[i] = z0 - Z[i] + (g.t[i] - g.t[0]);
  return out;
}

/// Increasing modulus with values in (0, 1], tabulated on a log grid of delta.
struct Modulus {
  std::function<double(double)> eps;

  /// h(s) = s / eps(s), h(0) = 0.
  double h(double s) const { return s > 0.0 ? s / eps(s) : 0.0; }
};

inline Modulus constant_modulus(double value) {
  require(value > 0.0 && value <= 1.0, "modulus values must lie in (0,1]");
  return {[value](double) { return value; }};
}

/// Monotone piecewise log-linear interpolant through (delta_j, eps_j), with a
/// square-root decay below the first node so h stays continuous at 0.
inline Modulus tabulated_modulus(std::vector<double> delta, std::vector<double> eps) {
  require(!delta.empty() && delta.size() == eps.size(), "tabulated_modulus: bad table");
  for (std::size_t j = 1; j < eps.size(); ++j) eps[j] = std::max(eps[j], eps[j - 1]);
  for (double& e : eps) e = std::clamp(e, 1e-300, 1.0);
  auto f = [delta = std::move(delta), eps = std::move(eps)](double s) {
    if (s <= delta.front()) return eps.front() * std::sqrt(std::max(s, 0.0) / delta.front());
    if (s >= delta.back()) return eps.back();
    const auto it = std::upper_bound(delta.begin(), delta.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - delta.begin());
    const double u = std::log(s / delta[j - 1]) / std::log(delta[j] / delta[j - 1]);
    return eps[j - 1] + u * (eps[j] - eps[j - 1]);
  };
  return {f};
}

namespace detail {
/// For every index gap g, the largest squared planar increment at that gap.
inline std::vector<double> max_sq_increment_by_gap(const SampledPath& g) {
  const std::size_t n = g.size();
  std::vector<double> Q(n, 0.0);
  for (std::size_t gap = 1; gap < n; ++gap) {
    double m = 0.0;
    for (std::size_t i = 0; i + gap < n; ++i) {
      const double dx = g.x[i + gap] - g.x[i], dy = g.y[i + gap] - g.y[i];
      m = std::max(m, dx * dx + dy * dy);
    }
    Q[gap] = m;
  }
  return Q;
}

inline std::vector<double> log_nodes(double lo, double hi, std::size_t count) {
  std::vector<double> d(count);
  for (std::size_t j = 0; j < count; ++j)
    d[j] = lo * std::pow(hi / lo, static_cast<double>(j) / static_cast<double>(count - 1));
  return d;
}
}  // namespace detail

/// eps(delta) = c^{-1} sup_{delta0 <= delta} delta0 / dt_min(delta0), where
/// dt_min(delta0) is the smallest parameter gap with squared increment at least
/// delta0. c defaults to the largest such value so that eps <= 1.
/// Assumes a uniform grid.
inline Modulus holder_modulus(const SampledPath& g, std::optional<double> c = std::nullopt,
                              std::size_t nodes = 256) {
  validate(g, "holder_modulus");
  const std::vector<double> Q = detail::max_sq_increment_by_gap(g);
  const double dt = (g.t.back() - g.t.front()) / static_cast<double>(g.size() - 1);
  double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
  for (std::size_t gap = 1; gap < Q.size(); ++gap)
    if (Q[gap] > 0.0) {
      qmin = std::min(qmin, Q[gap]);
      qmax = std::max(qmax, Q[gap]);
    }
  require(qmax > 0.0, "holder_modulus: curve reduced to a point");
  const std::vector<double> delta = detail::log_nodes(qmin, qmax, nodes);
  // running max of Q over gaps gives dt_min(delta) by a monotone scan
  std::vector<double> runmax(Q.size(), 0.0);
  for (std::size_t gap = 1; gap < Q.size(); ++gap) runmax[gap] = std::max(runmax[gap - 1], Q[gap]);
  std::vector<double> eps(nodes);
  std::size_t gap = 1;
  double sup = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    while (gap + 1 < runmax.size() && runmax[gap] < delta[j]) ++gap;
    sup = std::max(sup, delta[j] / (static_cast<double>(gap) * dt));
    eps[j] = sup;
  }
  const double cc = c.value_or(eps.back());
  for (double& e : eps) e /= cc;
  return tabulated_modulus(delta, eps);
}

/// eps(delta) built from 2 delta max (|t-s| S_{k(|t-s|)})^{-1} over pairs with
/// squared increment at least delta, S_k a positive tail of the area series.
/// Made increasing and capped at 1. Assumes a uniform grid on a unit span.
inline Modulus tail_modulus(const SampledPath& g, const std::function<double(int)>& tail, std::size_t nodes = 256) {
  validate(g, "tail_modulus");
  const std::vector<double> Q = detail::max_sq_increment_by_gap(g);
  const double dt = (g.t.back() - g.t.front()) / static_cast<double>(g.size() - 1);
  double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
  for (std::size_t gap = 1; gap < Q.size(); ++gap)
    if (Q[gap] > 0.0) {
      qmin = std::min(qmin, Q[gap]);
      qmax = std::max(qmax, Q[gap]);
    }
  require(qmax > 0.0, "tail_modulus: curve reduced to a point");
  std::vector<double> runmax(Q.size(), 0.0);
  for (std::size_t gap = 1; gap < Q.size(); ++gap) runmax[gap] = std::max(runmax[gap - 1], Q[gap]);
  const std::vector<double> delta = detail::log_nodes(qmin, qmax, nodes);
  std::vector<double> eps(nodes);
  std::size_t gap = 1;
  for (std::size_t j = 0; j < nodes; ++j) {
    while (gap + 1 < runmax.size() && runmax[gap] < delta[j]) ++gap;
    // the weight (|t-s| S_k)^{-1} decreases with the gap, so the smallest
    // admissible gap attains the max
    const double span = static_cast<double>(gap) * dt;
    const double S = tail(dyadic_scale(span));
    eps[j] = std::min(1.0, 2.0 * delta[j] / (span * S));
  }
  return tabulated_modulus(delta, eps);
}

struct RoughLift {
  SampledPath lift;
  bool finite = true;     ///< false when the variation exceeded the cap
  double variation = 0.0; ///< z(T)
};

/// z(t) = sup over grid chains 0 = t_0 < ... < t_m = t of
/// sum h(|g(t_{k+1}) - g(t_k)|^2) + 2 det(g(t_{k+1}), g(t_k)).
inline RoughLift rough_lift(const SampledPath& g, const Modulus& mod,
                            double cap = std::numeric_limits<double>::infinity()) {
  validate(g, "rough_lift");
  auto w = [&](std::size_t i, std::size_t j) {
    const double dx = g.x[j] - g.x[i], dy = g.y[j] - g.y[i];
    return mod.h(dx * dx + dy * dy) + det_increment(g, i, j);
  };
  RoughLift out;
  const std::vector<double> z = chain_extremum(0, g.size() - 1, w, true);
  out.lift.kind = PathKind::Heisenberg;
  out.lift.t = g.t;
  out.lift.x = g.x;
  out.lift.y = g.y;
  out.lift.z = z;
  out.variation = z.back();
  out.finite = std::isfinite(out.variation) && out.variation <= cap;
  return out;
}

}  // namespace heis
