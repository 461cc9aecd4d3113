// Independent reference computations used by the tests. Nothing here calls the
// library's quadrature rules or pair transformations.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

struct P {
  double x = 0.0, y = 0.0;
};
inline P operator+(P a, P b) { return {a.x + b.x, a.y + b.y}; }
inline P operator-(P a, P b) { return {a.x - b.x, a.y - b.y}; }
inline P operator*(double t, P a) { return {t * a.x, t * a.y}; }
inline double dot(P a, P b) { return a.x * b.x + a.y * b.y; }
inline double cross(P a, P b) { return a.x * b.y - a.y * b.x; }

/// Gauss-Legendre nodes/weights on [a, b] from Boost's tables.
template <int N>
void gauss_on(double a, double b, std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0) {
      x.push_back(c);
      w.push_back(h * wt[i]);
    } else {
      x.push_back(c - h * ab[i]);
      w.push_back(h * wt[i]);
      x.push_back(c + h * ab[i]);
      w.push_back(h * wt[i]);
    }
  }
}

/// Composite Gauss on [0, 1] with geometric panels toward 0 (ratio 0.2).
template <int N>
void graded_on_unit(int levels, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  double hi = 1.0;
  std::vector<double> gx, gw;
  for (int l = 0; l <= levels; ++l) {
    const double lo = l == levels ? 0.0 : 0.2 * hi;
    gauss_on<N>(lo, hi, gx, gw);
    x.insert(x.end(), gx.begin(), gx.end());
    w.insert(w.end(), gw.begin(), gw.end());
    hi = lo;
  }
}

/// Composite Gauss on [0, 1] graded geometrically toward both ends.
template <int N>
void graded_both_ends(int levels, std::vector<double>& x, std::vector<double>& w) {
  std::vector<double> hx, hw;
  graded_on_unit<N>(levels, hx, hw);
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < hx.size(); ++i) {
    x.push_back(0.5 * hx[i]);
    w.push_back(0.5 * hw[i]);
    x.push_back(1.0 - 0.5 * hx[i]);
    w.push_back(0.5 * hw[i]);
  }
}

struct Tri {
  std::array<P, 3> v;
  std::array<int, 3> id;  // global vertex ids

  double area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
  /// Gradient of the barycentric coordinate of local vertex k.
  P grad(int k) const {
    const P a = v[(k + 1) % 3], b = v[(k + 2) % 3];
    const double twice = 2.0 * area();
    return {(a.y - b.y) / twice, (b.x - a.x) / twice};
  }
  /// Value at x of the affine extension of the hat of global vertex g (0 if g is not a vertex).
  double hat(int g, P x) const {
    for (int k = 0; k < 3; ++k) {
      if (id[k] == g) return 1.0 + dot(grad(k), x - v[k]);
    }
    return 0.0;
  }
  P hat_grad(int g) const {
    for (int k = 0; k < 3; ++k) {
      if (id[k] == g) return grad(k);
    }
    return {};
  }
};

/// Parameter interval [lo, hi] of the ray x + rho w inside the triangle (empty: lo > hi).
inline std::array<double, 2> clip_ray(const Tri& t, P x, P w) {
  double lo = 0.0, hi = 1e300;
  for (int k = 0; k < 3; ++k) {
    const P a = t.v[k], b = t.v[(k + 1) % 3];
    // inside: cross(b - a, x + rho w - a) >= 0
    const double c0 = cross(b - a, x - a);
    const double c1 = cross(b - a, w);
    if (std::abs(c1) < 1e-300) {
      if (c0 < 0.0) return {1.0, 0.0};
      continue;
    }
    const double r = -c0 / c1;
    if (c1 > 0.0) lo = std::max(lo, r);
    else hi = std::min(hi, r);
  }
  return {lo, hi};
}

/// int_{T'} (phi_a(x) - phi_a(y)) (phi_b(x) - phi_b(y)) |x - y|^(-2-2s) dy for one x,
/// in polar coordinates about x with the radial integral in closed form.
/// `tx` is the element containing x (hat values at x come from it).
inline double inner_polar(const Tri& tx, const Tri& ty, P x, int a, int b, double s, bool same,
                          int angular_levels = 6) {
  const double A = tx.hat(a, x) - ty.hat(a, x);
  const double B = tx.hat(b, x) - ty.hat(b, x);
  const P ga = ty.hat_grad(a), gb = ty.hat_grad(b);
  // angular breakpoints at the vertices of ty
  std::vector<double> angles;
  if (same) {
    for (int k = 0; k < 3; ++k) angles.push_back(std::atan2(ty.v[k].y - x.y, ty.v[k].x - x.x));
    std::sort(angles.begin(), angles.end());
    angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  } else {
    // x is outside ty: the visible sector spans the vertex directions
    const double base = std::atan2(ty.v[0].y - x.y, ty.v[0].x - x.x);
    std::vector<double> rel;
    for (int k = 0; k < 3; ++k) {
      const P d = ty.v[k] - x;
      if (std::hypot(d.x, d.y) < 1e-14) continue;  // x at a shared vertex
      double t = std::atan2(d.y, d.x) - base;
      while (t > std::numbers::pi) t -= 2.0 * std::numbers::pi;
      while (t < -std::numbers::pi) t += 2.0 * std::numbers::pi;
      rel.push_back(t);
    }
    std::sort(rel.begin(), rel.end());
    for (double t : rel) angles.push_back(base + t);
  }
  double total = 0.0;
  std::vector<double> gx, gw;
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
    if (angles[i + 1] - angles[i] < 1e-15) continue;
    // graded toward both panel ends: the radial limits vary fastest there when x is near an edge
    graded_both_ends<10>(angular_levels, gx, gw);
    const double t0 = angles[i], dt = angles[i + 1] - angles[i];
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double theta = t0 + dt * gx[q];
      const P w{std::cos(theta), std::sin(theta)};
      auto [lo, hi] = clip_ray(ty, x, w);
      if (!(hi > lo)) continue;
      const double al = dot(ga, w), be = dot(gb, w);
      const double e = 2.0 * s;
      // (A - rho al)(B - rho be) rho^(-1-2s) drho
      auto prim = [&](double r) {
        double v = 0.0;
        if (A * B != 0.0) v += A * B * std::pow(r, -e) / (-e);
        if (A * be + B * al != 0.0) v -= (A * be + B * al) * std::pow(r, 1.0 - e) / (1.0 - e);
        v += al * be * std::pow(r, 2.0 - e) / (2.0 - e);
        return v;
      };
      const double lo_val = (lo <= 0.0) ? 0.0 : prim(lo);
      total += dt * gw[q] * (prim(hi) - lo_val);
    }
  }
  return total;
}

/// Reference local entry over T x T' for hats of global vertices a, b.
/// The x-integral runs over sub-triangles collapsed away from each edge of T
/// that touches T', graded toward the edge and its end points.
inline double pair_entry(const Tri& t, const Tri& tp, int a, int b, double s, int levels = 8,
                         int angular_levels = 6) {
  std::vector<int> shared;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (t.id[i] == tp.id[j]) shared.push_back(i);
    }
  }
  const bool same = shared.size() == 3;
  std::vector<double> ux, uw, vx, vw;
  graded_on_unit<10>(levels, ux, uw);
  graded_both_ends<10>(levels, vx, vw);
  // sub-triangles (apex, e1, e2): x = apex + u ((e1 - apex) + v (e2 - e1)), singular set at u = 1
  std::vector<std::array<P, 3>> parts;
  if (shared.size() == 1) {
    // collapse at the shared vertex itself: singular at u = 0
    const int k = shared[0];
    parts.push_back({t.v[k], t.v[(k + 1) % 3], t.v[(k + 2) % 3]});
  } else {
    const P c = (1.0 / 3.0) * (t.v[0] + t.v[1] + t.v[2]);
    for (int k = 0; k < 3; ++k) parts.push_back({c, t.v[k], t.v[(k + 1) % 3]});
  }
  double total = 0.0;
  for (const auto& part : parts) {
    const P pa = part[0], p1 = part[1], p2 = part[2];
    const double jac = std::abs(cross(p1 - pa, p2 - pa));
    for (std::size_t i = 0; i < ux.size(); ++i) {
      const double u = shared.size() == 1 ? ux[i] : 1.0 - ux[i];
      for (std::size_t j = 0; j < vx.size(); ++j) {
        const P x = pa + u * ((p1 - pa) + vx[j] * (p2 - p1));
        total += jac * u * uw[i] * vw[j] * inner_polar(t, tp, x, a, b, s, same, angular_levels);
      }
    }
  }
  return total;
}

/// Brute-force tensor Gauss for well separated triangles.
inline double disjoint_entry(const Tri& t, const Tri& tp, int a, int b, double s) {
  std::vector<double> gx, gw;
  gauss_on<20>(0.0, 1.0, gx, gw);
  auto points = [&](const Tri& tr, std::vector<P>& x, std::vector<double>& w) {
    for (std::size_t i = 0; i < gx.size(); ++i) {
      for (std::size_t j = 0; j < gx.size(); ++j) {
        const double u = gx[i], v = gx[j];
        x.push_back(tr.v[0] + u * ((tr.v[1] - tr.v[0]) + v * (tr.v[2] - tr.v[1])));
        w.push_back(2.0 * tr.area() * u * gw[i] * gw[j]);
      }
    }
  };
  std::vector<P> xs, ys;
  std::vector<double> wx, wy;
  points(t, xs, wx);
  points(tp, ys, wy);
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fa = t.hat(a, xs[i]), fb = t.hat(b, xs[i]);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const P d = xs[i] - ys[j];
      const double r2 = dot(d, d);
      total += wx[i] * wy[j] * (fa - tp.hat(a, ys[j])) * (fb - tp.hat(b, ys[j])) * std::pow(r2, -1.0 - s);
    }
  }
  return total;
}

/// int over the complement of a convex polygon (counter-clockwise vertices)
/// of |x - y|^(-2-2s), by polar coordinates about x: the radial integral to
/// infinity is R^-2s / 2s, the angular one is split at the vertex directions.
inline double complement_polygon(const std::vector<P>& poly, P x, double s) {
  std::vector<double> angles;
  for (const P& v : poly) angles.push_back(std::atan2(v.y - x.y, v.x - x.x));
  std::sort(angles.begin(), angles.end());
  angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  // panels graded toward both ends: R(theta)^-2s is not smooth where a panel
  // reaches grazing incidence (x close to the edge)
  std::vector<double> gx, gw;
  graded_both_ends<12>(12, gx, gw);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
    const double t0 = angles[i], dt = angles[i + 1] - angles[i];
    if (dt <= 0.0) continue;
    // the edge hit inside this panel is the one seen at its mid angle
    const P wm{std::cos(t0 + 0.5 * dt), std::sin(t0 + 0.5 * dt)};
    std::size_t hit = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const P a = poly[k], b = poly[(k + 1) % poly.size()];
      const double c1 = cross(b - a, wm);
      if (c1 < 0.0) {
        const double r = -cross(b - a, x - a) / c1;
        if (r < best) {
          best = r;
          hit = k;
        }
      }
    }
    const P a = poly[hit], b = poly[(hit + 1) % poly.size()];
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double theta = t0 + dt * gx[q];
      const P w{std::cos(theta), std::sin(theta)};
      const double r = -cross(b - a, x - a) / cross(b - a, w);
      total += dt * gw[q] * std::pow(r, -2.0 * s) / (2.0 * s);
    }
  }
  return total;
}

/// Same quantity by two nested 1D integrals to infinity (exp_sinh) without
/// using the closed-form radial tail: checks the radial formula itself.
inline double complement_polygon_radial(const std::vector<P>& poly, P x, double s) {
  boost::math::quadrature::exp_sinh<double> tail;
  std::vector<double> angles;
  for (const P& v : poly) angles.push_back(std::atan2(v.y - x.y, v.x - x.x));
  std::sort(angles.begin(), angles.end());
  angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  std::vector<double> gx, gw;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
    gauss_on<30>(angles[i], angles[i + 1], gx, gw);
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const P w{std::cos(gx[q]), std::sin(gx[q])};
      double r = 1e300;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const P a = poly[k], b = poly[(k + 1) % poly.size()];
        const double c1 = cross(b - a, w);
        if (c1 < 0.0) r = std::min(r, -cross(b - a, x - a) / c1);
      }
      const double radial = tail.integrate([&](double t) { return std::pow(r + t, -1.0 - 2.0 * s); }, 1e-13);
      total += gw[q] * radial;
    }
  }
  return total;
}

/// Squared energy norm of the truncated sine via its Fourier transform:
/// 4 pi int_0^inf xi^(2s) sin^2(xi) / (pi^2 - xi^2)^2 dxi (removable point at xi = pi).
inline double sine_energy_fourier(double s) {
  const double pi = std::numbers::pi;
  auto g = [&](double xi) {
    const double d = pi * pi - xi * xi;
    if (std::abs(xi - pi) < 1e-4) {
      // sin(xi) = -sin(xi - pi) ~ -(xi - pi); (pi^2 - xi^2) = -(xi - pi)(xi + pi)
      const double e = xi - pi;
      const double ratio = (std::sin(e) / e) / (xi + pi);
      return std::pow(xi, 2.0 * s) * ratio * ratio;
    }
    const double sn = std::sin(xi);
    return std::pow(xi, 2.0 * s) * sn * sn / (d * d);
  };
  double total = 0.0;
  // integrate period by period to a cutoff, then the averaged tail
  const int periods = 4000;
  for (int k = 0; k < periods; ++k) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, k * pi, (k + 1) * pi, 15, 1e-14);
  }
  // tail: sin^2 averages to 1/2, xi^(2s - 4) / 2 beyond X plus the next-order term
  const double X = periods * pi;
  const double tail = 0.5 * std::pow(X, 2.0 * s - 3.0) / (3.0 - 2.0 * s) +
                      pi * pi * std::pow(X, 2.0 * s - 5.0) / (5.0 - 2.0 * s);
  return 4.0 * pi * (total + tail);
}

/// (-Delta)^s of the truncated sine at x by folding about x and splitting
/// at the support ends; tanh-sinh handles the endpoint behaviour.
inline double flap_sine(double x, double s) {
  const double pi = std::numbers::pi;
  auto u = [&](double y) { return std::abs(y) < 1.0 ? std::sin(pi * y) : 0.0; };
  const double c = std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 0.5) / (std::sqrt(pi) * std::tgamma(1.0 - s));
  auto folded = [&](double t) {
    if (t <= 0.0) return 0.0;
    // while both shifts stay inside, 2 sin(pi x) - sin(pi (x + t)) - sin(pi (x - t)) = 4 sin(pi x) sin^2(pi t / 2)
    if (t < 1.0 - std::abs(x)) {
      const double q = std::sin(0.5 * pi * t) / t;
      return 4.0 * u(x) * q * q * std::pow(t, 1.0 - 2.0 * s);
    }
    return (2.0 * u(x) - u(x + t) - u(x - t)) * std::pow(t, -1.0 - 2.0 * s);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double a = 1.0 - std::abs(x), b = 1.0 + std::abs(x);
  double v = ts.integrate(folded, 0.0, a, 1e-13) + ts.integrate(folded, a, b, 1e-13);
  // beyond b both u(x +- t) vanish
  v += 2.0 * u(x) * std::pow(b, -2.0 * s) / (2.0 * s);
  return c * v;
}

}  // namespace oracle
