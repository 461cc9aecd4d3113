#include "fraclap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "fraclap/error.hpp"

namespace fraclap {

namespace {

// Double-precision internals; the default promotes to long double and is several times slower.
using double_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.points[lo] = 0.5 * (1.0 - x);
    rule.points[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  if (n % 2 == 1) rule.points[static_cast<std::size_t>(n / 2)] = 0.5;
  return rule;
}

TriangleRule make_triangle_rule(int order) {
  const GaussRule& g = gauss_rule_1d(order);
  TriangleRule rule;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double u = g.points[i];
      rule.points.push_back({u, (1.0 - u) * g.points[j]});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

// --- element helpers -------------------------------------------------------

struct Triangle {
  std::array<Vec2, 3> p;
  std::array<Index, 3> v;
  double area;
  std::array<Vec2, 3> grad;  // gradients of the barycentric coordinates
};

Triangle make_triangle(const Mesh& mesh, Index e, std::array<int, 3> order = {0, 1, 2}) {
  auto c = mesh.element(e);
  Triangle t{};
  for (int k = 0; k < 3; ++k) {
    t.v[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    t.p[static_cast<std::size_t>(k)] = mesh.vertex(t.v[static_cast<std::size_t>(k)]);
  }
  t.area = 0.5 * std::abs(cross(t.p[1] - t.p[0], t.p[2] - t.p[0]));
  const double two_a = 0.5 / t.area;
  for (int i = 0; i < 3; ++i) {
    const Vec2 pj = t.p[static_cast<std::size_t>((i + 1) % 3)];
    const Vec2 pk = t.p[static_cast<std::size_t>((i + 2) % 3)];
    // sign fixed so that grad . (p_i - p_j) = 1
    Vec2 g{(pj.y - pk.y) * two_a, (pk.x - pj.x) * two_a};
    if (dot(g, t.p[static_cast<std::size_t>(i)] - pj) < 0.0) g = -1.0 * g;
    t.grad[static_cast<std::size_t>(i)] = g;
  }
  return t;
}

// Adds w * d d^T to the leading size x size block.
inline void add_outer(LocalPairMatrix& m, double w, const std::array<double, 6>& d) {
  for (int a = 0; a < m.size; ++a) {
    const double wa = w * d[static_cast<std::size_t>(a)];
    for (int b = 0; b <= a; ++b) m(a, b) += wa * d[static_cast<std::size_t>(b)];
  }
}

inline void mirror_lower(LocalPairMatrix& m) {
  for (int a = 0; a < m.size; ++a) {
    for (int b = 0; b < a; ++b) m(b, a) = m(a, b);
  }
}

// --- panel refinement for touching pairs ---------------------------------
// The reduced touching integrands are smooth times |sep|^(-2-2s) with sep an
// affine image of the parameters. Sep never vanishes on a face, but comes close
// for thin elements, so panels are split until their image is no wider than its
// distance from the origin (up to a fixed ratio). Gauss rules then converge
// uniformly in the element shape.

// Interval panels are cheap and get the stricter ratio; 2D faces and prisms
// (order^2 and order^3 points) trade a looser one for speed.
constexpr double interval_admissibility = 1.0;
constexpr double panel_admissibility = 1.5;
constexpr int max_refinement = 40;

inline double segment_distance(Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double len2 = norm2(e);
  const double t = len2 > 0.0 ? std::clamp(-dot(a, e) / len2, 0.0, 1.0) : 0.0;
  return norm(a + t * e);
}

// The image of a convex panel is the hull of the images of its corners; the
// origin lies outside it, so the nearest point sits on a segment between corners.
template <std::size_t N>
bool admissible(const std::array<Vec2, N>& pts, double ratio) {
  double diameter = 0.0, distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      diameter = std::max(diameter, norm(pts[i] - pts[j]));
      distance = std::min(distance, segment_distance(pts[i], pts[j]));
    }
  }
  return diameter <= ratio * distance;
}

template <class Image, class Leaf>
void refine_interval(double t0, double t1, const Image& image, const Leaf& leaf, int depth = 0) {
  const std::array<Vec2, 2> pts{image(t0), image(t1)};
  if (depth >= max_refinement || admissible(pts, interval_admissibility)) {
    leaf(t0, t1);
    return;
  }
  const double tm = 0.5 * (t0 + t1);
  refine_interval(t0, tm, image, leaf, depth + 1);
  refine_interval(tm, t1, image, leaf, depth + 1);
}

// Rectangle [u0, u1] x [v0, v1]; splits only the direction(s) the image stretches.
template <class Image, class Leaf>
void refine_rectangle(double u0, double u1, double v0, double v1, const Image& image, const Leaf& leaf,
                      int depth = 0) {
  const std::array<Vec2, 4> pts{image(u0, v0), image(u1, v0), image(u0, v1), image(u1, v1)};
  if (depth >= max_refinement || admissible(pts, panel_admissibility)) {
    leaf(u0, u1, v0, v1);
    return;
  }
  const double eu = norm(pts[1] - pts[0]), ev = norm(pts[2] - pts[0]);
  const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
  if (eu > 2.0 * ev) {
    refine_rectangle(u0, um, v0, v1, image, leaf, depth + 1);
    refine_rectangle(um, u1, v0, v1, image, leaf, depth + 1);
  } else if (ev > 2.0 * eu) {
    refine_rectangle(u0, u1, v0, vm, image, leaf, depth + 1);
    refine_rectangle(u0, u1, vm, v1, image, leaf, depth + 1);
  } else {
    refine_rectangle(u0, um, v0, vm, image, leaf, depth + 1);
    refine_rectangle(um, u1, v0, vm, image, leaf, depth + 1);
    refine_rectangle(u0, um, vm, v1, image, leaf, depth + 1);
    refine_rectangle(um, u1, vm, v1, image, leaf, depth + 1);
  }
}

using ParamTriangle = std::array<Vec2, 3>;

inline std::array<ParamTriangle, 4> split_triangle(const ParamTriangle& c) {
  const Vec2 m01 = 0.5 * (c[0] + c[1]), m12 = 0.5 * (c[1] + c[2]), m20 = 0.5 * (c[2] + c[0]);
  return {ParamTriangle{c[0], m01, m20}, ParamTriangle{m01, c[1], m12}, ParamTriangle{m20, m12, c[2]},
          ParamTriangle{m12, m20, m01}};
}

template <class Image, class Leaf>
void refine_triangle(const ParamTriangle& c, const Image& image, const Leaf& leaf, int depth = 0) {
  const std::array<Vec2, 3> pts{image(c[0]), image(c[1]), image(c[2])};
  if (depth >= max_refinement || admissible(pts, panel_admissibility)) {
    leaf(c);
    return;
  }
  for (const ParamTriangle& child : split_triangle(c)) refine_triangle(child, image, leaf, depth + 1);
}

// Prism [t0, t1] x triangle c.
template <class Image, class Leaf>
void refine_prism(double t0, double t1, const ParamTriangle& c, const Image& image, const Leaf& leaf,
                  int depth = 0) {
  const std::array<Vec2, 6> pts{image(t0, c[0]), image(t0, c[1]), image(t0, c[2]),
                                image(t1, c[0]), image(t1, c[1]), image(t1, c[2])};
  if (depth >= max_refinement || admissible(pts, panel_admissibility)) {
    leaf(t0, t1, c);
    return;
  }
  const double et = norm(pts[3] - pts[0]);
  const double ec = std::max({norm(pts[1] - pts[0]), norm(pts[2] - pts[0]), norm(pts[2] - pts[1])});
  const double tm = 0.5 * (t0 + t1);
  if (et > 2.0 * ec) {
    refine_prism(t0, tm, c, image, leaf, depth + 1);
    refine_prism(tm, t1, c, image, leaf, depth + 1);
    return;
  }
  for (const ParamTriangle& child : split_triangle(c)) {
    if (ec > 2.0 * et) {
      refine_prism(t0, t1, child, image, leaf, depth + 1);
    } else {
      refine_prism(t0, tm, child, image, leaf, depth + 1);
      refine_prism(tm, t1, child, image, leaf, depth + 1);
    }
  }
}

inline Vec2 on_triangle(const ParamTriangle& c, Vec2 r) { return c[0] + r.x * (c[1] - c[0]) + r.y * (c[2] - c[0]); }

// Reference triangle weights sum to 1/2.
inline double triangle_jacobian(const ParamTriangle& c) { return std::abs(cross(c[1] - c[0], c[2] - c[0])); }

constexpr ParamTriangle reference_triangle{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};

// Integral of kernel-weighted hat differences for two triangles with disjoint closures.
LocalPairMatrix disjoint_2d(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  const Triangle a = make_triangle(mesh, t1);
  const Triangle b = make_triangle(mesh, t2);
  const TriangleRule& rule = triangle_rule(order);
  LocalPairMatrix m;
  m.size = 6;
  for (int k = 0; k < 3; ++k) {
    m.vertices[static_cast<std::size_t>(k)] = a.v[static_cast<std::size_t>(k)];
    m.vertices[static_cast<std::size_t>(k + 3)] = b.v[static_cast<std::size_t>(k)];
  }
  const double expo = -(1.0 + s);
  const double jac = 4.0 * a.area * b.area;
  std::array<double, 6> d{};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec2 r = rule.points[i];
    const Vec2 x = a.p[0] + r.x * (a.p[1] - a.p[0]) + r.y * (a.p[2] - a.p[0]);
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const Vec2 q = rule.points[j];
      const Vec2 y = b.p[0] + q.x * (b.p[1] - b.p[0]) + q.y * (b.p[2] - b.p[0]);
      const double w = jac * rule.weights[i] * rule.weights[j] * std::pow(norm2(x - y), expo);
      d = {1.0 - r.x - r.y, r.x, r.y, -(1.0 - q.x - q.y), -q.x, -q.y};
      add_outer(m, w, d);
    }
  }
  mirror_lower(m);
  return m;
}

// Identical triangles. With z = x - y, the overlap T n (T + z) is a homothetic
// copy of T scaled by (1 - g(z)), g the gauge of the difference hexagon T - T.
// In gauge-polar coordinates z = rho * w (g(w) = 1) the radial integral is
// int_0^1 rho^(1-2s) (1 - rho)^2 drho; the rest is a Gauss rule on the six
// hexagon edges.
LocalPairMatrix identical_2d(const Mesh& mesh, Index t, double s, int order) {
  const Triangle tri = make_triangle(mesh, t);
  LocalPairMatrix m;
  m.size = 3;
  for (int k = 0; k < 3; ++k) m.vertices[static_cast<std::size_t>(k)] = tri.v[static_cast<std::size_t>(k)];

  std::array<Vec2, 6> hex{};
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) hex[static_cast<std::size_t>(n++)] = tri.p[static_cast<std::size_t>(i)] - tri.p[static_cast<std::size_t>(j)];
    }
  }
  std::sort(hex.begin(), hex.end(),
            [](Vec2 a, Vec2 b) { return std::atan2(a.y, a.x) < std::atan2(b.y, b.x); });

  const double radial = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s) * (4.0 - 2.0 * s));
  const double factor = tri.area * radial;
  const double expo = -(1.0 + s);
  const GaussRule& g = gauss_rule_1d(order);
  std::array<double, 6> d{};
  for (int e = 0; e < 6; ++e) {
    const Vec2 p = hex[static_cast<std::size_t>(e)];
    const Vec2 q = hex[static_cast<std::size_t>((e + 1) % 6)];
    const double jac = std::abs(cross(p, q));
    auto image = [&](double t) { return p + t * (q - p); };
    refine_interval(0.0, 1.0, image, [&](double t0, double t1) {
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec2 w = image(t0 + (t1 - t0) * g.points[k]);
        for (int a = 0; a < 3; ++a) d[static_cast<std::size_t>(a)] = dot(tri.grad[static_cast<std::size_t>(a)], w);
        add_outer(m, factor * jac * (t1 - t0) * g.weights[k] * std::pow(norm2(w), expo), d);
      }
    });
  }
  mirror_lower(m);
  return m;
}

// Common edge PQ, T = (P, Q, A), T' = (P, Q, B). Relative variables
// w = (z, beta, delta) with z = alpha - gamma; the free edge coordinate alpha
// ranges over an interval of length 1 - G(w), G(w) = max(beta + z+, delta + z-).
// Radial integral int_0^1 rho^(2-2s) (1 - rho) drho; four planar faces of G = 1.
LocalPairMatrix shared_edge_2d(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  auto c1 = mesh.element(t1);
  auto c2 = mesh.element(t2);
  std::array<int, 3> o1{}, o2{};
  {
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if (std::find(c2.begin(), c2.end(), c1[static_cast<std::size_t>(i)]) != c2.end()) o1[static_cast<std::size_t>(k++)] = i;
    }
    for (int i = 0; i < 3; ++i) {
      if (std::find(c2.begin(), c2.end(), c1[static_cast<std::size_t>(i)]) == c2.end()) o1[2] = i;
    }
    const Index p = c1[static_cast<std::size_t>(o1[0])], q = c1[static_cast<std::size_t>(o1[1])];
    for (int i = 0; i < 3; ++i) {
      const Index v = c2[static_cast<std::size_t>(i)];
      if (v == p) o2[0] = i;
      else if (v == q) o2[1] = i;
      else o2[2] = i;
    }
  }
  const Triangle a = make_triangle(mesh, t1, o1);
  const Triangle b = make_triangle(mesh, t2, o2);
  LocalPairMatrix m;
  m.size = 4;
  m.vertices = {a.v[0], a.v[1], a.v[2], b.v[2], 0, 0};

  const Vec2 eq = a.p[1] - a.p[0];
  const Vec2 ea = a.p[2] - a.p[0];
  const Vec2 eb = b.p[2] - b.p[0];
  const double factor = 4.0 * a.area * b.area / ((3.0 - 2.0 * s) * (4.0 - 2.0 * s));
  const double expo = -(1.0 + s);
  const GaussRule& g = gauss_rule_1d(order);
  const TriangleRule& tr = triangle_rule(order);
  std::array<double, 6> d{};

  auto sep_of = [&](double z, double beta, double delta) { return z * eq + beta * ea - delta * eb; };
  auto eval = [&](double z, double beta, double delta, double w) {
    d[0] = -z - beta + delta;
    d[1] = z;
    d[2] = beta;
    d[3] = -delta;
    add_outer(m, factor * w * std::pow(norm2(sep_of(z, beta, delta)), expo), d);
  };

  // square faces: z >= 0 with beta + z = 1, and z < 0 with delta - z = 1
  for (const int sign : {1, -1}) {
    auto face = [&](double u, double v, double w) {
      if (sign > 0) eval(u, 1.0 - u, v, w);
      else eval(-u, v, 1.0 - u, w);
    };
    auto image = [&](double u, double v) {
      return sign > 0 ? sep_of(u, 1.0 - u, v) : sep_of(-u, v, 1.0 - u);
    };
    refine_rectangle(0.0, 1.0, 0.0, 1.0, image, [&](double u0, double u1, double v0, double v1) {
      const double area = (u1 - u0) * (v1 - v0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
          face(u0 + (u1 - u0) * g.points[i], v0 + (v1 - v0) * g.points[j], area * g.weights[i] * g.weights[j]);
        }
      }
    });
  }
  // triangle faces: z >= 0 with delta = 1, and z < 0 with beta = 1
  for (const int sign : {1, -1}) {
    auto image = [&](Vec2 r) { return sign > 0 ? sep_of(r.x, r.y, 1.0) : sep_of(-r.x, 1.0, r.y); };
    refine_triangle(reference_triangle, image, [&](const ParamTriangle& c) {
      const double jac = triangle_jacobian(c);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        const Vec2 r = on_triangle(c, tr.points[i]);
        if (sign > 0) eval(r.x, r.y, 1.0, jac * tr.weights[i]);
        else eval(-r.x, 1.0, r.y, jac * tr.weights[i]);
      }
    });
  }
  mirror_lower(m);
  return m;
}

// Common vertex P, T = (P, A1, A2), T' = (P, B1, B2). The product of reference
// triangles is swept by xi * (a, b) with max(|a|_1, |b|_1) = 1, giving the radial
// factor int_0^1 xi^(3-2s) dxi and two faces: |a|_1 = 1 and |b|_1 = 1.
LocalPairMatrix shared_vertex_2d(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  auto c1 = mesh.element(t1);
  auto c2 = mesh.element(t2);
  int i1 = 0, i2 = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (c1[static_cast<std::size_t>(i)] == c2[static_cast<std::size_t>(j)]) {
        i1 = i;
        i2 = j;
      }
    }
  }
  const Triangle a = make_triangle(mesh, t1, {i1, (i1 + 1) % 3, (i1 + 2) % 3});
  const Triangle b = make_triangle(mesh, t2, {i2, (i2 + 1) % 3, (i2 + 2) % 3});
  LocalPairMatrix m;
  m.size = 5;
  m.vertices = {a.v[0], a.v[1], a.v[2], b.v[1], b.v[2], 0};

  const Vec2 a1 = a.p[1] - a.p[0], a2 = a.p[2] - a.p[0];
  const Vec2 b1 = b.p[1] - b.p[0], b2 = b.p[2] - b.p[0];
  const double factor = 4.0 * a.area * b.area / (4.0 - 2.0 * s);
  const double expo = -(1.0 + s);
  const GaussRule& g = gauss_rule_1d(order);
  const TriangleRule& tr = triangle_rule(order);
  std::array<double, 6> d{};

  auto sep_of = [&](double x1, double x2, double y1, double y2) { return x1 * a1 + x2 * a2 - y1 * b1 - y2 * b2; };
  auto eval = [&](double x1, double x2, double y1, double y2, double w) {
    d[0] = (y1 + y2) - (x1 + x2);
    d[1] = x1;
    d[2] = x2;
    d[3] = -y1;
    d[4] = -y2;
    add_outer(m, factor * w * std::pow(norm2(sep_of(x1, x2, y1, y2)), expo), d);
  };

  // faces |a|_1 = 1 and |b|_1 = 1: an edge parameter t times a triangle r
  for (const bool first : {true, false}) {
    auto face = [&](double t, Vec2 r, double w) {
      if (first) eval(t, 1.0 - t, r.x, r.y, w);
      else eval(r.x, r.y, t, 1.0 - t, w);
    };
    auto image = [&](double t, Vec2 r) {
      return first ? sep_of(t, 1.0 - t, r.x, r.y) : sep_of(r.x, r.y, t, 1.0 - t);
    };
    refine_prism(0.0, 1.0, reference_triangle, image, [&](double t0, double t1, const ParamTriangle& c) {
      const double jac = (t1 - t0) * triangle_jacobian(c);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = t0 + (t1 - t0) * g.points[i];
        for (std::size_t j = 0; j < tr.size(); ++j) face(t, on_triangle(c, tr.points[j]), jac * g.weights[i] * tr.weights[j]);
      }
    });
  }
  mirror_lower(m);
  return m;
}

// --- 1D --------------------------------------------------------------------

LocalPairMatrix identical_1d(const Mesh& mesh, Index t, double s) {
  auto c = mesh.element(t);
  const double h = mesh.measure(t);
  LocalPairMatrix m;
  m.size = 2;
  m.vertices = {c[0], c[1], 0, 0, 0, 0};
  // (lambda_a' lambda_b') * 2 h^(3-2s) / ((2-2s)(3-2s)), lambda' = -+1/h
  const double v = 2.0 * std::pow(h, 1.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
  m(0, 0) = v;
  m(1, 1) = v;
  m(0, 1) = -v;
  m(1, 0) = -v;
  return m;
}

LocalPairMatrix shared_vertex_1d(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  auto c1 = mesh.element(t1);
  auto c2 = mesh.element(t2);
  const Index p = (c1[0] == c2[0] || c1[0] == c2[1]) ? c1[0] : c1[1];
  const Index va = (c1[0] == p) ? c1[1] : c1[0];
  const Index vb = (c2[0] == p) ? c2[1] : c2[0];
  const double h1 = std::abs(mesh.vertex(va).x - mesh.vertex(p).x);
  const double h2 = std::abs(mesh.vertex(vb).x - mesh.vertex(p).x);
  LocalPairMatrix m;
  m.size = 3;
  m.vertices = {p, va, vb, 0, 0, 0};
  const double factor = h1 * h2 / (3.0 - 2.0 * s);
  const double expo = -(1.0 + 2.0 * s);
  const GaussRule& g = gauss_rule_1d(order);
  std::array<double, 6> d{};
  auto eval = [&](double x, double y, double w) {
    // the two cells lie on opposite sides of p
    d[0] = y - x;
    d[1] = x;
    d[2] = -y;
    add_outer(m, factor * w * std::pow(x * h1 + y * h2, expo), d);
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    eval(1.0, g.points[i], g.weights[i]);
    eval(g.points[i], 1.0, g.weights[i]);
  }
  mirror_lower(m);
  return m;
}

LocalPairMatrix disjoint_1d(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  auto c1 = mesh.element(t1);
  auto c2 = mesh.element(t2);
  const double x0 = mesh.vertex(c1[0]).x, x1 = mesh.vertex(c1[1]).x;
  const double y0 = mesh.vertex(c2[0]).x, y1 = mesh.vertex(c2[1]).x;
  LocalPairMatrix m;
  m.size = 4;
  m.vertices = {c1[0], c1[1], c2[0], c2[1], 0, 0};
  const double jac = (x1 - x0) * (y1 - y0);
  const double expo = -(1.0 + 2.0 * s);
  const GaussRule& g = gauss_rule_1d(order);
  std::array<double, 6> d{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = g.points[i];
    const double x = x0 + u * (x1 - x0);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double v = g.points[j];
      const double y = y0 + v * (y1 - y0);
      d = {1.0 - u, u, -(1.0 - v), -v, 0.0, 0.0};
      add_outer(m, jac * g.weights[i] * g.weights[j] * std::pow(std::abs(x - y), expo), d);
    }
  }
  mirror_lower(m);
  return m;
}

}  // namespace

const GaussRule& gauss_rule_1d(int order) {
  require(order >= 1 && order <= max_gauss_order, ErrorCategory::invalid_argument,
          "Gauss order must lie in [1, " + std::to_string(max_gauss_order) + "]");
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t(max_gauss_order + 1);
    for (int n = 1; n <= max_gauss_order; ++n) t[static_cast<std::size_t>(n)] = make_gauss_legendre(n);
    return t;
  }();
  return table[static_cast<std::size_t>(order)];
}

const TriangleRule& triangle_rule(int order) {
  require(order >= 1 && order <= max_gauss_order, ErrorCategory::invalid_argument,
          "triangle rule order must lie in [1, " + std::to_string(max_gauss_order) + "]");
  static const std::vector<TriangleRule> table = [] {
    std::vector<TriangleRule> t(max_gauss_order + 1);
    for (int n = 1; n <= max_gauss_order; ++n) t[static_cast<std::size_t>(n)] = make_triangle_rule(n);
    return t;
  }();
  return table[static_cast<std::size_t>(order)];
}

GaussRule graded_rule_1d(int order, int levels, double ratio) {
  require(levels >= 0, ErrorCategory::invalid_argument, "graded rule needs levels >= 0");
  require(ratio > 0.0 && ratio < 1.0, ErrorCategory::invalid_argument, "grading ratio must lie in (0, 1)");
  const GaussRule& g = gauss_rule_1d(order);
  GaussRule rule;
  double hi = 1.0;
  for (int l = 0; l <= levels; ++l) {
    const double lo = (l == levels) ? 0.0 : hi * ratio;
    for (std::size_t k = 0; k < g.size(); ++k) {
      rule.points.push_back(lo + (hi - lo) * g.points[k]);
      rule.weights.push_back((hi - lo) * g.weights[k]);
    }
    hi = lo;
  }
  return rule;
}

QuadratureConfig QuadratureConfig::defaults(int dimension) {
  QuadratureConfig c;
  if (dimension == 1) {
    c.touching_order = 12;
    c.near_order = 12;
    c.far_order = 8;
    c.complement_order = 8;
    c.complement_levels = 12;
  }
  return c;
}

void validate(const QuadratureConfig& c) {
  auto in_range = [](int k) { return k >= 1 && k <= max_gauss_order; };
  require(in_range(c.touching_order) && in_range(c.near_order) && in_range(c.far_order) &&
              in_range(c.angular_order),
          ErrorCategory::invalid_argument, "quadrature orders must lie in [1, 30]");
  require(c.complement_order >= 4 && c.complement_order <= max_gauss_order,
          ErrorCategory::invalid_argument, "complement order must lie in [4, 30]");
  require(c.complement_levels >= 0 && c.complement_levels <= 40, ErrorCategory::invalid_argument,
          "complement levels must lie in [0, 40]");
  require(c.far_distance_factor > 0.0, ErrorCategory::invalid_argument,
          "far distance factor must be positive");
  require(c.cluster_separation == 0.0 || c.cluster_separation >= 2.0, ErrorCategory::invalid_argument,
          "cluster separation must be 0 or >= 2");
}

int LocalPairMatrix::find(Index vertex) const {
  for (int a = 0; a < size; ++a) {
    if (vertices[static_cast<std::size_t>(a)] == vertex) return a;
  }
  return -1;
}

LocalPairMatrix pair_kernel_entries(const Mesh& mesh, Index t1, Index t2, double s, int order) {
  return pair_kernel_entries(mesh, t1, t2, classify_pair(mesh, t1, t2), s, order);
}

LocalPairMatrix pair_kernel_entries(const Mesh& mesh, Index t1, Index t2, PairClass cls, double s,
                                    int order) {
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  require(order >= 1 && order <= max_gauss_order, ErrorCategory::invalid_argument,
          "quadrature order must lie in [1, 30]");
  if (mesh.dimension() == 1) {
    switch (cls) {
      case PairClass::identical: return identical_1d(mesh, t1, s);
      case PairClass::shared_vertex: return shared_vertex_1d(mesh, t1, t2, s, order);
      case PairClass::disjoint: return disjoint_1d(mesh, t1, t2, s, order);
      case PairClass::shared_edge: break;
    }
    fail(ErrorCategory::mismatch, "shared-edge pairs do not exist in 1D");
  }
  switch (cls) {
    case PairClass::identical: return identical_2d(mesh, t1, s, order);
    case PairClass::shared_edge: return shared_edge_2d(mesh, t1, t2, s, order);
    case PairClass::shared_vertex: return shared_vertex_2d(mesh, t1, t2, s, order);
    case PairClass::disjoint: return disjoint_2d(mesh, t1, t2, s, order);
  }
  fail(ErrorCategory::invalid_argument, "unknown pair class");
}

// --- complement ------------------------------------------------------------

ComplementEvaluator::ComplementEvaluator(const Mesh& mesh, double s, int angular_order,
                                         ComplementGeometry geometry, double cluster_separation)
    : dimension_(mesh.dimension()),
      s_(s),
      angular_order_(angular_order),
      geometry_(geometry),
      separation_(cluster_separation) {
  require(cluster_separation == 0.0 || cluster_separation >= 2.0, ErrorCategory::invalid_argument,
          "cluster separation must be 0 or >= 2");
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  require(angular_order >= 1 && angular_order <= max_gauss_order, ErrorCategory::invalid_argument,
          "angular order must lie in [1, 30]");
  if (dimension_ == 1) {
    left_ = 1e300;
    right_ = -1e300;
    for (const auto& f : mesh.boundary_facets()) {
      left_ = std::min(left_, mesh.vertex(f[0]).x);
      right_ = std::max(right_, mesh.vertex(f[0]).x);
    }
    return;
  }
  require(geometry == ComplementGeometry::polygon || geometry == ComplementGeometry::exact_circle,
          ErrorCategory::invalid_argument, "unknown complement geometry");
  // boundary edges in cyclic (counter-clockwise) order
  const auto facets = mesh.boundary_facets();
  require(!facets.empty(), ErrorCategory::invalid_argument, "mesh has no boundary");
  std::vector<std::size_t> next_facet(static_cast<std::size_t>(mesh.vertex_count()), facets.size());
  for (std::size_t i = 0; i < facets.size(); ++i) next_facet[static_cast<std::size_t>(facets[i][0])] = i;
  std::size_t current = 0;
  for (std::size_t k = 0; k < facets.size(); ++k) {
    const Vec2 p = mesh.vertex(facets[current][0]);
    const Vec2 q = mesh.vertex(facets[current][1]);
    const double len = norm(q - p);
    edges_.push_back({p, (1.0 / len) * (q - p), len});
    current = next_facet[static_cast<std::size_t>(facets[current][1])];
    require(current < facets.size(), ErrorCategory::invalid_argument, "boundary is not a single closed polygon");
  }
  require(current == 0, ErrorCategory::invalid_argument, "boundary is not a single closed polygon");
  build_clusters(0, static_cast<int>(edges_.size()));
}

int ComplementEvaluator::build_clusters(int first, int last) {
  Cluster c;
  c.first = first;
  c.last = last;
  const Vec2 a = edges_[static_cast<std::size_t>(first)].start;
  const Vec2 b = end_point(last - 1);
  c.center = 0.5 * (a + b);
  double turning = 0.0, max_turn = 0.0;
  for (int k = first; k < last; ++k) {
    const Edge& e = edges_[static_cast<std::size_t>(k)];
    c.radius = std::max({c.radius, norm(e.start - c.center), norm(end_point(k) - c.center)});
    if (k > first) {
      const Edge& prev = edges_[static_cast<std::size_t>(k - 1)];
      const double turn = std::atan2(cross(prev.tangent, e.tangent), dot(prev.tangent, e.tangent));
      turning += turn;
      max_turn = std::max(max_turn, std::abs(turn));
    }
  }
  // far-field angular rule only where the boundary is close to a smooth arc
  c.smooth = max_turn <= 0.05 && std::abs(turning) <= 0.6;
  const int index = static_cast<int>(clusters_.size());
  clusters_.push_back(c);
  if (last - first > cluster_leaf_size) {
    const int mid = first + (last - first) / 2;
    const int left = build_clusters(first, mid);
    const int right = build_clusters(mid, last);
    clusters_[static_cast<std::size_t>(index)].left = left;
    clusters_[static_cast<std::size_t>(index)].right = right;
  }
  return index;
}

Vec2 ComplementEvaluator::end_point(int k) const {
  const Edge& e = edges_[static_cast<std::size_t>(k)];
  return e.start + e.length * e.tangent;
}

double ComplementEvaluator::operator()(Vec2 x) const {
  const double two_s = 2.0 * s_;
  if (dimension_ == 1) {
    require(x.x > left_ && x.x < right_, ErrorCategory::invalid_argument,
            "complement integral needs a point strictly inside the interval");
    return (std::pow(right_ - x.x, -two_s) + std::pow(x.x - left_, -two_s)) / two_s;
  }

  if (geometry_ == ComplementGeometry::exact_circle) {
    const double r2 = norm2(x);
    require(r2 < 1.0, ErrorCategory::invalid_argument,
            "complement integral needs a point strictly inside the unit circle");
    // by the divergence theorem the ray integral equals
    // (1/2s) int_0^2pi (1 - x.y) |y - x|^(-2-2s) dphi with y on the circle;
    // symmetric about the direction of x and peaked there with width 1 - |x|
    const double rho = std::sqrt(r2);
    const double gap = (1.0 - r2) / (1.0 + rho);
    auto boundary = [&](double phi) {
      const double h = std::sin(0.5 * phi);
      const double lift = 2.0 * rho * h * h;
      return (gap + lift) * std::pow(gap * gap + 2.0 * lift, -1.0 - s_) / two_s;
    };
    const GaussRule& g = gauss_rule_1d(20);
    const double pi = std::numbers::pi;
    double acc = 0.0, lo = 0.0, hi = std::min(std::max(gap, 1e-300), pi);
    for (;;) {
      for (std::size_t k = 0; k < g.size(); ++k) acc += (hi - lo) * g.weights[k] * boundary(lo + (hi - lo) * g.points[k]);
      if (hi >= pi) break;
      lo = hi;
      hi = std::min(4.0 * hi, pi);
    }
    return 2.0 * acc;
  }

  // int_0^psi cos^2s = sign(psi) B(1/2, s + 1/2) I_{sin^2 psi}(1/2, s + 1/2) / 2
  const double half_beta = 0.5 * boost::math::beta(0.5, s_ + 0.5, double_policy());
  auto cos_power_primitive = [&](double psi) {
    const double sn = std::sin(psi);
    const double v = half_beta * boost::math::ibeta(0.5, s_ + 0.5, sn * sn, double_policy());
    return psi < 0.0 ? -v : v;
  };
  // exact contribution of one edge: d^-2s times the integral of cos^2s over the subtended angle
  auto edge_term = [&](const Edge& e) {
    const Vec2 rel = x - e.start;
    const double dist = cross(e.tangent, rel);  // positive: interior lies to the left
    require(dist > 0.0, ErrorCategory::invalid_argument,
            "complement integral needs a point strictly inside the polygon");
    const double foot = dot(rel, e.tangent);
    const double psi0 = std::atan(-foot / dist);
    const double psi1 = std::atan((e.length - foot) / dist);
    const double width = psi1 - psi0;
    // Narrow panels: low-order Gauss reaches ~1e-9. Wider panels, and panels
    // approaching psi = +-pi/2 where cos^2s is not smooth, use the closed form.
    const bool steep = std::max(-psi0, psi1) > 1.3;
    if (width >= 6e-2 || steep) {
      return std::pow(dist, -two_s) * (cos_power_primitive(psi1) - cos_power_primitive(psi0));
    }
    const GaussRule& g = gauss_rule_1d(2);
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      acc += g.weights[k] * std::pow(std::cos(psi0 + width * g.points[k]), two_s);
    }
    return std::pow(dist, -two_s) * width * acc;
  };
  // Far, nearly smooth cluster: Gauss rule in the polar angle about x over the
  // cluster's angular range, with the ray distance R(theta) to the hit edge.
  const GaussRule& far_rule = gauss_rule_1d(angular_order_);
  auto cluster_term = [&](const Cluster& c) {
    const Vec2 a = edges_[static_cast<std::size_t>(c.first)].start - x;
    const Vec2 b = end_point(c.last - 1) - x;
    const double theta0 = std::atan2(a.y, a.x);
    const double span = std::atan2(cross(a, b), dot(a, b));
    require(span > 0.0, ErrorCategory::invalid_argument,
            "complement integral needs a point strictly inside the polygon");
    double acc = 0.0;
    for (std::size_t q = 0; q < far_rule.size(); ++q) {
      const double theta = theta0 + span * far_rule.points[q];
      const Vec2 w{std::cos(theta), std::sin(theta)};
      // last edge whose start lies clockwise of w
      int lo = c.first, hi = c.last - 1;
      while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (cross(edges_[static_cast<std::size_t>(mid)].start - x, w) >= 0.0) lo = mid;
        else hi = mid - 1;
      }
      const Edge& e = edges_[static_cast<std::size_t>(lo)];
      const double dist = cross(e.tangent, x - e.start);
      const double cosine = w.x * e.tangent.y - w.y * e.tangent.x;  // w . outward normal
      acc += far_rule.weights[q] * std::pow(dist / cosine, -two_s);
    }
    return span * acc;
  };

  double total = 0.0;
  std::array<int, 128> stack{};
  int top = 0;
  stack[static_cast<std::size_t>(top++)] = 0;
  while (top > 0) {
    const Cluster& c = clusters_[static_cast<std::size_t>(stack[static_cast<std::size_t>(--top)])];
    if (c.smooth && separation_ > 0.0 && norm(x - c.center) > separation_ * c.radius) {
      total += cluster_term(c);
    } else if (c.left >= 0 && top + 2 <= static_cast<int>(stack.size())) {
      stack[static_cast<std::size_t>(top++)] = c.right;
      stack[static_cast<std::size_t>(top++)] = c.left;
    } else {
      for (int k = c.first; k < c.last; ++k) total += edge_term(edges_[static_cast<std::size_t>(k)]);
    }
  }
  return total / two_s;
}

double complement_integral(Vec2 x, const Mesh& mesh, double s, int angular_order,
                           ComplementGeometry geometry) {
  return ComplementEvaluator(mesh, s, angular_order, geometry)(x);
}

}  // namespace fraclap
