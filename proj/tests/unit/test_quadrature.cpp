#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "fraclap/error.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"
#include "oracles.hpp"

using namespace fraclap;

namespace {

constexpr double pi = std::numbers::pi;

oracle::Tri to_tri(const Mesh& m, Index e) {
  oracle::Tri t;
  for (int k = 0; k < 3; ++k) {
    const Index v = m.element(e)[static_cast<std::size_t>(k)];
    t.v[static_cast<std::size_t>(k)] = {m.vertex(v).x, m.vertex(v).y};
    t.id[static_cast<std::size_t>(k)] = v;
  }
  return t;
}

std::vector<oracle::P> boundary_polygon(const Mesh& m) {
  std::vector<std::pair<double, Vec2>> bv;
  for (Index v = 0; v < m.vertex_count(); ++v) {
    if (m.is_boundary(v)) bv.push_back({std::atan2(m.vertex(v).y, m.vertex(v).x), m.vertex(v)});
  }
  std::sort(bv.begin(), bv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<oracle::P> poly;
  for (const auto& [angle, v] : bv) poly.push_back({v.x, v.y});
  return poly;
}

double max_abs(const LocalPairMatrix& m) {
  double v = 0.0;
  for (int a = 0; a < m.size; ++a) {
    for (int b = 0; b < m.size; ++b) v = std::max(v, std::abs(m(a, b)));
  }
  return v;
}

// First pair of the requested class in the mesh, starting from element `from`.
std::pair<Index, Index> find_pair(const Mesh& m, PairClass cls, Index from) {
  for (Index e = from; e < m.element_count(); ++e) {
    for (Index f = e; f < m.element_count(); ++f) {
      if (classify_pair(m, e, f) == cls) return {e, f};
    }
  }
  return {-1, -1};
}

}  // namespace

TEST(Quadrature, GaussRuleExactness) {
  for (int n : {1, 2, 5, 12, 30}) {
    const GaussRule& g = gauss_rule_1d(n);
    ASSERT_EQ(g.size(), static_cast<std::size_t>(n));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double sum = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) sum += g.weights[i] * std::pow(g.points[i], d);
      EXPECT_NEAR(sum, 1.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
    }
  }
  EXPECT_THROW(gauss_rule_1d(0), Error);
  EXPECT_THROW(gauss_rule_1d(31), Error);
}

TEST(Quadrature, TriangleRuleIntegratesMonomials) {
  // int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
  const TriangleRule& t = triangle_rule(6);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 10; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) sum += t.weights[i] * std::pow(t.points[i].x, a) * std::pow(t.points[i].y, b);
      const double exact = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
      EXPECT_NEAR(sum, exact, 1e-15) << a << " " << b;
    }
  }
}

TEST(Quadrature, GradedRuleHandlesEndpointSingularity) {
  const GaussRule g = graded_rule_1d(16, 40, 0.15);
  double sum = 0.0, weights = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    sum += g.weights[i] * std::pow(g.points[i], -0.6);
    weights += g.weights[i];
  }
  EXPECT_NEAR(weights, 1.0, 1e-14);
  EXPECT_NEAR(sum, 2.5, 1e-10);
}

TEST(PairKernel, OneDimensionalIdenticalHalfIsExact) {
  // s = 1/2 on [0, 1]: (phi_a(x) - phi_a(y))^2 |x - y|^-2 = 1, so the entries are +-1
  const Mesh m(1, {{0, 0}, {1, 0}}, {{0, 1, -1}}, {false, false}, 1.0);
  const LocalPairMatrix k = pair_kernel_entries(m, 0, 0, 0.5, 8);
  ASSERT_EQ(k.size, 2);
  EXPECT_NEAR(k(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(k(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(k(0, 1), -1.0, 1e-14);
}

TEST(PairKernel, TouchingPairsMatchOracle) {
  const Mesh mesh = build_graded_disk_mesh({4, 1.95});
  for (PairClass cls : {PairClass::identical, PairClass::shared_edge, PairClass::shared_vertex}) {
    for (double s : {0.25, 0.75}) {
      const auto [e, f] = find_pair(mesh, cls, 17);
      ASSERT_GE(e, 0);
      const LocalPairMatrix k = pair_kernel_entries(mesh, e, f, s, 12);
      const double scale = max_abs(k);
      const oracle::Tri t = to_tri(mesh, e), tp = to_tri(mesh, f);
      // diagonal entries and one off-diagonal entry
      for (auto [a, b] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{0, 1}}) {
        const int ga = k.vertices[static_cast<std::size_t>(a)], gb = k.vertices[static_cast<std::size_t>(b)];
        const double ref = oracle::pair_entry(t, tp, ga, gb, s);
        EXPECT_NEAR(k(a, b), ref, 1e-8 * scale) << to_string(cls) << " s=" << s << " entry " << a << b;
      }
    }
  }
}

TEST(PairKernel, DisjointPairsMatchOracle) {
  const Mesh mesh = build_graded_disk_mesh({5, 1.0});
  std::mt19937 rng(7);
  std::uniform_int_distribution<Index> pick(0, mesh.element_count() - 1);
  int checked = 0;
  while (checked < 10) {
    const Index e = pick(rng), f = pick(rng);
    if (classify_pair(mesh, e, f) != PairClass::disjoint) continue;
    const LocalPairMatrix k = pair_kernel_entries(mesh, e, f, 0.4, 14);
    const double scale = max_abs(k);
    for (int a = 0; a < k.size; ++a) {
      const int ga = k.vertices[static_cast<std::size_t>(a)];
      const double ref = oracle::disjoint_entry(to_tri(mesh, e), to_tri(mesh, f), ga, ga, 0.4);
      EXPECT_NEAR(k(a, a), ref, 1e-7 * scale) << "pair " << e << "," << f;
    }
    ++checked;
  }
}

TEST(PairKernel, RowsSumToZeroAndMatrixIsSymmetric) {
  // constants lie in the kernel: sum_b (phi_b(x) - phi_b(y)) = 0 on the vertex union
  for (const Mesh& mesh : {build_graded_disk_mesh({3, 1.95}), build_interval_mesh(-1.0, 1.0, {4, 1.5})}) {
    for (Index e = 0; e < mesh.element_count(); e += 3) {
      for (Index f = e; f < mesh.element_count(); f += 2) {
        const LocalPairMatrix k = pair_kernel_entries(mesh, e, f, 0.6, 8);
        const double scale = max_abs(k);
        for (int a = 0; a < k.size; ++a) {
          double row = 0.0;
          for (int b = 0; b < k.size; ++b) {
            row += k(a, b);
            EXPECT_EQ(k(a, b), k(b, a));
          }
          EXPECT_NEAR(row, 0.0, 1e-12 * scale);
        }
      }
    }
  }
}

TEST(PairKernel, TouchingOrderSelfConsistency) {
  // every touching pair of a strongly graded mesh, thin elements included
  const Mesh mesh = build_graded_disk_mesh({4, 1.95});
  for (double s : {0.25, 0.75}) {
    double worst = 0.0;
    for (Index e = 0; e < mesh.element_count(); ++e) {
      for (Index f = e; f < mesh.element_count(); ++f) {
        if (classify_pair(mesh, e, f) == PairClass::disjoint) continue;
        const LocalPairMatrix lo = pair_kernel_entries(mesh, e, f, s, 7);
        const LocalPairMatrix hi = pair_kernel_entries(mesh, e, f, s, 12);
        const double scale = max_abs(hi);
        for (int a = 0; a < hi.size; ++a) {
          for (int b = 0; b < hi.size; ++b) worst = std::max(worst, std::abs(lo(a, b) - hi(a, b)) / scale);
        }
      }
    }
    EXPECT_LT(worst, 2e-7) << "s=" << s;
  }
}

TEST(PairKernel, Homogeneity) {
  // entries scale like c^(2n) c^-(n + 2s) = c^(n - 2s)
  const Mesh mesh = build_graded_disk_mesh({3, 1.0});
  const double s = 0.3;
  for (double c : {0.5, 2.0, 10.0}) {
    const Mesh scaled = map_vertices(mesh, [c](Vec2 p) { return c * p; }, c);
    for (Index f : {0, 1, 5, 20}) {
      const LocalPairMatrix a = pair_kernel_entries(mesh, 0, f, s, 7);
      const LocalPairMatrix b = pair_kernel_entries(scaled, 0, f, s, 7);
      const double factor = std::pow(c, 2.0 - 2.0 * s);
      for (int i = 0; i < a.size; ++i) {
        for (int j = 0; j < a.size; ++j) EXPECT_NEAR(b(i, j), factor * a(i, j), 1e-12 * factor * max_abs(a));
      }
    }
  }
}

TEST(Complement, OneDimensionalClosedForm) {
  const Mesh m = build_interval_mesh(-1.0, 1.0, {4, 1.0});
  for (double s : {0.2, 0.7}) {
    for (double x : {0.0, 0.3, -0.9}) {
      const double exact = (std::pow(1.0 - x, -2.0 * s) + std::pow(1.0 + x, -2.0 * s)) / (2.0 * s);
      EXPECT_NEAR(complement_integral({x, 0.0}, m, s, 8), exact, 1e-13 * exact);
    }
  }
}

TEST(Complement, ExactCircleAtCentre) {
  // R = 1 in every direction: 2 pi / 2s
  const Mesh m = build_graded_disk_mesh({4, 1.0});
  for (double s : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(complement_integral({0.0, 0.0}, m, s, 12, ComplementGeometry::exact_circle), pi / s, 1e-12);
  }
}

TEST(Complement, ExactCircleOffCentreMatchesAreaIntegral) {
  // independent form: integrate |x - y|^(-2-2s) over |y| > 1 in polar coordinates about the origin
  const Mesh m = build_graded_disk_mesh({4, 1.0});
  for (double s : {0.2, 0.5, 0.9}) {
    for (double rho : {0.5, 0.9, 0.99}) {
      auto ring = [&](double r) {
        auto f = [&](double phi) { return r * std::pow(r * r + rho * rho - 2.0 * r * rho * std::cos(phi), -1.0 - s); };
        return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 15, 1e-13);
      };
      const double want = boost::math::quadrature::exp_sinh<double>().integrate(
          [&](double t) { return ring(1.0 + t); }, 1e-12);
      const double got = complement_integral({rho * 0.6, rho * 0.8}, m, s, 12, ComplementGeometry::exact_circle);
      EXPECT_NEAR(got, want, 1e-9 * want) << "s=" << s << " rho=" << rho;
    }
  }
}

TEST(Complement, PolygonMatchesOracle) {
  const Mesh m = build_graded_disk_mesh({8, 1.95});
  const std::vector<oracle::P> poly = boundary_polygon(m);
  for (double s : {0.1, 0.5, 0.9}) {
    const ComplementEvaluator exact(m, s, 12, ComplementGeometry::polygon, 0.0);
    const ComplementEvaluator clustered(m, s, 12, ComplementGeometry::polygon, 4.0);
    for (int i = 0; i < 12; ++i) {
      const double r = 0.97 * (1.0 - std::pow(0.5, i)), th = 0.61 * i;
      const Vec2 x{r * std::cos(th), r * std::sin(th)};
      const double ref = oracle::complement_polygon(poly, {x.x, x.y}, s);
      EXPECT_NEAR(exact(x), ref, 1e-8 * ref) << "s=" << s << " r=" << r;
      EXPECT_NEAR(clustered(x), ref, 2e-5 * ref) << "s=" << s << " r=" << r;
    }
  }
}

TEST(Complement, LowerBoundFromDiameter) {
  // the complement contains everything beyond diam(Omega) from x
  const Mesh m = build_graded_disk_mesh({6, 1.0});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (double s : {0.2, 0.8}) {
    const ComplementEvaluator kappa(m, s, 12, ComplementGeometry::polygon, 4.0);
    const double bound = 2.0 * pi * std::pow(2.0, -2.0 * s) / (2.0 * s);
    for (int i = 0; i < 50; ++i) EXPECT_GE(kappa({u(rng), u(rng)}), bound);
  }
}

TEST(Complement, RejectsPointsOutside) {
  const Mesh m = build_graded_disk_mesh({4, 1.0});
  EXPECT_THROW(complement_integral({1.5, 0.0}, m, 0.5, 8), Error);
}

TEST(Quadrature, ConfigValidation) {
  QuadratureConfig c = QuadratureConfig::defaults(2);
  EXPECT_NO_THROW(validate(c));
  c.complement_order = 3;
  EXPECT_THROW(validate(c), Error);
  c = QuadratureConfig::defaults(2);
  c.cluster_separation = 1.0;
  EXPECT_THROW(validate(c), Error);
}
