#include "fraclap/analytic.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fraclap/error.hpp"

namespace fraclap {

double ball_coefficient(int n, double s) {
  require(n == 1 || n == 2, ErrorCategory::invalid_argument, "dimension must be 1 or 2");
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  return std::pow(2.0, -2.0 * s) * std::tgamma(0.5 * n) / (std::tgamma(0.5 * n + s) * std::tgamma(1.0 + s));
}

double ball_eval(const BallSolution& sol, Vec2 x) {
  const double d2 = sol.radius * sol.radius - norm2(x - sol.center);
  if (d2 <= 0.0) return 0.0;
  return sol.coefficient() * std::pow(d2, sol.s);
}

double exact_energy_squared(const BallSolution& sol) {
  require(sol.radius > 0.0, ErrorCategory::invalid_argument, "radius must be positive");
  const double n = sol.n;
  return sol.coefficient() * std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(sol.s + 1.0) /
         std::tgamma(sol.s + 0.5 * n + 1.0) * std::pow(sol.radius, n + 2.0 * sol.s);
}

double interval_sine_energy_squared(double s, double tol) {
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  boost::math::quadrature::tanh_sinh<double> rule;
  auto integrand = [&](double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return eval_flap_sine(x, s, 0.01 * tol) * std::sin(std::numbers::pi * x);
  };
  double err = 0.0;
  const double value = rule.integrate(integrand, 0.0, 1.0, tol, &err);
  require(std::isfinite(value) && err <= 100.0 * tol * std::abs(value), ErrorCategory::numerical,
          "sine energy integral did not converge");
  return 2.0 * value;
}

double nodal_interpolant_error_l2(const Mesh& mesh, const BallSolution& sol, const Vector& u) {
  const DofMap dofs = interior_dof_map(mesh);
  require(u.size() == dofs.size(), ErrorCategory::mismatch, "vector size does not match the dof count");
  const int nv = mesh.vertices_per_element();
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    auto c = mesh.element(e);
    std::array<double, 3> values{};
    for (int k = 0; k < nv; ++k) {
      const Index d = dofs.dof(c[static_cast<std::size_t>(k)]);
      values[static_cast<std::size_t>(k)] = d >= 0 ? u(d) : 0.0;
    }
    if (mesh.dimension() == 1) {
      const GaussRule& g = gauss_rule_1d(6);
      const double x0 = mesh.vertex(c[0]).x, x1 = mesh.vertex(c[1]).x;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double t = g.points[q];
        const double uh = (1.0 - t) * values[0] + t * values[1];
        const double diff = ball_eval(sol, {x0 + t * (x1 - x0), 0.0}) - uh;
        total += g.weights[q] * (x1 - x0) * diff * diff;
      }
    } else {
      const TriangleRule& r = triangle_rule(6);
      const Vec2 a = mesh.vertex(c[0]), b = mesh.vertex(c[1]), d = mesh.vertex(c[2]);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Vec2 p = r.points[q];
        const double uh = (1.0 - p.x - p.y) * values[0] + p.x * values[1] + p.y * values[2];
        const double diff = ball_eval(sol, a + p.x * (b - a) + p.y * (d - a)) - uh;
        total += r.weights[q] * 2.0 * mesh.measure(e) * diff * diff;
      }
    }
  }
  return std::sqrt(total);
}

Vector interpolate(const Mesh& mesh, const BallSolution& sol) {
  const DofMap dofs = interior_dof_map(mesh);
  Vector u(dofs.size());
  for (Index d = 0; d < dofs.size(); ++d) u(d) = ball_eval(sol, mesh.vertex(dofs.dof_to_vertex[static_cast<std::size_t>(d)]));
  return u;
}

}  // namespace fraclap
