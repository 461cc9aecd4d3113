#pragma once

#include "fraclap/assembly.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// kappa(n, s) = 2^(-2s) Gamma(n/2) / (Gamma((n + 2s)/2) Gamma(1 + s)).
double ball_coefficient(int n, double s);

/// u(x) = kappa (r^2 - |x - x0|^2)^s on the ball, 0 outside; solves (-Delta)^s u = 1 in B.
struct BallSolution {
  int n = 2;
  double s = 0.5;
  Vec2 center;
  double radius = 1.0;

  double coefficient() const { return ball_coefficient(n, s); }
};

double ball_eval(const BallSolution& sol, Vec2 x);

/// Integral of u over the ball: kappa pi^(n/2) Gamma(s+1) / Gamma(s+n/2+1) r^(n+2s).
/// With f = 1 this is the squared energy norm of the exact solution.
double exact_energy_squared(const BallSolution& sol);

/// Squared energy norm of sin(pi x) 1_{(-1,1)}: 2 int_0^1 f(x) sin(pi x) dx with
/// f = eval_flap_sine, computed by double-exponential quadrature.
double interval_sine_energy_squared(double s, double tol = 1e-10);

/// L2 norm of u - u_h, Gauss order 6 per element; U holds the interior dof values.
double nodal_interpolant_error_l2(const Mesh& mesh, const BallSolution& sol, const Vector& u);

/// Nodal values of the ball solution at the interior dofs of `mesh`.
Vector interpolate(const Mesh& mesh, const BallSolution& sol);

}  // namespace fraclap
