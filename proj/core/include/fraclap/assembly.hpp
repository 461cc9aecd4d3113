#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// C(n, s) = 2^(2s) s Gamma(s + n/2) / (pi^(n/2) Gamma(1 - s)).
double normalization_constant(int n, double s);

struct AssemblyStats {
  std::size_t identical_pairs = 0;
  std::size_t shared_edge_pairs = 0;
  std::size_t shared_vertex_pairs = 0;
  std::size_t near_pairs = 0;
  std::size_t far_pairs = 0;
  std::size_t complement_points = 0;
  double seconds = 0.0;
};

/// Dense matrix of the bilinear form a(phi_i, phi_j), normalization included.
struct StiffnessMatrix {
  Matrix values;
  double s = 0.0;
  AssemblyStats stats;

  Index size() const noexcept { return static_cast<Index>(values.rows()); }
};

/// Entry i is the integral of phi_i f over the domain.
struct LoadVector {
  Vector values;

  Index size() const noexcept { return static_cast<Index>(values.size()); }
};

struct ConstantOne {};

/// f = (-Delta)^s of sin(pi x) restricted to (-1, 1); 1D only.
struct TruncatedSineFlap {
  double s = 0.5;
  double tolerance = 1e-11;
};

struct Callable {
  std::function<double(Vec2)> f;
};

using RightHandSide = std::variant<ConstantOne, TruncatedSineFlap, Callable>;

struct AssemblyOptions {
  QuadratureConfig quadrature = QuadratureConfig::defaults(2);
  int threads = 1;
  /// Per-worker partial matrices merged in worker order; bitwise reproducible.
  /// Otherwise workers scatter into the shared matrix under a lock.
  bool deterministic = true;
  /// Lift the N_dof <= max_dense_dofs guard.
  bool allow_large = false;

  static AssemblyOptions defaults(int dimension) {
    AssemblyOptions o;
    o.quadrature = QuadratureConfig::defaults(dimension);
    return o;
  }
};

inline constexpr Index max_dense_dofs = 20000;

/// K_ij = C/2 * sum over element pairs of the Omega x Omega interaction
///      + C * sum_T int_T phi_i phi_j kappa(x) dx,  kappa = complement integral.
StiffnessMatrix assemble_stiffness(const Mesh& mesh, double s, const AssemblyOptions& options);

/// Load vector with Gauss order `quad_order` per element (0 selects the
/// default: 4, or 8 for the truncated sine). Elements touching the boundary
/// use a geometrically graded rule toward the boundary.
LoadVector assemble_load(const Mesh& mesh, const RightHandSide& rhs, int quad_order = 0);

/// P1 mass matrix on the interior dofs (exact elementwise integration).
Matrix assemble_mass(const Mesh& mesh);

/// (-Delta)^s applied to the truncated sine u0 = sin(pi y) 1_{|y|<1}, at |x| < 1.
/// Near field folds y = x +- t so the linear Taylor term cancels; the far field
/// uses adaptive Gauss-Kronrod; exterior tails are closed form.
double eval_flap_sine(double x, double s, double tol);

/// `fracmat 1 <N>` followed by the row-major lower triangle, 17 significant digits.
void write_matrix(std::ostream& os, const Matrix& k);
Matrix read_matrix(std::istream& is);

/// `fracvec 1 <N>` followed by one value per line.
void write_vector(std::ostream& os, const Vector& v);
Vector read_vector(std::istream& is);

}  // namespace fraclap
