#pragma once

#include <array>
#include <vector>

#include "fraclap/geometry.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
};

inline constexpr int max_gauss_order = 30;

/// Cached Gauss-Legendre rule with `order` points mapped to [0, 1]; exact for
/// polynomials of degree <= 2 order - 1. Valid orders are 1..30.
const GaussRule& gauss_rule_1d(int order);

/// Rule on the reference triangle {a1, a2 >= 0, a1 + a2 <= 1} (weights sum to 1/2).
struct TriangleRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
};

/// Collapsed (Duffy) tensor Gauss rule with order^2 points.
const TriangleRule& triangle_rule(int order);

/// Composite Gauss rule on [0, 1] with geometric panels clustered toward 0:
/// [0, q^L], [q^L, q^(L-1)], ..., [q, 1]. Integrates x^alpha-type endpoint
/// behaviour accurately.
GaussRule graded_rule_1d(int order, int levels, double ratio = 0.15);

/// Geometry used for the Omega x Omega^c interaction.
enum class ComplementGeometry {
  polygon,       // the meshed interval / polygon (consistent with the FE space)
  exact_circle,  // unit circle; diagnostic option for the disk benchmark
};

/// Quadrature orders for the pair loop and the complement term.
struct QuadratureConfig {
  int touching_order = 7;            // angular Gauss order for touching pairs
  int near_order = 5;                // tensor Gauss order for close disjoint pairs
  int far_order = 3;                 // tensor Gauss order for well separated pairs
  double far_distance_factor = 2.0;  // "far" means gap > factor * max(h_T, h_T')
  int complement_order = 5;          // per-element Gauss order for the complement term (>= 4)
  int complement_levels = 8;         // geometric levels on elements touching the boundary
  int angular_order = 12;            // angular Gauss order on far boundary clusters
  double cluster_separation = 4.0;   // far cluster: distance > factor * radius; 0 sums every edge exactly
  ComplementGeometry geometry = ComplementGeometry::polygon;

  /// Defaults per dimension. 1D uses higher orders: smooth-solution rates there
  /// need the energy to ~1e-9 relative accuracy, and 1D pairs are cheap.
  static QuadratureConfig defaults(int dimension);
};

void validate(const QuadratureConfig& config);

/// Local interaction matrix of an element pair over the union of their vertices.
///
/// Entry (a, b) is the integral over T x T' of
/// (phi_a(x) - phi_a(y)) (phi_b(x) - phi_b(y)) |x - y|^-(n + 2s),
/// where phi_v are the global hat functions of the listed vertices.
struct LocalPairMatrix {
  static constexpr int capacity = 6;

  int size = 0;
  std::array<Index, capacity> vertices{};
  std::array<double, capacity * capacity> values{};

  double operator()(int a, int b) const { return values[static_cast<std::size_t>(a * capacity + b)]; }
  double& operator()(int a, int b) { return values[static_cast<std::size_t>(a * capacity + b)]; }

  /// Position of a global vertex in `vertices`, or -1.
  int find(Index vertex) const;
};

/// Reference entry point: classifies the pair and evaluates the local matrix.
/// Touching pairs use a relative-coordinate (gauge polar) decomposition whose
/// radial integral is exact; `order` is then the Gauss order on the angular
/// faces. Disjoint pairs use tensor Gauss rules of the given order.
LocalPairMatrix pair_kernel_entries(const Mesh& mesh, Index t1, Index t2, double s, int order);

/// Same as above with the class already known (skips classification).
LocalPairMatrix pair_kernel_entries(const Mesh& mesh, Index t1, Index t2, PairClass cls, double s,
                                    int order);

/// Integral of |x - y|^-(n + 2s) over y in the complement of the meshed domain.
/// 1D is closed form. In 2D each boundary edge at distance d contributes
/// d^-2s / 2s times the integral of cos^2s over the angle it subtends; wide or
/// steep panels use the incomplete-beta closed form, narrow ones 1-2 Gauss
/// points. The domain must be convex. Every edge is summed (no clustering).
double complement_integral(Vec2 x, const Mesh& mesh, double s, int angular_order,
                           ComplementGeometry geometry = ComplementGeometry::polygon);

/// Precomputed boundary data for repeated complement evaluations on one mesh.
class ComplementEvaluator {
 public:
  /// cluster_separation > 0 integrates far runs of nearly collinear edges with
  /// one angular Gauss rule (relative error ~1e-6); 0 sums every edge exactly.
  ComplementEvaluator(const Mesh& mesh, double s, int angular_order,
                      ComplementGeometry geometry = ComplementGeometry::polygon,
                      double cluster_separation = 0.0);

  double operator()(Vec2 x) const;

 private:
  struct Edge {
    Vec2 start;
    Vec2 tangent;  // unit
    double length;
  };

  // Binary tree over runs of consecutive boundary edges.
  struct Cluster {
    int first = 0, last = 0;  // edge range [first, last)
    Vec2 center;
    double radius = 0.0;
    bool smooth = false;  // small turning angles: far-field angular rule allowed
    int left = -1, right = -1;
  };

  static constexpr int cluster_leaf_size = 8;

  int build_clusters(int first, int last);
  Vec2 end_point(int k) const;

  int dimension_;
  double s_;
  int angular_order_;
  ComplementGeometry geometry_;
  double separation_ = 0.0;
  double left_ = 0.0, right_ = 0.0;  // 1D endpoints
  std::vector<Edge> edges_;  // counter-clockwise cycle
  std::vector<Cluster> clusters_;
};

}  // namespace fraclap
