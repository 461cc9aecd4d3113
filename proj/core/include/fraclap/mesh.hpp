#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fraclap/geometry.hpp"

namespace fraclap {

using Index = std::int32_t;

/// Vertex indices of a simplex; 1D elements leave the last slot at -1.
using Cell = std::array<Index, 3>;

/// Adjacency relation of two elements; selects the pair quadrature.
enum class PairClass { identical, shared_edge, shared_vertex, disjoint };

std::string to_string(PairClass c);

/// Radial grading r_i = 1 - (1 - i/M)^mu. mu == 1 gives the uniform construction.
struct GradingSpec {
  int rings = 1;
  double mu = 1.0;
};

/// Immutable simplicial mesh of an interval (n = 1) or a polygonal disk (n = 2).
///
/// Geometric data (measures, diameters, vertex stars, boundary facets) is
/// computed once in the constructor. Every element must have positive measure
/// and positive orientation (counter-clockwise in 2D, left-to-right in 1D).
class Mesh {
 public:
  Mesh(int dimension, std::vector<Vec2> vertices, std::vector<Cell> elements,
       std::vector<bool> boundary_flags, double mesh_parameter);

  int dimension() const noexcept { return dimension_; }
  int vertices_per_element() const noexcept { return dimension_ + 1; }

  Index vertex_count() const noexcept { return static_cast<Index>(vertices_.size()); }
  Index element_count() const noexcept { return static_cast<Index>(elements_.size()); }

  std::span<const Vec2> vertices() const noexcept { return vertices_; }
  const Vec2& vertex(Index v) const { return vertices_[static_cast<std::size_t>(v)]; }

  std::span<const Cell> elements() const noexcept { return elements_; }
  std::span<const Index> element(Index e) const {
    return {elements_[static_cast<std::size_t>(e)].data(),
            static_cast<std::size_t>(vertices_per_element())};
  }

  const std::vector<bool>& boundary_flags() const noexcept { return boundary_; }
  bool is_boundary(Index v) const { return boundary_[static_cast<std::size_t>(v)]; }

  /// Length (1D) or area (2D) of an element.
  double measure(Index e) const { return measures_[static_cast<std::size_t>(e)]; }
  double diameter(Index e) const { return diameters_[static_cast<std::size_t>(e)]; }
  double max_diameter() const noexcept { return max_diameter_; }
  double total_measure() const noexcept { return total_measure_; }

  /// h used for rate fits: 1/M for graded families, max h_T for uniform ones.
  double mesh_parameter() const noexcept { return mesh_parameter_; }

  /// Elements containing vertex v, ascending.
  std::span<const Index> star(Index v) const;

  /// Boundary facets: vertex pairs of boundary edges in 2D, single points in 1D
  /// (stored as {v, v}).
  std::span<const std::array<Index, 2>> boundary_facets() const noexcept {
    return boundary_facets_;
  }

 private:
  int dimension_;
  std::vector<Vec2> vertices_;
  std::vector<Cell> elements_;
  std::vector<bool> boundary_;
  double mesh_parameter_;

  std::vector<double> measures_;
  std::vector<double> diameters_;
  double max_diameter_ = 0.0;
  double total_measure_ = 0.0;
  std::vector<Index> star_offsets_;
  std::vector<Index> star_elements_;
  std::vector<std::array<Index, 2>> boundary_facets_;
};

/// Partition of [a, b] into 2M cells graded symmetrically toward both ends:
/// breakpoints at distance ((b - a)/2)(1 - (1 - i/M)^mu) from each endpoint.
Mesh build_interval_mesh(double a, double b, GradingSpec spec);

/// Triangulation of the polygon inscribed in the unit disk with vertex rings at
/// r_i = 1 - (1 - i/M)^mu. Ring i carries ceil(2 pi r_i / h_i) equally spaced
/// vertices; the innermost disk is fanned from the center and each annulus is
/// closed by a marching strip that picks the diagonal with the larger minimum angle.
Mesh build_graded_disk_mesh(GradingSpec spec);

/// Ring radii r_0 = 0 < r_1 < ... < r_M = 1 used by the disk construction.
std::vector<double> graded_radii(GradingSpec spec);

PairClass classify_pair(const Mesh& mesh, Index t1, Index t2);

/// Number of vertices two elements have in common.
int shared_vertex_count(const Mesh& mesh, Index t1, Index t2);

std::vector<Index> star(const Mesh& mesh, Index vertex);

/// Degrees of freedom live on non-boundary vertices only (zero exterior trace).
struct DofMap {
  std::vector<Index> vertex_to_dof;  // -1 on boundary vertices
  std::vector<Index> dof_to_vertex;

  Index size() const noexcept { return static_cast<Index>(dof_to_vertex.size()); }
  Index dof(Index vertex) const { return vertex_to_dof[static_cast<std::size_t>(vertex)]; }
};

DofMap interior_dof_map(const Mesh& mesh);

struct ConformityReport {
  bool ok = true;
  std::string message;
  std::size_t pairs_checked = 0;
};

/// Exhaustive pairwise check that any two elements meet in a full shared face,
/// a single shared vertex, or not at all. Candidate pairs are pruned with a
/// bucket grid over element bounding boxes.
ConformityReport check_conformity(const Mesh& mesh);

struct MeshQuality {
  double shape_regularity = 0.0;  // max h_T / rho_T
  double quasi_uniformity = 0.0;  // max h_T / h_T' over vertex-neighbours
  double min_measure = 0.0;
};

MeshQuality measure_quality(const Mesh& mesh);

/// Inscribed-ball diameter of an element.
double inscribed_diameter(const Mesh& mesh, Index e);

/// Distance from a point to the boundary of the meshed domain (interval or polygon).
double distance_to_boundary(const Mesh& mesh, Vec2 p);

/// Copy of the mesh with every vertex mapped through f. The map must preserve
/// orientation; the mesh parameter is multiplied by `length_scale`.
Mesh map_vertices(const Mesh& mesh, const std::function<Vec2(Vec2)>& f,
                  double length_scale = 1.0);

}  // namespace fraclap
