#include "fraclap/mesh_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "fraclap/error.hpp"

namespace fraclap {

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const int n = mesh.dimension();
  os << "fracmesh 1 " << n << '\n' << std::setprecision(17);
  os << "parameter " << mesh.mesh_parameter() << '\n';
  os << "vertices " << mesh.vertex_count() << '\n';
  for (const Vec2& v : mesh.vertices()) {
    if (n == 1) os << v.x << '\n';
    else os << v.x << ' ' << v.y << '\n';
  }
  os << "elements " << mesh.element_count() << '\n';
  for (Index e = 0; e < mesh.element_count(); ++e) {
    auto c = mesh.element(e);
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
    os << '\n';
  }
  Index count = 0;
  for (Index v = 0; v < mesh.vertex_count(); ++v) count += mesh.is_boundary(v);
  os << "boundary " << count << '\n';
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary(v)) os << v << '\n';
  }
}

namespace {

long long read_count(std::istream& is, const std::string& keyword) {
  std::string word;
  long long count = -1;
  is >> word >> count;
  require(!is.fail() && word == keyword && count >= 0, ErrorCategory::io,
          "malformed mesh file: expected '" + keyword + " <count>'");
  return count;
}

}  // namespace

Mesh read_mesh(std::istream& is) {
  std::string tag;
  int version = 0, n = 0;
  is >> tag >> version >> n;
  require(!is.fail() && tag == "fracmesh", ErrorCategory::io, "not a fracmesh file");
  require(version == 1, ErrorCategory::io, "unsupported fracmesh version " + std::to_string(version));
  require(n == 1 || n == 2, ErrorCategory::io, "mesh dimension must be 1 or 2");

  double parameter = -1.0;
  is >> std::ws;
  if (is.peek() == 'p') {
    std::string word;
    is >> word >> parameter;
    require(!is.fail() && word == "parameter" && parameter > 0.0, ErrorCategory::io,
            "malformed mesh file: bad parameter line");
  }

  const long long nv = read_count(is, "vertices");
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    is >> v.x;
    if (n == 2) is >> v.y;
    require(!is.fail(), ErrorCategory::io, "malformed mesh file: truncated vertex data");
  }
  const long long ne = read_count(is, "elements");
  std::vector<Cell> elements(static_cast<std::size_t>(ne));
  for (auto& c : elements) {
    c = {-1, -1, -1};
    for (int k = 0; k <= n; ++k) {
      long long idx = -1;
      is >> idx;
      require(!is.fail(), ErrorCategory::io, "malformed mesh file: truncated element data");
      require(idx >= 0 && idx < nv, ErrorCategory::io, "malformed mesh file: vertex index out of range");
      c[static_cast<std::size_t>(k)] = static_cast<Index>(idx);
    }
  }
  const long long nb = read_count(is, "boundary");
  std::vector<bool> boundary(static_cast<std::size_t>(nv), false);
  for (long long i = 0; i < nb; ++i) {
    long long idx = -1;
    is >> idx;
    require(!is.fail(), ErrorCategory::io, "malformed mesh file: truncated boundary data");
    require(idx >= 0 && idx < nv, ErrorCategory::io, "malformed mesh file: boundary index out of range");
    boundary[static_cast<std::size_t>(idx)] = true;
  }
  if (parameter <= 0.0) {
    // placeholder; replaced by the max diameter below
    Mesh probe(n, vertices, elements, boundary, 1.0);
    parameter = probe.max_diameter();
  }
  return Mesh(n, std::move(vertices), std::move(elements), std::move(boundary), parameter);
}

}  // namespace fraclap
