#include "fraclap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "fraclap/error.hpp"

namespace fraclap {

std::string to_string(PairClass c) {
  switch (c) {
    case PairClass::identical: return "identical";
    case PairClass::shared_edge: return "shared-edge";
    case PairClass::shared_vertex: return "shared-vertex";
    case PairClass::disjoint: return "disjoint";
  }
  return "unknown";
}

namespace {

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
  auto angle = [](Vec2 p, Vec2 q, Vec2 r) {
    Vec2 u = q - p;
    Vec2 v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double t = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace

Mesh::Mesh(int dimension, std::vector<Vec2> vertices, std::vector<Cell> elements,
           std::vector<bool> boundary_flags, double mesh_parameter)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary_flags)),
      mesh_parameter_(mesh_parameter) {
  require(dimension_ == 1 || dimension_ == 2, ErrorCategory::invalid_argument,
          "mesh dimension must be 1 or 2");
  require(boundary_.size() == vertices_.size(), ErrorCategory::invalid_argument,
          "boundary flag count does not match vertex count");
  require(!elements_.empty(), ErrorCategory::invalid_argument, "mesh has no elements");
  require(mesh_parameter_ > 0.0, ErrorCategory::invalid_argument,
          "mesh parameter must be positive");

  const auto nv = static_cast<Index>(vertices_.size());
  const int k = vertices_per_element();
  measures_.reserve(elements_.size());
  diameters_.reserve(elements_.size());
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const Cell& c = elements_[e];
    for (int i = 0; i < k; ++i) {
      require(c[i] >= 0 && c[i] < nv, ErrorCategory::invalid_argument,
              "element " + std::to_string(e) + " references a missing vertex");
    }
    double m = 0.0;
    double h = 0.0;
    if (dimension_ == 1) {
      m = vertex(c[1]).x - vertex(c[0]).x;
      h = std::abs(m);
    } else {
      const Vec2 a = vertex(c[0]), b = vertex(c[1]), d = vertex(c[2]);
      m = signed_area(a, b, d);
      h = std::max({norm(b - a), norm(d - b), norm(a - d)});
    }
    require(m > 0.0, ErrorCategory::invalid_argument,
            "element " + std::to_string(e) + " is degenerate or negatively oriented");
    measures_.push_back(m);
    diameters_.push_back(h);
    max_diameter_ = std::max(max_diameter_, h);
    total_measure_ += m;
  }

  // vertex -> element adjacency (CSR)
  star_offsets_.assign(static_cast<std::size_t>(nv) + 1, 0);
  for (const Cell& c : elements_) {
    for (int i = 0; i < k; ++i) ++star_offsets_[static_cast<std::size_t>(c[i]) + 1];
  }
  for (std::size_t v = 0; v < static_cast<std::size_t>(nv); ++v) {
    star_offsets_[v + 1] += star_offsets_[v];
  }
  star_elements_.resize(static_cast<std::size_t>(star_offsets_.back()));
  std::vector<Index> fill(star_offsets_.begin(), star_offsets_.end() - 1);
  for (Index e = 0; e < element_count(); ++e) {
    for (int i = 0; i < k; ++i) {
      star_elements_[static_cast<std::size_t>(fill[static_cast<std::size_t>(elements_[e][i])]++)] = e;
    }
  }

  if (dimension_ == 1) {
    for (Index v = 0; v < nv; ++v) {
      if (star(v).size() == 1) boundary_facets_.push_back({v, v});
    }
  } else {
    std::map<std::pair<Index, Index>, int> edge_use;
    for (const Cell& c : elements_) {
      for (int i = 0; i < 3; ++i) {
        Index a = c[i], b = c[(i + 1) % 3];
        ++edge_use[{std::min(a, b), std::max(a, b)}];
      }
    }
    for (const Cell& c : elements_) {
      for (int i = 0; i < 3; ++i) {
        Index a = c[i], b = c[(i + 1) % 3];
        int uses = edge_use[{std::min(a, b), std::max(a, b)}];
        require(uses <= 2, ErrorCategory::invalid_argument,
                "edge shared by more than two elements");
        if (uses == 1) boundary_facets_.push_back({a, b});  // interior on the left
      }
    }
  }
}

std::span<const Index> Mesh::star(Index v) const {
  const auto b = static_cast<std::size_t>(star_offsets_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(star_offsets_[static_cast<std::size_t>(v) + 1]);
  return {star_elements_.data() + b, e - b};
}

std::vector<double> graded_radii(GradingSpec spec) {
  std::vector<double> r(static_cast<std::size_t>(spec.rings) + 1);
  for (int i = 0; i <= spec.rings; ++i) {
    r[static_cast<std::size_t>(i)] =
        1.0 - std::pow(1.0 - static_cast<double>(i) / spec.rings, spec.mu);
  }
  r.back() = 1.0;
  return r;
}

Mesh build_interval_mesh(double a, double b, GradingSpec spec) {
  require(a < b, ErrorCategory::invalid_argument, "interval mesh needs a < b");
  require(spec.rings >= 1, ErrorCategory::invalid_argument, "interval mesh needs M >= 1");
  require(spec.mu >= 1.0 && spec.mu < 2.0, ErrorCategory::invalid_argument,
          "grading exponent must lie in [1, 2)");

  const int m = spec.rings;
  const double half = 0.5 * (b - a);
  std::vector<double> d(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    d[static_cast<std::size_t>(i)] =
        half * (1.0 - std::pow(1.0 - static_cast<double>(i) / m, spec.mu));
  }
  d[static_cast<std::size_t>(m)] = half;

  std::vector<Vec2> vertices;
  vertices.reserve(2 * static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) vertices.push_back({a + d[static_cast<std::size_t>(i)], 0.0});
  vertices.back().x = 0.5 * (a + b);
  for (int i = m - 1; i >= 0; --i) vertices.push_back({b - d[static_cast<std::size_t>(i)], 0.0});

  std::vector<Cell> cells;
  for (Index i = 0; i + 1 < static_cast<Index>(vertices.size()); ++i) cells.push_back({i, i + 1, -1});

  std::vector<bool> boundary(vertices.size(), false);
  boundary.front() = true;
  boundary.back() = true;
  // uniform cells have length (b - a)/(2M), which equals 1/M on (-1, 1)
  const double h = half / m;
  return Mesh(1, std::move(vertices), std::move(cells), std::move(boundary), h);
}

Mesh build_graded_disk_mesh(GradingSpec spec) {
  require(spec.rings >= 2, ErrorCategory::invalid_argument, "disk mesh needs M >= 2");
  require(spec.mu >= 1.0 && spec.mu < 2.0, ErrorCategory::invalid_argument,
          "grading exponent must lie in [1, 2)");

  const int m = spec.rings;
  const std::vector<double> r = graded_radii(spec);

  std::vector<Vec2> vertices{{0.0, 0.0}};
  std::vector<Index> ring_start(static_cast<std::size_t>(m) + 1, 0);
  std::vector<Index> ring_size(static_cast<std::size_t>(m) + 1, 1);
  for (int i = 1; i <= m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double width = r[iu] - r[iu - 1];
    const int count = std::max(3, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r[iu] / width)));
    ring_start[iu] = static_cast<Index>(vertices.size());
    ring_size[iu] = count;
    for (int k = 0; k < count; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / count;
      vertices.push_back({r[iu] * std::cos(theta), r[iu] * std::sin(theta)});
    }
  }

  std::vector<Cell> cells;
  auto push = [&](Index p, Index q, Index s) {
    if (signed_area(vertices[static_cast<std::size_t>(p)], vertices[static_cast<std::size_t>(q)],
                    vertices[static_cast<std::size_t>(s)]) < 0.0) {
      std::swap(q, s);
    }
    cells.push_back({p, q, s});
  };

  const Index n1 = ring_size[1];
  for (Index k = 0; k < n1; ++k) push(0, ring_start[1] + k, ring_start[1] + (k + 1) % n1);

  for (int i = 2; i <= m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const Index na = ring_size[iu - 1], nb = ring_size[iu];
    auto inner = [&](Index k) { return ring_start[iu - 1] + k % na; };
    auto outer = [&](Index k) { return ring_start[iu] + k % nb; };
    auto at = [&](Index v) { return vertices[static_cast<std::size_t>(v)]; };
    Index ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      bool advance_inner;
      if (ia == na) {
        advance_inner = false;
      } else if (ib == nb) {
        advance_inner = true;
      } else {
        const double qa = min_angle(at(inner(ia)), at(inner(ia + 1)), at(outer(ib)));
        const double qb = min_angle(at(inner(ia)), at(outer(ib + 1)), at(outer(ib)));
        advance_inner = qa >= qb;
      }
      if (advance_inner) {
        push(inner(ia), inner(ia + 1), outer(ib));
        ++ia;
      } else {
        push(inner(ia), outer(ib + 1), outer(ib));
        ++ib;
      }
    }
  }

  std::vector<bool> boundary(vertices.size(), false);
  for (Index k = 0; k < ring_size[static_cast<std::size_t>(m)]; ++k) {
    boundary[static_cast<std::size_t>(ring_start[static_cast<std::size_t>(m)] + k)] = true;
  }

  double h = 1.0 / m;
  if (spec.mu == 1.0) {
    double hmax = 0.0;
    for (const Cell& c : cells) {
      const Vec2 a = vertices[static_cast<std::size_t>(c[0])], b = vertices[static_cast<std::size_t>(c[1])],
                 d = vertices[static_cast<std::size_t>(c[2])];
      hmax = std::max({hmax, norm(b - a), norm(d - b), norm(a - d)});
    }
    h = hmax;
  }
  return Mesh(2, std::move(vertices), std::move(cells), std::move(boundary), h);
}

int shared_vertex_count(const Mesh& mesh, Index t1, Index t2) {
  int shared = 0;
  for (Index a : mesh.element(t1)) {
    for (Index b : mesh.element(t2)) shared += (a == b);
  }
  return shared;
}

PairClass classify_pair(const Mesh& mesh, Index t1, Index t2) {
  require(t1 >= 0 && t1 < mesh.element_count() && t2 >= 0 && t2 < mesh.element_count(),
          ErrorCategory::invalid_argument, "element index out of range");
  if (t1 == t2) return PairClass::identical;
  const int shared = shared_vertex_count(mesh, t1, t2);
  if (shared == 0) return PairClass::disjoint;
  if (shared == 1) return PairClass::shared_vertex;
  require(mesh.dimension() == 2 && shared == 2, ErrorCategory::invalid_argument,
          "elements " + std::to_string(t1) + " and " + std::to_string(t2) + " are duplicates");
  return PairClass::shared_edge;
}

std::vector<Index> star(const Mesh& mesh, Index vertex) {
  require(vertex >= 0 && vertex < mesh.vertex_count(), ErrorCategory::invalid_argument,
          "vertex index out of range");
  auto s = mesh.star(vertex);
  return {s.begin(), s.end()};
}

DofMap interior_dof_map(const Mesh& mesh) {
  DofMap map;
  map.vertex_to_dof.assign(static_cast<std::size_t>(mesh.vertex_count()), -1);
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_boundary(v)) continue;
    map.vertex_to_dof[static_cast<std::size_t>(v)] = map.size();
    map.dof_to_vertex.push_back(v);
  }
  return map;
}

namespace {

struct Box {
  double x0, y0, x1, y1;
};

Box bounding_box(const Mesh& mesh, Index e) {
  Box b{1e300, 1e300, -1e300, -1e300};
  for (Index v : mesh.element(e)) {
    const Vec2 p = mesh.vertex(v);
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

// Separating-axis test for closed triangles; true when a positive gap exists.
bool triangles_separated(const std::array<Vec2, 3>& t, const std::array<Vec2, 3>& u, double tol) {
  auto separated_by_edges = [tol](const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = a[(i + 1) % 3] - a[i];
      const Vec2 n{e.y, -e.x};  // outward for counter-clockwise a
      const double len = norm(n);
      double amax = -1e300, bmin = 1e300;
      for (int k = 0; k < 3; ++k) {
        amax = std::max(amax, dot(n, a[k]) / len);
        bmin = std::min(bmin, dot(n, b[k]) / len);
      }
      if (bmin > amax + tol) return true;
    }
    return false;
  };
  return separated_by_edges(t, u) || separated_by_edges(u, t);
}

std::string pair_message(Index a, Index b, const char* what) {
  std::ostringstream os;
  os << "elements " << a << " and " << b << ": " << what;
  return os.str();
}

// Returns an empty string when the pair meets conformingly.
std::string check_pair(const Mesh& mesh, Index e, Index f, double tol) {
  auto ce = mesh.element(e);
  auto cf = mesh.element(f);
  const int shared = shared_vertex_count(mesh, e, f);
  if (mesh.dimension() == 1) {
    const double a0 = mesh.vertex(ce[0]).x, a1 = mesh.vertex(ce[1]).x;
    const double b0 = mesh.vertex(cf[0]).x, b1 = mesh.vertex(cf[1]).x;
    if (shared == 2) return pair_message(e, f, "duplicate element");
    if (shared == 1) {
      const bool ok = (a1 == b0 && ce[1] == cf[0]) || (b1 == a0 && cf[1] == ce[0]);
      return ok ? "" : pair_message(e, f, "overlapping intervals sharing a vertex");
    }
    return (a1 < b0 - tol || b1 < a0 - tol) ? "" : pair_message(e, f, "intervals intersect");
  }

  std::array<Vec2, 3> t{mesh.vertex(ce[0]), mesh.vertex(ce[1]), mesh.vertex(ce[2])};
  std::array<Vec2, 3> u{mesh.vertex(cf[0]), mesh.vertex(cf[1]), mesh.vertex(cf[2])};
  if (shared == 3) return pair_message(e, f, "duplicate element");
  if (shared == 0) {
    return triangles_separated(t, u, tol) ? "" : pair_message(e, f, "triangles intersect");
  }
  if (shared == 2) {
    Index p = -1, q = -1, ae = -1, af = -1;
    for (Index v : ce) {
      if (std::find(cf.begin(), cf.end(), v) != cf.end()) {
        (p < 0 ? p : q) = v;
      } else {
        ae = v;
      }
    }
    for (Index v : cf) {
      if (v != p && v != q) af = v;
    }
    const Vec2 d = mesh.vertex(q) - mesh.vertex(p);
    const double se = cross(d, mesh.vertex(ae) - mesh.vertex(p));
    const double sf = cross(d, mesh.vertex(af) - mesh.vertex(p));
    return (se * sf < 0.0) ? "" : pair_message(e, f, "triangles overlap across shared edge");
  }
  // one shared vertex: the two corner cones must only touch at the apex
  Index apex = -1;
  for (Index v : ce) {
    if (std::find(cf.begin(), cf.end(), v) != cf.end()) apex = v;
  }
  const Vec2 o = mesh.vertex(apex);
  auto cone = [&](std::span<const Index> c) {
    std::array<Vec2, 2> dirs{};
    int k = 0;
    for (Index v : c) {
      if (v != apex) dirs[static_cast<std::size_t>(k++)] = mesh.vertex(v) - o;
    }
    if (cross(dirs[0], dirs[1]) < 0.0) std::swap(dirs[0], dirs[1]);
    return dirs;
  };
  const auto de = cone(ce);
  const auto df = cone(cf);
  const double two_pi = 2.0 * std::numbers::pi;
  auto angle_from = [&](Vec2 ref, Vec2 v) {
    double a = std::atan2(cross(ref, v), dot(ref, v));
    return a < 0.0 ? a + two_pi : a;
  };
  const double span_e = angle_from(de[0], de[1]);
  const double start_f = angle_from(de[0], df[0]);
  const double end_f = start_f + angle_from(df[0], df[1]);
  const double overlap = std::max(0.0, std::min(span_e, end_f) - std::max(0.0, start_f)) +
                         std::max(0.0, std::min(two_pi + span_e, end_f) - std::max(two_pi, start_f));
  const double angle_tol = 1e-12;
  if (overlap > angle_tol) return pair_message(e, f, "triangles overlap at shared vertex");
  for (const Vec2& a : de) {
    for (const Vec2& b : df) {
      if (std::abs(cross(a, b)) <= angle_tol * norm(a) * norm(b) && dot(a, b) > 0.0) {
        return pair_message(e, f, "collinear edges at shared vertex (hanging node)");
      }
    }
  }
  return "";
}

}  // namespace

ConformityReport check_conformity(const Mesh& mesh) {
  ConformityReport report;
  const Index ne = mesh.element_count();
  std::vector<Box> boxes(static_cast<std::size_t>(ne));
  Box all{1e300, 1e300, -1e300, -1e300};
  double mean_h = 0.0;
  for (Index e = 0; e < ne; ++e) {
    boxes[static_cast<std::size_t>(e)] = bounding_box(mesh, e);
    const Box& b = boxes[static_cast<std::size_t>(e)];
    all = {std::min(all.x0, b.x0), std::min(all.y0, b.y0), std::max(all.x1, b.x1), std::max(all.y1, b.y1)};
    mean_h += mesh.diameter(e);
  }
  mean_h /= ne;
  const double tol = 1e-12 * std::max(all.x1 - all.x0, all.y1 - all.y0);

  const double cell = std::max(mean_h, 1e-300);
  const int nx = std::max(1, static_cast<int>(std::ceil((all.x1 - all.x0) / cell)));
  const int ny = std::max(1, static_cast<int>(std::ceil((all.y1 - all.y0) / cell)));
  std::vector<std::vector<Index>> grid(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  auto clamp_cell = [](double v, int n) { return std::clamp(static_cast<int>(v), 0, n - 1); };
  for (Index e = 0; e < ne; ++e) {
    const Box& b = boxes[static_cast<std::size_t>(e)];
    const int i0 = clamp_cell((b.x0 - all.x0) / cell, nx), i1 = clamp_cell((b.x1 - all.x0) / cell, nx);
    const int j0 = clamp_cell((b.y0 - all.y0) / cell, ny), j1 = clamp_cell((b.y1 - all.y0) / cell, ny);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)].push_back(e);
      }
    }
  }

  std::vector<Index> stamp(static_cast<std::size_t>(ne), -1);
  for (Index e = 0; e < ne; ++e) {
    const Box& b = boxes[static_cast<std::size_t>(e)];
    const int i0 = clamp_cell((b.x0 - all.x0) / cell, nx), i1 = clamp_cell((b.x1 - all.x0) / cell, nx);
    const int j0 = clamp_cell((b.y0 - all.y0) / cell, ny), j1 = clamp_cell((b.y1 - all.y0) / cell, ny);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        for (Index f : grid[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(j)]) {
          if (f <= e || stamp[static_cast<std::size_t>(f)] == e) continue;
          stamp[static_cast<std::size_t>(f)] = e;
          const Box& c = boxes[static_cast<std::size_t>(f)];
          if (c.x0 > b.x1 + tol || b.x0 > c.x1 + tol || c.y0 > b.y1 + tol || b.y0 > c.y1 + tol) continue;
          ++report.pairs_checked;
          std::string msg = check_pair(mesh, e, f, tol);
          if (!msg.empty()) {
            report.ok = false;
            report.message = std::move(msg);
            return report;
          }
        }
      }
    }
  }

  // boundary flags must coincide with the vertices of boundary facets
  std::vector<bool> on_facet(static_cast<std::size_t>(mesh.vertex_count()), false);
  for (const auto& f : mesh.boundary_facets()) {
    on_facet[static_cast<std::size_t>(f[0])] = true;
    on_facet[static_cast<std::size_t>(f[1])] = true;
  }
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (on_facet[static_cast<std::size_t>(v)] != mesh.is_boundary(v)) {
      report.ok = false;
      report.message = "boundary flag of vertex " + std::to_string(v) + " does not match the mesh boundary";
      return report;
    }
  }
  return report;
}

double inscribed_diameter(const Mesh& mesh, Index e) {
  if (mesh.dimension() == 1) return mesh.measure(e);
  auto c = mesh.element(e);
  const Vec2 a = mesh.vertex(c[0]), b = mesh.vertex(c[1]), d = mesh.vertex(c[2]);
  const double perimeter = norm(b - a) + norm(d - b) + norm(a - d);
  return 4.0 * mesh.measure(e) / perimeter;
}

MeshQuality measure_quality(const Mesh& mesh) {
  MeshQuality q;
  q.min_measure = 1e300;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    q.shape_regularity = std::max(q.shape_regularity, mesh.diameter(e) / inscribed_diameter(mesh, e));
    q.min_measure = std::min(q.min_measure, mesh.measure(e));
  }
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    double lo = 1e300, hi = 0.0;
    for (Index e : mesh.star(v)) {
      lo = std::min(lo, mesh.diameter(e));
      hi = std::max(hi, mesh.diameter(e));
    }
    if (hi > 0.0) q.quasi_uniformity = std::max(q.quasi_uniformity, hi / lo);
  }
  return q;
}

double distance_to_boundary(const Mesh& mesh, Vec2 p) {
  double d = 1e300;
  for (const auto& f : mesh.boundary_facets()) {
    if (mesh.dimension() == 1) {
      d = std::min(d, std::abs(p.x - mesh.vertex(f[0]).x));
    } else {
      d = std::min(d, segment_distance(p, mesh.vertex(f[0]), mesh.vertex(f[1])));
    }
  }
  return d;
}

Mesh map_vertices(const Mesh& mesh, const std::function<Vec2(Vec2)>& f, double length_scale) {
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(mesh.vertex_count()));
  for (const Vec2& p : mesh.vertices()) vertices.push_back(f(p));
  return Mesh(mesh.dimension(), std::move(vertices),
              std::vector<Cell>(mesh.elements().begin(), mesh.elements().end()), mesh.boundary_flags(),
              mesh.mesh_parameter() * length_scale);
}

}  // namespace fraclap
