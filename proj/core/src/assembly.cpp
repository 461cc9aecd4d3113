#include "fraclap/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "fraclap/error.hpp"

namespace fraclap {

double normalization_constant(int n, double s) {
  require(n == 1 || n == 2, ErrorCategory::invalid_argument, "dimension must be 1 or 2");
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  return std::pow(2.0, 2.0 * s) * s * std::tgamma(s + 0.5 * n) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

namespace {

// Quadrature points of one rule for every element, stored contiguously.
struct ElementPoints {
  int per_element = 0;
  int basis_count = 0;
  std::vector<Vec2> x;
  std::vector<double> w;  // includes the element Jacobian
  std::vector<double> basis;  // basis_count values per point

  const Vec2* points(Index e) const { return x.data() + static_cast<std::size_t>(e) * per_element; }
  const double* weights(Index e) const { return w.data() + static_cast<std::size_t>(e) * per_element; }
  const double* phi(Index e) const {
    return basis.data() + static_cast<std::size_t>(e) * per_element * basis_count;
  }
};

ElementPoints make_points(const Mesh& mesh, int order) {
  ElementPoints p;
  const int nv = mesh.vertices_per_element();
  p.basis_count = nv;
  if (mesh.dimension() == 1) {
    const GaussRule& g = gauss_rule_1d(order);
    p.per_element = static_cast<int>(g.size());
    for (Index e = 0; e < mesh.element_count(); ++e) {
      auto c = mesh.element(e);
      const double x0 = mesh.vertex(c[0]).x, x1 = mesh.vertex(c[1]).x;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = g.points[k];
        p.x.push_back({x0 + u * (x1 - x0), 0.0});
        p.w.push_back(g.weights[k] * (x1 - x0));
        p.basis.push_back(1.0 - u);
        p.basis.push_back(u);
      }
    }
    return p;
  }
  const TriangleRule& t = triangle_rule(order);
  p.per_element = static_cast<int>(t.size());
  for (Index e = 0; e < mesh.element_count(); ++e) {
    auto c = mesh.element(e);
    const Vec2 a = mesh.vertex(c[0]), b = mesh.vertex(c[1]), d = mesh.vertex(c[2]);
    const double jac = 2.0 * mesh.measure(e);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Vec2 r = t.points[k];
      p.x.push_back(a + r.x * (b - a) + r.y * (d - a));
      p.w.push_back(t.weights[k] * jac);
      p.basis.push_back(1.0 - r.x - r.y);
      p.basis.push_back(r.x);
      p.basis.push_back(r.y);
    }
  }
  return p;
}

struct ElementInfo {
  std::array<Index, 3> dofs{-1, -1, -1};
  bool has_dof = false;
  bool touches_boundary = false;
  Vec2 centroid;
  double radius = 0.0;
};

std::vector<ElementInfo> element_info(const Mesh& mesh, const DofMap& dofs) {
  std::vector<ElementInfo> info(static_cast<std::size_t>(mesh.element_count()));
  const int nv = mesh.vertices_per_element();
  for (Index e = 0; e < mesh.element_count(); ++e) {
    ElementInfo& in = info[static_cast<std::size_t>(e)];
    auto c = mesh.element(e);
    Vec2 centroid;
    for (int k = 0; k < nv; ++k) {
      const Index v = c[static_cast<std::size_t>(k)];
      in.dofs[static_cast<std::size_t>(k)] = dofs.dof(v);
      in.has_dof = in.has_dof || dofs.dof(v) >= 0;
      in.touches_boundary = in.touches_boundary || mesh.is_boundary(v);
      centroid = centroid + mesh.vertex(v);
    }
    in.centroid = (1.0 / nv) * centroid;
    for (int k = 0; k < nv; ++k) {
      in.radius = std::max(in.radius, norm(mesh.vertex(c[static_cast<std::size_t>(k)]) - in.centroid));
    }
  }
  return info;
}

// Adds v to the lower-triangle representative of (i, j).
inline void add_lower(Matrix& k, Index i, Index j, double v) {
  if (i >= j) k(i, j) += v;
  else k(j, i) += v;
}

struct WorkerState {
  Matrix k;
  std::vector<double> acc_near;
  std::vector<double> acc_far;
  std::vector<double> g;  // pair buffer
  std::vector<double> h;
  AssemblyStats stats;
};

// Disjoint pair on precomputed points. Adds the cross block to K and the
// kernel row/column sums to the per-point accumulators; the diagonal blocks
// are formed from the accumulators once the loop is complete.
void disjoint_pair(const ElementPoints& pts, const ElementInfo& ie, const ElementInfo& jf, Index e,
                   Index f, double expo, double scale, std::vector<double>& acc, WorkerState& ws) {
  const int q = pts.per_element;
  const int nb = pts.basis_count;
  const Vec2* xe = pts.points(e);
  const Vec2* xf = pts.points(f);
  const double* we = pts.weights(e);
  const double* wf = pts.weights(f);
  double* g = ws.g.data();
  double* acc_e = acc.data() + static_cast<std::size_t>(e) * q;
  double* acc_f = acc.data() + static_cast<std::size_t>(f) * q;
  for (int i = 0; i < q; ++i) {
    double row = 0.0;
    for (int j = 0; j < q; ++j) {
      const double val = we[i] * wf[j] * std::pow(norm2(xe[i] - xf[j]), expo);
      g[i * q + j] = val;
      row += val;
    }
    acc_e[i] += row;
  }
  for (int j = 0; j < q; ++j) {
    double col = 0.0;
    for (int i = 0; i < q; ++i) col += g[i * q + j];
    acc_f[j] += col;
  }
  if (!ie.has_dof || !jf.has_dof) return;

  const double* pe = pts.phi(e);
  const double* pf = pts.phi(f);
  double* h = ws.h.data();  // h[i * nb + b] = sum_j G_ij phi_b(y_j)
  for (int i = 0; i < q; ++i) {
    for (int b = 0; b < nb; ++b) {
      double sum = 0.0;
      for (int j = 0; j < q; ++j) sum += g[i * q + j] * pf[j * nb + b];
      h[i * nb + b] = sum;
    }
  }
  for (int a = 0; a < nb; ++a) {
    const Index da = ie.dofs[static_cast<std::size_t>(a)];
    if (da < 0) continue;
    for (int b = 0; b < nb; ++b) {
      const Index db = jf.dofs[static_cast<std::size_t>(b)];
      if (db < 0) continue;
      double sum = 0.0;
      for (int i = 0; i < q; ++i) sum += pe[i * nb + a] * h[i * nb + b];
      add_lower(ws.k, da, db, -scale * sum);
    }
  }
}

void scatter_local(const LocalPairMatrix& m, const DofMap& dofs, double scale, Matrix& k, Index e, Index f) {
  for (int a = 0; a < m.size; ++a) {
    for (int b = 0; b <= a; ++b) {
      if (!std::isfinite(m(a, b))) {
        fail(ErrorCategory::numerical, "non-finite interaction for element pair (" + std::to_string(e) + ", " +
                                           std::to_string(f) + ")");
      }
    }
  }
  for (int a = 0; a < m.size; ++a) {
    const Index da = dofs.dof(m.vertices[static_cast<std::size_t>(a)]);
    if (da < 0) continue;
    for (int b = 0; b < m.size; ++b) {
      const Index db = dofs.dof(m.vertices[static_cast<std::size_t>(b)]);
      if (db < 0 || db > da) continue;
      k(da, db) += scale * m(a, b);
    }
  }
}

// Quadrature for int_T phi_a phi_b kappa: standard rule in the interior,
// graded toward the boundary part of elements that touch the boundary.
struct LocalRule {
  std::vector<Vec2> x;
  std::vector<double> w;
  std::vector<std::array<double, 3>> phi;  // in element vertex order
};

LocalRule complement_rule(const Mesh& mesh, Index e, const QuadratureConfig& cfg, bool graded) {
  LocalRule r;
  auto c = mesh.element(e);
  const int order = cfg.complement_order;
  if (mesh.dimension() == 1) {
    const double x0 = mesh.vertex(c[0]).x, x1 = mesh.vertex(c[1]).x;
    const bool left = mesh.is_boundary(c[0]);
    const bool right = mesh.is_boundary(c[1]);
    GaussRule g;
    if (graded && (left || right)) g = graded_rule_1d(order, cfg.complement_levels);
    else g = gauss_rule_1d(order);
    for (std::size_t k = 0; k < g.size(); ++k) {
      // clustered points sit next to the boundary end
      const double u = (graded && right && !left) ? 1.0 - g.points[k] : g.points[k];
      r.x.push_back({x0 + u * (x1 - x0), 0.0});
      r.w.push_back(g.weights[k] * (x1 - x0));
      r.phi.push_back({1.0 - u, u, 0.0});
    }
    return r;
  }

  int nb = 0;
  for (Index v : c) nb += mesh.is_boundary(v);
  if (!graded || nb == 0) {
    const TriangleRule& t = triangle_rule(order);
    const Vec2 a = mesh.vertex(c[0]), b = mesh.vertex(c[1]), d = mesh.vertex(c[2]);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Vec2 q = t.points[k];
      r.x.push_back(a + q.x * (b - a) + q.y * (d - a));
      r.w.push_back(2.0 * mesh.measure(e) * t.weights[k]);
      r.phi.push_back({1.0 - q.x - q.y, q.x, q.y});
    }
    return r;
  }

  // Collapse at `apex`: x = apex + u ((p - apex) + v (q - apex - (p - apex))).
  // Boundary edge (p, q): apex interior, graded in 1 - u. Boundary vertex only:
  // apex is that vertex, graded in u.
  int apex = 0;
  bool edge_case = false;
  if (nb >= 2) {
    for (int k = 0; k < 3; ++k) {
      const Index p = c[static_cast<std::size_t>((k + 1) % 3)], q = c[static_cast<std::size_t>((k + 2) % 3)];
      if (!mesh.is_boundary(p) || !mesh.is_boundary(q)) continue;
      for (const auto& f : mesh.boundary_facets()) {
        if ((f[0] == p && f[1] == q) || (f[0] == q && f[1] == p)) {
          apex = k;
          edge_case = true;
        }
      }
      if (edge_case) break;
    }
  }
  if (!edge_case) {
    for (int k = 0; k < 3; ++k) {
      if (mesh.is_boundary(c[static_cast<std::size_t>(k)])) {
        apex = k;
        break;
      }
    }
  }
  const int i1 = (apex + 1) % 3, i2 = (apex + 2) % 3;
  const Vec2 pa = mesh.vertex(c[static_cast<std::size_t>(apex)]);
  const Vec2 p1 = mesh.vertex(c[static_cast<std::size_t>(i1)]);
  const Vec2 p2 = mesh.vertex(c[static_cast<std::size_t>(i2)]);
  const GaussRule radial = graded_rule_1d(order, cfg.complement_levels);
  const GaussRule& along = gauss_rule_1d(order);
  const double jac = 2.0 * mesh.measure(e);
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double u = edge_case ? 1.0 - radial.points[i] : radial.points[i];
    for (std::size_t j = 0; j < along.size(); ++j) {
      const double v = along.points[j];
      r.x.push_back(pa + u * ((p1 - pa) + v * (p2 - p1)));
      r.w.push_back(jac * u * radial.weights[i] * along.weights[j]);
      std::array<double, 3> phi{};
      phi[static_cast<std::size_t>(apex)] = 1.0 - u;
      phi[static_cast<std::size_t>(i1)] = u * (1.0 - v);
      phi[static_cast<std::size_t>(i2)] = u * v;
      r.phi.push_back(phi);
    }
  }
  return r;
}

template <class Fn>
void run_workers(int threads, Fn&& fn) {
  if (threads <= 1) {
    fn(0);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(w);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

StiffnessMatrix assemble_stiffness(const Mesh& mesh, double s, const AssemblyOptions& options) {
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  const QuadratureConfig& cfg = options.quadrature;
  validate(cfg);
  require(options.threads >= 1, ErrorCategory::invalid_argument, "thread count must be >= 1");
  require(mesh.dimension() == 2 || cfg.geometry == ComplementGeometry::polygon, ErrorCategory::mismatch,
          "exact-circle complement geometry needs a 2D mesh");

  const auto start = std::chrono::steady_clock::now();
  const DofMap dofs = interior_dof_map(mesh);
  const Index n = dofs.size();
  require(n > 0, ErrorCategory::invalid_argument, "mesh has no interior vertices");
  require(options.allow_large || n <= max_dense_dofs, ErrorCategory::invalid_argument,
          "N_dof = " + std::to_string(n) + " exceeds the dense limit of " + std::to_string(max_dense_dofs) +
              " (override to proceed)");

  const int dim = mesh.dimension();
  const double c = normalization_constant(dim, s);
  const double expo = -(0.5 * dim + s);
  const Index ne = mesh.element_count();
  const std::vector<ElementInfo> info = element_info(mesh, dofs);
  const ElementPoints near_pts = make_points(mesh, cfg.near_order);
  const ElementPoints far_pts = make_points(mesh, cfg.far_order);

  const int threads = options.threads;
  const bool private_matrices = options.deterministic || threads == 1;
  std::vector<WorkerState> workers(static_cast<std::size_t>(threads));
  Matrix shared_k;
  std::mutex shared_lock;
  if (!private_matrices) shared_k = Matrix::Zero(n, n);

  auto pair_loop = [&](int w) {
    WorkerState& ws = workers[static_cast<std::size_t>(w)];
    const int qmax = std::max(near_pts.per_element, far_pts.per_element);
    ws.g.assign(static_cast<std::size_t>(qmax) * qmax, 0.0);
    ws.h.assign(static_cast<std::size_t>(qmax) * 3, 0.0);
    ws.acc_near.assign(static_cast<std::size_t>(ne) * near_pts.per_element, 0.0);
    ws.acc_far.assign(static_cast<std::size_t>(ne) * far_pts.per_element, 0.0);
    // Without private matrices each worker batches one row of pairs, then merges.
    ws.k = Matrix::Zero(n, n);

    for (Index e = w; e < ne; e += threads) {
      const ElementInfo& ie = info[static_cast<std::size_t>(e)];
      for (Index f = e; f < ne; ++f) {
        const ElementInfo& jf = info[static_cast<std::size_t>(f)];
        if (!ie.has_dof && !jf.has_dof) continue;
        if (f == e) {
          scatter_local(pair_kernel_entries(mesh, e, e, PairClass::identical, s, cfg.touching_order), dofs,
                        0.5 * c, ws.k, e, f);
          ++ws.stats.identical_pairs;
          continue;
        }
        const int shared = shared_vertex_count(mesh, e, f);
        if (shared > 0) {
          const PairClass cls = classify_pair(mesh, e, f);
          scatter_local(pair_kernel_entries(mesh, e, f, cls, s, cfg.touching_order), dofs, c, ws.k, e, f);
          if (cls == PairClass::shared_edge) ++ws.stats.shared_edge_pairs;
          else ++ws.stats.shared_vertex_pairs;
          continue;
        }
        const double gap = norm(ie.centroid - jf.centroid) - ie.radius - jf.radius;
        const double hmax = std::max(mesh.diameter(e), mesh.diameter(f));
        if (gap > cfg.far_distance_factor * hmax) {
          disjoint_pair(far_pts, ie, jf, e, f, expo, c, ws.acc_far, ws);
          ++ws.stats.far_pairs;
        } else {
          disjoint_pair(near_pts, ie, jf, e, f, expo, c, ws.acc_near, ws);
          ++ws.stats.near_pairs;
        }
      }
      if (!private_matrices) {
        std::scoped_lock lock(shared_lock);
        shared_k += ws.k;
        ws.k.setZero();
      }
    }
  };
  run_workers(threads, pair_loop);

  Matrix k = private_matrices ? std::move(workers[0].k) : std::move(shared_k);
  std::vector<double> acc_near = std::move(workers[0].acc_near);
  std::vector<double> acc_far = std::move(workers[0].acc_far);
  AssemblyStats stats = workers[0].stats;
  for (std::size_t w = 1; w < workers.size(); ++w) {
    if (private_matrices) k += workers[w].k;
    for (std::size_t i = 0; i < acc_near.size(); ++i) acc_near[i] += workers[w].acc_near[i];
    for (std::size_t i = 0; i < acc_far.size(); ++i) acc_far[i] += workers[w].acc_far[i];
    stats.identical_pairs += workers[w].stats.identical_pairs;
    stats.shared_edge_pairs += workers[w].stats.shared_edge_pairs;
    stats.shared_vertex_pairs += workers[w].stats.shared_vertex_pairs;
    stats.near_pairs += workers[w].stats.near_pairs;
    stats.far_pairs += workers[w].stats.far_pairs;
    workers[w].k.resize(0, 0);
  }
  workers.clear();

  // diagonal blocks of disjoint interactions from accumulated kernel sums
  const int nv = mesh.vertices_per_element();
  auto diagonal_blocks = [&](const ElementPoints& pts, const std::vector<double>& acc) {
    for (Index e = 0; e < ne; ++e) {
      const ElementInfo& ie = info[static_cast<std::size_t>(e)];
      if (!ie.has_dof) continue;
      const double* phi = pts.phi(e);
      const double* a = acc.data() + static_cast<std::size_t>(e) * pts.per_element;
      for (int i = 0; i < nv; ++i) {
        const Index di = ie.dofs[static_cast<std::size_t>(i)];
        if (di < 0) continue;
        for (int j = 0; j < nv; ++j) {
          const Index dj = ie.dofs[static_cast<std::size_t>(j)];
          if (dj < 0 || dj > di) continue;
          double sum = 0.0;
          for (int q = 0; q < pts.per_element; ++q) sum += phi[q * nv + i] * phi[q * nv + j] * a[q];
          k(di, dj) += c * sum;
        }
      }
    }
  };
  diagonal_blocks(near_pts, acc_near);
  diagonal_blocks(far_pts, acc_far);

  // Omega x Omega^c term
  const ComplementEvaluator kappa(mesh, s, cfg.angular_order, cfg.geometry, cfg.cluster_separation);
  std::vector<Matrix> partial(static_cast<std::size_t>(threads));
  std::vector<std::size_t> points(static_cast<std::size_t>(threads), 0);
  run_workers(threads, [&](int w) {
    Matrix& kw = partial[static_cast<std::size_t>(w)];
    kw = Matrix::Zero(nv * 0 + (threads == 1 ? 0 : n), threads == 1 ? 0 : n);
    Matrix& target = (threads == 1) ? k : kw;
    for (Index e = w; e < ne; e += threads) {
      const ElementInfo& ie = info[static_cast<std::size_t>(e)];
      if (!ie.has_dof) continue;
      const LocalRule rule = complement_rule(mesh, e, cfg, ie.touches_boundary);
      std::array<double, 9> local{};
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double wk = rule.w[q] * kappa(rule.x[q]);
        for (int i = 0; i < nv; ++i) {
          for (int j = 0; j <= i; ++j) {
            local[static_cast<std::size_t>(i * 3 + j)] += wk * rule.phi[q][static_cast<std::size_t>(i)] *
                                                          rule.phi[q][static_cast<std::size_t>(j)];
          }
        }
      }
      points[static_cast<std::size_t>(w)] += rule.x.size();
      for (int i = 0; i < nv; ++i) {
        const Index di = ie.dofs[static_cast<std::size_t>(i)];
        if (di < 0) continue;
        for (int j = 0; j < nv; ++j) {
          const Index dj = ie.dofs[static_cast<std::size_t>(j)];
          if (dj < 0 || dj > di) continue;
          const double v = (j <= i) ? local[static_cast<std::size_t>(i * 3 + j)]
                                    : local[static_cast<std::size_t>(j * 3 + i)];
          target(di, dj) += c * v;
        }
      }
    }
  });
  if (threads > 1) {
    for (const Matrix& kw : partial) k += kw;
  }
  for (std::size_t p : points) stats.complement_points += p;

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) k(j, i) = k(i, j);
  }
  require(k.allFinite(), ErrorCategory::numerical, "stiffness matrix has non-finite entries");

  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  StiffnessMatrix result;
  result.values = std::move(k);
  result.s = s;
  result.stats = stats;
  return result;
}

// --- load vector -------------------------------------------------------------

LoadVector assemble_load(const Mesh& mesh, const RightHandSide& rhs, int quad_order) {
  const bool flap = std::holds_alternative<TruncatedSineFlap>(rhs);
  require(!flap || mesh.dimension() == 1, ErrorCategory::mismatch,
          "the truncated-sine right-hand side is only defined in 1D");
  if (quad_order == 0) quad_order = flap ? 8 : 4;
  require(quad_order >= 1 && quad_order <= max_gauss_order, ErrorCategory::invalid_argument,
          "load quadrature order must lie in [1, 30]");

  std::function<double(Vec2)> f;
  if (std::holds_alternative<ConstantOne>(rhs)) {
    f = [](Vec2) { return 1.0; };
  } else if (flap) {
    const TruncatedSineFlap t = std::get<TruncatedSineFlap>(rhs);
    require(t.s > 0.0 && t.s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
    f = [t](Vec2 x) { return eval_flap_sine(x.x, t.s, t.tolerance); };
  } else {
    f = std::get<Callable>(rhs).f;
    require(static_cast<bool>(f), ErrorCategory::invalid_argument, "empty right-hand side callable");
  }

  const DofMap dofs = interior_dof_map(mesh);
  LoadVector load;
  load.values = Vector::Zero(dofs.size());
  QuadratureConfig cfg;
  cfg.complement_order = std::max(4, quad_order);
  cfg.complement_levels = 12;
  const int nv = mesh.vertices_per_element();
  for (Index e = 0; e < mesh.element_count(); ++e) {
    auto c = mesh.element(e);
    bool touches = false;
    for (Index v : c) touches = touches || mesh.is_boundary(v);
    LocalRule rule;
    if (flap && touches) {
      rule = complement_rule(mesh, e, cfg, true);
    } else if (mesh.dimension() == 1) {
      const GaussRule& g = gauss_rule_1d(quad_order);
      const double x0 = mesh.vertex(c[0]).x, x1 = mesh.vertex(c[1]).x;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double u = g.points[k];
        rule.x.push_back({x0 + u * (x1 - x0), 0.0});
        rule.w.push_back(g.weights[k] * (x1 - x0));
        rule.phi.push_back({1.0 - u, u, 0.0});
      }
    } else {
      const TriangleRule& t = triangle_rule(quad_order);
      const Vec2 a = mesh.vertex(c[0]), b = mesh.vertex(c[1]), d = mesh.vertex(c[2]);
      for (std::size_t k = 0; k < t.size(); ++k) {
        const Vec2 q = t.points[k];
        rule.x.push_back(a + q.x * (b - a) + q.y * (d - a));
        rule.w.push_back(2.0 * mesh.measure(e) * t.weights[k]);
        rule.phi.push_back({1.0 - q.x - q.y, q.x, q.y});
      }
    }
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
      const double fw = rule.w[q] * f(rule.x[q]);
      for (int i = 0; i < nv; ++i) {
        const Index d = dofs.dof(c[static_cast<std::size_t>(i)]);
        if (d >= 0) load.values(d) += fw * rule.phi[q][static_cast<std::size_t>(i)];
      }
    }
  }
  return load;
}

Matrix assemble_mass(const Mesh& mesh) {
  const DofMap dofs = interior_dof_map(mesh);
  Matrix m = Matrix::Zero(dofs.size(), dofs.size());
  const int nv = mesh.vertices_per_element();
  // local mass |T| (1 + delta_ij) / ((n + 1)(n + 2))
  const double denom = (nv) * (nv + 1);
  for (Index e = 0; e < mesh.element_count(); ++e) {
    auto c = mesh.element(e);
    for (int i = 0; i < nv; ++i) {
      const Index di = dofs.dof(c[static_cast<std::size_t>(i)]);
      if (di < 0) continue;
      for (int j = 0; j < nv; ++j) {
        const Index dj = dofs.dof(c[static_cast<std::size_t>(j)]);
        if (dj < 0) continue;
        m(di, dj) += mesh.measure(e) * (i == j ? 2.0 : 1.0) / denom;
      }
    }
  }
  return m;
}

// --- dump format ---------------------------------------------------------------

void write_matrix(std::ostream& os, const Matrix& k) {
  os << "fracmat 1 " << k.rows() << '\n' << std::setprecision(17);
  for (Index i = 0; i < k.rows(); ++i) {
    for (Index j = 0; j <= i; ++j) os << (j ? " " : "") << k(i, j);
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::string tag;
  int version = 0;
  Index n = -1;
  is >> tag >> version >> n;
  require(is.good() && tag == "fracmat" && version == 1 && n >= 0, ErrorCategory::io,
          "not a fracmat version 1 stream");
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      is >> k(i, j);
      require(!is.fail(), ErrorCategory::io, "truncated fracmat data");
      k(j, i) = k(i, j);
    }
  }
  return k;
}

void write_vector(std::ostream& os, const Vector& v) {
  os << "fracvec 1 " << v.size() << '\n' << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) os << v(i) << '\n';
}

Vector read_vector(std::istream& is) {
  std::string tag;
  int version = 0;
  Index n = -1;
  is >> tag >> version >> n;
  require(is.good() && tag == "fracvec" && version == 1 && n >= 0, ErrorCategory::io,
          "not a fracvec version 1 stream");
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    is >> v(i);
    require(!is.fail(), ErrorCategory::io, "truncated fracvec data");
  }
  return v;
}

}  // namespace fraclap
