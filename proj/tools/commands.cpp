#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fraclap/analytic.hpp"
#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"
#include "fraclap/linalg.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/mesh_io.hpp"
#include "fraclap/study.hpp"

namespace fraclap::cli {

namespace {

void require_s(double s) {
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
}

void require_grading(int rings, double mu) {
  require(rings >= 1 && rings <= 4096, ErrorCategory::invalid_argument, "rings must lie in [1, 4096]");
  require(mu >= 1.0 && mu <= 4.0, ErrorCategory::invalid_argument, "grading must lie in [1, 4]");
}

std::ofstream open_output(const std::filesystem::path& path, Context& ctx) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorCategory::io, "cannot write " + path.string());
  ctx.outputs.push_back(path);
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  require(!out.fail(), ErrorCategory::io, "write failed for " + path.string());
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCategory::io, "cannot open mesh file " + path.string());
  return read_mesh(in);
}

AssemblyOptions assembly_options(int dimension, bool exact_circle, const Context& ctx) {
  AssemblyOptions o = AssemblyOptions::defaults(dimension);
  o.threads = ctx.threads;
  o.deterministic = ctx.deterministic;
  if (exact_circle) o.quadrature.geometry = ComplementGeometry::exact_circle;
  return o;
}

// Reference element pairs on the unit right triangle (or unit interval).
Mesh reference_pair_mesh(int dimension, PairClass cls) {
  if (dimension == 1) {
    std::vector<Vec2> v{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}};
    std::vector<Cell> e{{0, 1, -1}};
    if (cls == PairClass::shared_vertex) e.push_back({1, 2, -1});
    if (cls == PairClass::disjoint) e.push_back({2, 3, -1});
    return Mesh(1, v, e, std::vector<bool>(v.size(), false), 1.0);
  }
  std::vector<Vec2> v{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  std::vector<Cell> e{{0, 1, 2}};
  switch (cls) {
    case PairClass::identical: break;
    case PairClass::shared_edge:
      v.push_back({1.0, 1.0});
      e.push_back({1, 3, 2});
      break;
    case PairClass::shared_vertex:
      v.push_back({-1.0, 0.0});
      v.push_back({0.0, -1.0});
      e.push_back({0, 3, 4});
      break;
    case PairClass::disjoint:
      v.push_back({2.0, 0.0});
      v.push_back({3.0, 0.0});
      v.push_back({2.0, 1.0});
      e.push_back({3, 4, 5});
      break;
  }
  return Mesh(2, v, e, std::vector<bool>(v.size(), false), 1.0);
}

PairClass parse_pair_class(const std::string& text) {
  if (text == "identical") return PairClass::identical;
  if (text == "shared-edge") return PairClass::shared_edge;
  if (text == "shared-vertex") return PairClass::shared_vertex;
  if (text == "disjoint") return PairClass::disjoint;
  fail(ErrorCategory::invalid_argument,
       "unknown pair class '" + text + "' (expected identical, shared-edge, shared-vertex or disjoint)");
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> xs;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used > 0 && used == item.size(), ErrorCategory::invalid_argument,
            "cannot parse coordinate '" + item + "' in --at");
    xs.push_back(v);
  }
  return xs;
}

}  // namespace

void run_mesh(const MeshArgs& args, Context& ctx) {
  require(args.shape == "disk" || args.shape == "interval", ErrorCategory::invalid_argument,
          "shape must be disk or interval");
  require_grading(args.rings, args.grading);
  require(!args.out.empty(), ErrorCategory::invalid_argument, "--out is required");
  ctx.config = {{"shape", args.shape}, {"rings", args.rings}, {"grading", args.grading}};
  if (args.shape == "interval") {
    require(args.a < args.b, ErrorCategory::invalid_argument, "interval needs a < b");
    ctx.config["a"] = args.a;
    ctx.config["b"] = args.b;
  }
  ctx.config["out"] = args.out.string();

  const Mesh mesh = args.shape == "disk" ? build_graded_disk_mesh({args.rings, args.grading})
                                         : build_interval_mesh(args.a, args.b, {args.rings, args.grading});
  auto out = open_output(args.out, ctx);
  write_mesh(out, mesh);
  close_output(out, args.out);

  const MeshQuality q = measure_quality(mesh);
  std::ostream& os = *ctx.out;
  os << "vertices " << mesh.vertex_count() << '\n'
     << "elements " << mesh.element_count() << '\n'
     << "dofs " << interior_dof_map(mesh).size() << '\n'
     << "h " << std::setprecision(10) << mesh.mesh_parameter() << '\n'
     << "max_diameter " << mesh.max_diameter() << '\n'
     << "shape_regularity " << q.shape_regularity << '\n';
}

void run_assemble(const AssembleArgs& args, Context& ctx) {
  require_s(args.s);
  require(args.rhs == "one" || args.rhs == "sine", ErrorCategory::invalid_argument, "rhs must be one or sine");
  require(!args.out.empty(), ErrorCategory::invalid_argument, "--out is required");
  ctx.config = {{"mesh", args.mesh.string()}, {"s", args.s}, {"rhs", args.rhs},
                {"exact_circle", args.exact_circle}, {"out", args.out}};

  const Mesh mesh = load_mesh(args.mesh);
  require(!(args.rhs == "sine" && mesh.dimension() != 1), ErrorCategory::mismatch,
          "the truncated sine right-hand side is defined on 1D meshes only");
  require(!(args.exact_circle && mesh.dimension() != 2), ErrorCategory::mismatch,
          "--exact-circle applies to 2D disk meshes only");

  const StiffnessMatrix k = assemble_stiffness(mesh, args.s, assembly_options(mesh.dimension(), args.exact_circle, ctx));
  const LoadVector f = args.rhs == "one" ? assemble_load(mesh, ConstantOne{})
                                         : assemble_load(mesh, TruncatedSineFlap{args.s});

  const std::filesystem::path kpath = args.out + ".fracmat";
  const std::filesystem::path fpath = args.out + ".fracvec";
  auto kout = open_output(kpath, ctx);
  write_matrix(kout, k.values);
  close_output(kout, kpath);
  auto fout = open_output(fpath, ctx);
  write_vector(fout, f.values);
  close_output(fout, fpath);

  std::ostream& os = *ctx.out;
  os << "N_dof " << k.size() << '\n'
     << "identical_pairs " << k.stats.identical_pairs << '\n'
     << "shared_edge_pairs " << k.stats.shared_edge_pairs << '\n'
     << "shared_vertex_pairs " << k.stats.shared_vertex_pairs << '\n'
     << "near_pairs " << k.stats.near_pairs << '\n'
     << "far_pairs " << k.stats.far_pairs << '\n'
     << "complement_points " << k.stats.complement_points << '\n'
     << "symmetry_defect " << std::setprecision(3) << symmetry_defect(k.values) << '\n';
  if (!ctx.deterministic) os << "assembly_seconds " << k.stats.seconds << '\n';
}

void run_solve(const SolveArgs& args, Context& ctx) {
  const Problem problem = parse_problem(args.problem);
  require_s(args.s);
  require_grading(args.rings, args.grading);
  require(!(args.exact_circle && problem != Problem::disk_constant), ErrorCategory::mismatch,
          "--exact-circle applies to the disk problem only");
  ctx.config = {{"problem", args.problem}, {"s", args.s}, {"rings", args.rings}, {"grading", args.grading},
                {"exact_circle", args.exact_circle}};
  if (!args.solution_out.empty()) ctx.config["solution_out"] = args.solution_out.string();

  const SolveOutcome r = solve_problem(problem, args.s, {args.rings, args.grading},
                                       assembly_options(problem_dimension(problem), args.exact_circle, ctx));
  if (!args.solution_out.empty()) {
    auto out = open_output(args.solution_out, ctx);
    write_vector(out, r.solve.solution);
    close_output(out, args.solution_out);
  }

  std::ostream& os = *ctx.out;
  if (args.json) {
    nlohmann::ordered_json j;
    j["problem"] = args.problem;
    j["s"] = args.s;
    j["rings"] = args.rings;
    j["grading"] = args.grading;
    j["N_dof"] = r.n_dof;
    j["h"] = r.h;
    j["energy_error"] = r.error.value;
    j["radicand"] = r.error.radicand;
    j["discrete_energy"] = r.discrete_energy;
    j["solver"] = std::string(to_string(r.solve.method));
    j["residual"] = r.solve.residual;
    j["wall_seconds"] = ctx.deterministic ? 0.0 : r.seconds;
    os << j.dump(2) << '\n';
    return;
  }
  os << "N_dof " << r.n_dof << '\n'
     << std::setprecision(10) << "h " << r.h << '\n'
     << "energy_error " << r.error.value << '\n'
     << "discrete_energy " << r.discrete_energy << '\n'
     << "solver " << to_string(r.solve.method) << '\n'
     << std::setprecision(3) << "residual " << r.solve.residual << '\n'
     << "wall_seconds " << r.seconds << '\n';
}

void run_convergence(const ConvergenceArgs& args, Context& ctx) {
  ExperimentConfig config = load_experiment_config(args.config);
  if (!args.s_values.empty()) config.s_values = args.s_values;
  if (!args.levels.empty()) config.levels = args.levels;
  if (args.mu) config.mu = *args.mu;
  if (!args.csv.empty()) config.csv_path = args.csv;
  if (!args.json.empty()) config.json_path = args.json;
  if (!args.plot_dir.empty()) config.plot_dir = args.plot_dir;
  if (args.parallel_cells) config.parallel_cells = true;
  if (ctx.threads_given) config.threads = ctx.threads;
  if (ctx.deterministic_given) config.deterministic = ctx.deterministic;
  validate(config);

  ctx.config = {{"config", args.config.string()},
                {"problem", std::string(to_string(config.problem))},
                {"s", config.s_values},
                {"mu", config.mu},
                {"levels", config.levels},
                {"threads", config.threads},
                {"deterministic", config.deterministic},
                {"parallel_cells", config.parallel_cells},
                {"csv", config.csv_path.string()},
                {"json", config.json_path.string()},
                {"plot_dir", config.plot_dir.string()}};

  ProgressSink progress;
  if (!args.quiet) progress = [](const std::string& line) { std::cerr << line << std::endl; };
  const std::vector<ConvergenceRecord> records = run_experiment(config, progress);
  const std::vector<std::filesystem::path> written = write_outputs(config, records);
  ctx.outputs.insert(ctx.outputs.end(), written.begin(), written.end());

  std::ostream& os = *ctx.out;
  bool any_failed = false;
  for (const ConvergenceRecord& r : records) {
    os << to_string(r.problem) << " s=" << r.s << " mu=" << r.mu;
    if (r.fit_h) {
      os << std::fixed << std::setprecision(4) << " rate_h=" << r.fit_h->rate << " rate_N=" << r.fit_n->rate
         << std::defaultfloat;
      if (r.fit_h->flagged) os << " (fit residual " << std::setprecision(3) << r.fit_h->residual << ")";
    } else {
      os << " rate_h=n/a";
    }
    os << '\n';
    for (const LevelRecord& l : r.levels) {
      if (l.ok()) continue;
      any_failed = true;
      os << "  M=" << l.rings << " failed: " << l.diagnostic << '\n';
    }
  }
  if (any_failed) fail(ErrorCategory::numerical, "one or more cells failed; see the report above");
}

void run_quad_check(const QuadCheckArgs& args, Context& ctx) {
  const PairClass cls = parse_pair_class(args.pair_class);
  require_s(args.s);
  require(args.dimension == 1 || args.dimension == 2, ErrorCategory::invalid_argument, "dimension must be 1 or 2");
  require(args.order >= 1 && args.order + 4 <= max_gauss_order, ErrorCategory::invalid_argument,
          "order must lie in [1, 26]");
  require(!(args.dimension == 1 && cls == PairClass::shared_edge), ErrorCategory::mismatch,
          "shared-edge pairs do not exist in 1D");
  ctx.config = {{"class", args.pair_class}, {"s", args.s}, {"order", args.order}, {"dimension", args.dimension}};

  const Mesh mesh = reference_pair_mesh(args.dimension, cls);
  const Index t2 = mesh.element_count() - 1;
  const LocalPairMatrix m = pair_kernel_entries(mesh, 0, t2, cls, args.s, args.order);
  const LocalPairMatrix ref = pair_kernel_entries(mesh, 0, t2, cls, args.s, args.order + 4);

  double scale = 0.0;
  for (int a = 0; a < m.size; ++a) {
    for (int b = 0; b < m.size; ++b) scale = std::max(scale, std::abs(ref(a, b)));
  }
  std::ostream& os = *ctx.out;
  os << "class " << args.pair_class << " s " << args.s << " order " << args.order << " reference_order "
     << args.order + 4 << '\n';
  os << "a b value delta\n";
  double max_delta = 0.0, max_row = 0.0, max_asym = 0.0;
  for (int a = 0; a < m.size; ++a) {
    double row = 0.0;
    for (int b = 0; b < m.size; ++b) {
      const double delta = std::abs(m(a, b) - ref(a, b)) / scale;
      max_delta = std::max(max_delta, delta);
      max_asym = std::max(max_asym, std::abs(m(a, b) - m(b, a)) / scale);
      row += m(a, b);
      os << m.vertices[static_cast<std::size_t>(a)] << ' ' << m.vertices[static_cast<std::size_t>(b)] << ' '
         << std::setprecision(16) << m(a, b) << ' ' << std::setprecision(3) << delta << '\n';
    }
    max_row = std::max(max_row, std::abs(row) / scale);
  }
  // constants lie in the kernel of the form, so rows sum to zero
  os << "max_order_delta " << std::setprecision(3) << max_delta << '\n'
     << "max_row_sum " << max_row << '\n'
     << "max_asymmetry " << max_asym << '\n';
}

void run_exact(const ExactArgs& args, Context& ctx) {
  require(args.n == 1 || args.n == 2, ErrorCategory::invalid_argument, "n must be 1 or 2");
  require_s(args.s);
  require(args.radius > 0.0, ErrorCategory::invalid_argument, "radius must be positive");
  const std::vector<double> xs = parse_point(args.at);
  require(static_cast<int>(xs.size()) == args.n || (args.n == 1 && xs.size() == 2 && xs[1] == 0.0),
          ErrorCategory::mismatch, "--at needs " + std::to_string(args.n) + " coordinate(s)");
  ctx.config = {{"n", args.n}, {"s", args.s}, {"at", args.at}, {"radius", args.radius}, {"energy", args.energy}};

  const BallSolution sol{args.n, args.s, {}, args.radius};
  const Vec2 x{xs[0], xs.size() > 1 ? xs[1] : 0.0};
  std::ostream& os = *ctx.out;
  os << std::fixed << std::setprecision(6) << ball_eval(sol, x) << '\n';
  if (args.energy) os << "energy " << std::setprecision(12) << exact_energy_squared(sol) << '\n';
}

}  // namespace fraclap::cli
