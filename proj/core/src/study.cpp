#include "fraclap/study.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fraclap/analytic.hpp"
#include "fraclap/error.hpp"

namespace fraclap {

std::string_view to_string(Problem problem) noexcept {
  return problem == Problem::disk_constant ? "disk-constant" : "interval-sine";
}

Problem parse_problem(std::string_view text) {
  if (text == "disk-constant") return Problem::disk_constant;
  if (text == "interval-sine") return Problem::interval_sine;
  fail(ErrorCategory::invalid_argument,
       "unknown problem '" + std::string(text) + "' (expected disk-constant or interval-sine)");
}

int problem_dimension(Problem problem) noexcept { return problem == Problem::disk_constant ? 2 : 1; }

Mesh problem_mesh(Problem problem, GradingSpec spec) {
  if (problem == Problem::disk_constant) return build_graded_disk_mesh(spec);
  return build_interval_mesh(-1.0, 1.0, spec);
}

double exact_energy(Problem problem, double s) {
  if (problem == Problem::disk_constant) return exact_energy_squared(BallSolution{2, s, {}, 1.0});
  return interval_sine_energy_squared(s);
}

EnergyError energy_error(double exact, const Vector& load, const Vector& solution) {
  require(load.size() == solution.size(), ErrorCategory::mismatch, "load and solution sizes differ");
  EnergyError e;
  e.radicand = exact - load.dot(solution);
  require(e.radicand >= radicand_floor, ErrorCategory::numerical,
          "energy error radicand is negative (" + std::to_string(e.radicand) +
              "); matrix, load and exact energy are inconsistent");
  if (e.radicand < 0.0) e.clamped = true;
  e.value = std::sqrt(std::max(e.radicand, 0.0));
  return e;
}

namespace {

RightHandSide problem_rhs(Problem problem, double s) {
  if (problem == Problem::disk_constant) return ConstantOne{};
  return TruncatedSineFlap{s};
}

}  // namespace

EnergyError energy_error(Problem problem, double s, const Mesh& mesh, const Vector& solution) {
  require(mesh.dimension() == problem_dimension(problem), ErrorCategory::mismatch,
          "mesh dimension does not match the problem");
  const LoadVector f = assemble_load(mesh, problem_rhs(problem, s));
  return energy_error(exact_energy(problem, s), f.values, solution);
}

SolveOutcome solve_problem(Problem problem, double s, GradingSpec spec, const AssemblyOptions& options,
                           std::optional<double> exact) {
  const auto start = std::chrono::steady_clock::now();
  const Mesh mesh = problem_mesh(problem, spec);
  const StiffnessMatrix k = assemble_stiffness(mesh, s, options);
  const LoadVector f = assemble_load(mesh, problem_rhs(problem, s));
  SolveOutcome out;
  out.solve = solve_spd(k, f);
  out.n_dof = k.size();
  out.h = mesh.mesh_parameter();
  out.discrete_energy = f.values.dot(out.solve.solution);
  out.error = energy_error(exact ? *exact : exact_energy(problem, s), f.values, out.solve.solution);
  out.stats = k.stats;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RateFit fit_rate(std::span<const double> hs, std::span<const double> errors) {
  require(hs.size() == errors.size(), ErrorCategory::invalid_argument, "rate fit needs matching h and error lists");
  require(hs.size() >= 3, ErrorCategory::invalid_argument, "rate fit needs at least 3 levels");
  const std::size_t m = hs.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    require(hs[i] > 0.0 && errors[i] > 0.0, ErrorCategory::invalid_argument, "rate fit needs positive h and errors");
    sx += std::log(hs[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(hs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  require(sxx > 0.0, ErrorCategory::invalid_argument, "rate fit needs distinct h values");
  RateFit fit;
  fit.rate = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = std::log(errors[i]) - (my + fit.rate * (std::log(hs[i]) - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  fit.flagged = fit.residual > max_fit_residual;
  return fit;
}

// --- configuration -------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { fail(ErrorCategory::config, message); }

void check_keys(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!object.is_object()) config_error(where + " must be an object");
  for (const auto& item : object.items()) {
    bool known = false;
    for (auto k : allowed) known = known || item.key() == k;
    if (!known) config_error("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
T get(const json& object, const char* key, const std::string& where) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("bad or missing value for '" + std::string(key) + "' in " + where);
  }
}

void apply_quadrature(const json& q, QuadratureConfig& c) {
  check_keys(q,
             {"touching_order", "near_order", "far_order", "far_distance_factor", "complement_order",
              "complement_levels", "angular_order", "cluster_separation", "geometry"},
             "quadrature");
  const std::string where = "quadrature";
  if (q.contains("touching_order")) c.touching_order = get<int>(q, "touching_order", where);
  if (q.contains("near_order")) c.near_order = get<int>(q, "near_order", where);
  if (q.contains("far_order")) c.far_order = get<int>(q, "far_order", where);
  if (q.contains("far_distance_factor")) c.far_distance_factor = get<double>(q, "far_distance_factor", where);
  if (q.contains("complement_order")) c.complement_order = get<int>(q, "complement_order", where);
  if (q.contains("complement_levels")) c.complement_levels = get<int>(q, "complement_levels", where);
  if (q.contains("angular_order")) c.angular_order = get<int>(q, "angular_order", where);
  if (q.contains("cluster_separation")) c.cluster_separation = get<double>(q, "cluster_separation", where);
  if (q.contains("geometry")) {
    const auto g = get<std::string>(q, "geometry", where);
    if (g == "polygon") c.geometry = ComplementGeometry::polygon;
    else if (g == "exact-circle") c.geometry = ComplementGeometry::exact_circle;
    else config_error("quadrature geometry must be 'polygon' or 'exact-circle'");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  check_keys(doc, {"schema_version", "problem", "s", "mesh", "quadrature", "threads", "deterministic",
                   "parallel_cells", "output"},
             "config");
  const std::string where = "config";
  const int version = get<int>(doc, "schema_version", where);
  if (version != config_schema_version) {
    config_error("unsupported schema_version " + std::to_string(version));
  }
  ExperimentConfig c;
  try {
    c.problem = parse_problem(get<std::string>(doc, "problem", where));
  } catch (const Error& e) {
    config_error(e.what());
  }
  c.quadrature = QuadratureConfig::defaults(problem_dimension(c.problem));

  const json& s = doc.contains("s") ? doc.at("s") : json();
  if (s.is_number()) c.s_values = {s.get<double>()};
  else if (s.is_array() && std::all_of(s.begin(), s.end(), [](const json& v) { return v.is_number(); }))
    c.s_values = s.get<std::vector<double>>();
  else config_error("'s' must be a number or an array of numbers");

  if (!doc.contains("mesh")) config_error("missing 'mesh' section");
  const json& mesh = doc.at("mesh");
  check_keys(mesh, {"family", "mu", "levels"}, "mesh");
  const std::string family = mesh.contains("family") ? get<std::string>(mesh, "family", "mesh") : "uniform";
  if (family == "uniform") {
    c.mu = mesh.contains("mu") ? get<double>(mesh, "mu", "mesh") : 1.0;
    if (c.mu != 1.0) config_error("uniform mesh family requires mu = 1");
  } else if (family == "graded") {
    c.mu = mesh.contains("mu") ? get<double>(mesh, "mu", "mesh") : 1.95;
  } else {
    config_error("mesh family must be 'uniform' or 'graded'");
  }
  c.levels = get<std::vector<int>>(mesh, "levels", "mesh");

  if (doc.contains("quadrature")) apply_quadrature(doc.at("quadrature"), c.quadrature);
  if (doc.contains("threads")) c.threads = get<int>(doc, "threads", where);
  if (doc.contains("deterministic")) c.deterministic = get<bool>(doc, "deterministic", where);
  if (doc.contains("parallel_cells")) c.parallel_cells = get<bool>(doc, "parallel_cells", where);
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    check_keys(out, {"csv", "json", "plot_dir"}, "output");
    if (out.contains("csv")) c.csv_path = get<std::string>(out, "csv", "output");
    if (out.contains("json")) c.json_path = get<std::string>(out, "json", "output");
    if (out.contains("plot_dir")) c.plot_dir = get<std::string>(out, "plot_dir", "output");
  }
  validate(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCategory::io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

void validate(const ExperimentConfig& c) {
  if (c.s_values.empty()) config_error("'s' list is empty");
  for (double s : c.s_values) {
    if (!(s > 0.0 && s < 1.0)) config_error("every s must lie in (0, 1)");
  }
  if (c.levels.empty()) config_error("mesh levels list is empty");
  for (int m : c.levels) {
    if (m < 1 || m > 4096) config_error("mesh levels must lie in [1, 4096]");
  }
  if (!(c.mu >= 1.0 && c.mu <= 4.0)) config_error("grading parameter mu must lie in [1, 4]");
  if (c.threads < 1) config_error("threads must be >= 1");
  try {
    validate(c.quadrature);
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (c.quadrature.geometry == ComplementGeometry::exact_circle && c.problem != Problem::disk_constant) {
    config_error("exact-circle complement geometry applies to the disk problem only");
  }
}

// --- experiment ------------------------------------------------------------------

void finalize_record(ConvergenceRecord& record) {
  std::vector<double> hs, ns, es;
  const LevelRecord* previous = nullptr;
  const double dim = problem_dimension(record.problem);
  for (LevelRecord& level : record.levels) {
    level.rate_running.reset();
    if (!level.ok() || level.energy_error <= 0.0) {
      previous = nullptr;
      continue;
    }
    if (previous != nullptr && previous->h != level.h) {
      level.rate_running = std::log(previous->energy_error / level.energy_error) / std::log(previous->h / level.h);
    }
    previous = &level;
    hs.push_back(level.h);
    ns.push_back(std::pow(static_cast<double>(level.n_dof), -1.0 / dim));
    es.push_back(level.energy_error);
  }
  record.fit_h.reset();
  record.fit_n.reset();
  if (hs.size() >= 3) {
    record.fit_h = fit_rate(hs, es);
    record.fit_n = fit_rate(ns, es);
  }
}

std::vector<ConvergenceRecord> run_experiment(const ExperimentConfig& config, const ProgressSink& progress) {
  validate(config);
  std::vector<ConvergenceRecord> records;
  for (double s : config.s_values) {
    ConvergenceRecord r;
    r.problem = config.problem;
    r.s = s;
    r.mu = config.mu;
    r.levels.resize(config.levels.size());
    records.push_back(std::move(r));
  }

  struct Cell {
    std::size_t record;
    std::size_t level;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t l = 0; l < config.levels.size(); ++l) cells.push_back({i, l});
  }
  std::vector<std::optional<double>> exact(records.size());
  std::mutex lock;

  auto run_cell = [&](const Cell& cell, int threads) {
    ConvergenceRecord& rec = records[cell.record];
    LevelRecord& level = rec.levels[cell.level];
    level.rings = config.levels[cell.level];
    AssemblyOptions options;
    options.quadrature = config.quadrature;
    options.threads = threads;
    options.deterministic = config.deterministic;
    try {
      std::optional<double> e;
      {
        std::scoped_lock guard(lock);
        if (!exact[cell.record]) exact[cell.record] = exact_energy(config.problem, rec.s);
        e = exact[cell.record];
      }
      const SolveOutcome out = solve_problem(config.problem, rec.s, {level.rings, config.mu}, options, e);
      level.h = out.h;
      level.n_dof = out.n_dof;
      level.energy_error = out.error.value;
      level.radicand = out.error.radicand;
      level.wall_seconds = out.seconds;
      if (out.error.clamped) level.diagnostic = "energy radicand clamped to zero";
    } catch (const std::exception& ex) {
      level.diagnostic = ex.what();
    }
    if (progress) {
      std::ostringstream msg;
      msg << to_string(config.problem) << " s=" << rec.s << " M=" << level.rings;
      if (level.ok()) {
        msg << " N=" << level.n_dof << " error=" << std::setprecision(6) << level.energy_error << " ("
            << std::setprecision(3) << level.wall_seconds << " s)";
      } else {
        msg << " failed: " << level.diagnostic;
      }
      std::scoped_lock guard(lock);
      progress(msg.str());
    }
  };

  if (config.parallel_cells && config.threads > 1) {
    std::size_t next = 0;
    std::vector<std::jthread> pool;
    for (int w = 0; w < config.threads; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t mine;
          {
            std::scoped_lock guard(lock);
            if (next >= cells.size()) return;
            mine = next++;
          }
          run_cell(cells[mine], 1);
        }
      });
    }
  } else {
    for (const Cell& cell : cells) run_cell(cell, config.threads);
  }
  for (auto& r : records) finalize_record(r);
  return records;
}

// --- output ------------------------------------------------------------------------

namespace {

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

void write_csv(std::ostream& os, std::span<const ConvergenceRecord> records, bool deterministic) {
  os << "problem,s,mu,M,h,N_dof,energy_error,rate_running,wall_seconds\n";
  for (const auto& r : records) {
    for (const auto& l : r.levels) {
      if (!l.ok()) continue;
      os << to_string(r.problem) << ',' << number(r.s) << ',' << number(r.mu) << ',' << l.rings << ','
         << number(l.h) << ',' << l.n_dof << ',' << number(l.energy_error) << ','
         << (l.rate_running ? number(*l.rate_running) : "") << ','
         << (deterministic ? "0" : number(l.wall_seconds)) << '\n';
    }
  }
}

void write_json(std::ostream& os, std::span<const ConvergenceRecord> records, bool deterministic) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = config_schema_version;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json rec;
    rec["problem"] = to_string(r.problem);
    rec["s"] = r.s;
    rec["mu"] = r.mu;
    rec["levels"] = nlohmann::ordered_json::array();
    for (const auto& l : r.levels) {
      nlohmann::ordered_json lv;
      lv["M"] = l.rings;
      if (l.ok()) {
        lv["h"] = l.h;
        lv["N_dof"] = l.n_dof;
        lv["energy_error"] = l.energy_error;
        lv["radicand"] = l.radicand;
        lv["rate_running"] = l.rate_running ? nlohmann::ordered_json(*l.rate_running) : nlohmann::ordered_json(nullptr);
        lv["wall_seconds"] = deterministic ? 0.0 : l.wall_seconds;
      } else {
        lv["diagnostic"] = l.diagnostic;
      }
      rec["levels"].push_back(lv);
    }
    if (r.fit_h) {
      rec["fitted_rate"] = {{"h", r.fit_h->rate},
                            {"h_residual", r.fit_h->residual},
                            {"N", r.fit_n->rate},
                            {"N_residual", r.fit_n->residual},
                            {"flagged", r.fit_h->flagged}};
    } else {
      rec["fitted_rate"] = nullptr;
    }
    doc["records"].push_back(rec);
  }
  os << doc.dump(2) << '\n';
}

void write_plot_data(std::ostream& os, const ConvergenceRecord& record) {
  os << "# " << to_string(record.problem) << " s=" << number(record.s) << " mu=" << number(record.mu) << '\n';
  os << "# log10_h log10_error\n" << std::setprecision(12);
  for (const auto& l : record.levels) {
    if (l.ok() && l.energy_error > 0.0) os << std::log10(l.h) << ' ' << std::log10(l.energy_error) << '\n';
  }
}

std::string plot_file_name(const ConvergenceRecord& record) {
  std::ostringstream os;
  os << to_string(record.problem) << "_s" << number(record.s) << "_mu" << number(record.mu) << ".dat";
  return os.str();
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 std::span<const ConvergenceRecord> records) {
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    require(out.good(), ErrorCategory::io, "cannot write " + p.string());
    written.push_back(p);
    return out;
  };
  if (!config.csv_path.empty()) {
    auto out = open(config.csv_path);
    write_csv(out, records, config.deterministic);
  }
  if (!config.json_path.empty()) {
    auto out = open(config.json_path);
    write_json(out, records, config.deterministic);
  }
  if (!config.plot_dir.empty()) {
    for (const auto& r : records) {
      auto out = open(config.plot_dir / plot_file_name(r));
      write_plot_data(out, r);
    }
  }
  return written;
}

}  // namespace fraclap
