#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fraclap::cli {

/// Shared state of one invocation. Commands append every file they write to
/// `outputs` and echo their effective arguments into `config`.
struct Context {
  int threads = 1;
  bool deterministic = true;
  bool threads_given = false;        // --threads or FRACLAP_THREADS; overrides config files
  bool deterministic_given = false;  // --deterministic / --no-deterministic
  std::ostream* out = nullptr;
  std::vector<std::filesystem::path> outputs;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

struct MeshArgs {
  std::string shape = "disk";  // disk | interval
  int rings = 4;
  double grading = 1.0;
  double a = -1.0, b = 1.0;  // interval only
  std::filesystem::path out;
};

struct AssembleArgs {
  std::filesystem::path mesh;
  double s = 0.5;
  std::string rhs = "one";  // one | sine
  bool exact_circle = false;
  std::string out;  // prefix
};

struct SolveArgs {
  std::string problem = "disk-constant";
  double s = 0.5;
  int rings = 8;
  double grading = 1.0;
  bool exact_circle = false;
  std::filesystem::path solution_out;
  bool json = false;
};

struct ConvergenceArgs {
  std::filesystem::path config;
  std::vector<double> s_values;
  std::vector<int> levels;
  std::optional<double> mu;
  std::filesystem::path csv, json, plot_dir;
  bool parallel_cells = false;
  bool quiet = false;
};

struct QuadCheckArgs {
  std::string pair_class = "identical";
  double s = 0.5;
  int order = 7;
  int dimension = 2;
};

struct ExactArgs {
  int n = 2;
  double s = 0.5;
  std::string at = "0,0";
  double radius = 1.0;
  bool energy = false;
};

void run_mesh(const MeshArgs& args, Context& ctx);
void run_assemble(const AssembleArgs& args, Context& ctx);
void run_solve(const SolveArgs& args, Context& ctx);
void run_convergence(const ConvergenceArgs& args, Context& ctx);
void run_quad_check(const QuadCheckArgs& args, Context& ctx);
void run_exact(const ExactArgs& args, Context& ctx);

}  // namespace fraclap::cli
