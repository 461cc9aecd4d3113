#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fraclap/assembly.hpp"
#include "fraclap/linalg.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

enum class Problem {
  disk_constant,  // (-Delta)^s u = 1 on the unit disk
  interval_sine,  // exact solution sin(pi x) on (-1, 1)
};

std::string_view to_string(Problem problem) noexcept;
Problem parse_problem(std::string_view text);
int problem_dimension(Problem problem) noexcept;

/// Mesh of the problem domain: graded disk or interval (-1, 1).
Mesh problem_mesh(Problem problem, GradingSpec spec);

/// Squared energy norm of the exact solution, i.e. int f u.
double exact_energy(Problem problem, double s);

struct EnergyError {
  double value = 0.0;     // sqrt(max(radicand, 0))
  double radicand = 0.0;  // exact energy - F^T U
  bool clamped = false;   // radicand was slightly negative and set to zero
};

inline constexpr double radicand_floor = -1e-10;

/// ||u - u_h||_V from int f (u - u_h) = exact_energy - F^T U. A radicand below
/// radicand_floor means K, F and the exact energy are inconsistent.
EnergyError energy_error(double exact, const Vector& load, const Vector& solution);
EnergyError energy_error(Problem problem, double s, const Mesh& mesh, const Vector& solution);

struct SolveOutcome {
  Index n_dof = 0;
  double h = 0.0;
  double discrete_energy = 0.0;  // F^T U = a(u_h, u_h)
  EnergyError error;
  AssemblyStats stats;
  SolveReport solve;
  double seconds = 0.0;
};

/// Builds the mesh, assembles, solves and measures the energy error.
/// `exact` may be passed in to avoid recomputing it per level.
SolveOutcome solve_problem(Problem problem, double s, GradingSpec spec, const AssemblyOptions& options,
                           std::optional<double> exact = std::nullopt);

struct RateFit {
  double rate = 0.0;
  double residual = 0.0;  // RMS deviation in log space
  bool flagged = false;   // residual above max_fit_residual
};

inline constexpr double max_fit_residual = 0.05;

/// Least-squares slope of log e against log h (at least 3 positive pairs).
RateFit fit_rate(std::span<const double> hs, std::span<const double> errors);

struct ExperimentConfig {
  Problem problem = Problem::disk_constant;
  std::vector<double> s_values;
  double mu = 1.0;
  std::vector<int> levels;
  QuadratureConfig quadrature = QuadratureConfig::defaults(2);
  int threads = 1;
  bool deterministic = true;
  bool parallel_cells = false;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  std::filesystem::path plot_dir;
};

inline constexpr int config_schema_version = 1;

/// Parses the JSON experiment description; every problem is a config error.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

struct LevelRecord {
  int rings = 0;
  double h = 0.0;
  Index n_dof = 0;
  double energy_error = 0.0;
  double radicand = 0.0;
  std::optional<double> rate_running;
  double wall_seconds = 0.0;
  std::string diagnostic;  // non-empty when the cell failed

  bool ok() const noexcept { return diagnostic.empty(); }
};

struct ConvergenceRecord {
  Problem problem = Problem::disk_constant;
  double s = 0.0;
  double mu = 1.0;
  std::vector<LevelRecord> levels;
  std::optional<RateFit> fit_h;  // against the mesh parameter
  std::optional<RateFit> fit_n;  // against N^(-1/n)
};

using ProgressSink = std::function<void(const std::string&)>;

/// Runs every (s, level) cell; a failed cell records its diagnostic and the run goes on.
std::vector<ConvergenceRecord> run_experiment(const ExperimentConfig& config, const ProgressSink& progress = {});

/// Fills rate_running and the fits from the level data.
void finalize_record(ConvergenceRecord& record);

/// `problem,s,mu,M,h,N_dof,energy_error,rate_running,wall_seconds`; wall time is
/// written as 0 in deterministic mode so reruns are byte-identical.
void write_csv(std::ostream& os, std::span<const ConvergenceRecord> records, bool deterministic);
void write_json(std::ostream& os, std::span<const ConvergenceRecord> records, bool deterministic);
/// Two columns: log10 h, log10 e.
void write_plot_data(std::ostream& os, const ConvergenceRecord& record);
std::string plot_file_name(const ConvergenceRecord& record);

/// Writes the configured outputs and returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 std::span<const ConvergenceRecord> records);

}  // namespace fraclap
