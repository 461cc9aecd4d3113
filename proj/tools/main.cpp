// fraclap: meshes, single solves, convergence studies and quadrature diagnostics
// for the integral fractional Laplacian.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "fraclap/error.hpp"
#include "manifest.hpp"

namespace {

// Exit codes, one per failure category.
enum Exit : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_usage = 2,
  exit_config = 3,
  exit_mismatch = 4,
  exit_invalid_argument = 5,
  exit_numerical = 6,
  exit_io = 7,
};

int exit_code(fraclap::ErrorCategory c) {
  using fraclap::ErrorCategory;
  switch (c) {
    case ErrorCategory::config: return exit_config;
    case ErrorCategory::mismatch: return exit_mismatch;
    case ErrorCategory::invalid_argument: return exit_invalid_argument;
    case ErrorCategory::numerical: return exit_numerical;
    case ErrorCategory::io: return exit_io;
  }
  return exit_internal;
}

constexpr const char* exit_help =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage (unknown flag, missing or malformed option)\n"
    "  3  config (malformed experiment configuration)\n"
    "  4  mismatch (dimension / problem / right-hand side incompatibility)\n"
    "  5  invalid argument (parameter out of range)\n"
    "  6  numerical (non-finite entries, failed factorization, failed cells)\n"
    "  7  io (unreadable or unwritable files)\n"
    "Errors print one line to stderr: error: <category>: <message>\n"
    "FRACLAP_THREADS supplies --threads when the flag is absent.";

}  // namespace

int main(int argc, char** argv) {
  using namespace fraclap::cli;

  CLI::App app{"Finite elements for the integral fractional Laplacian (-Delta)^s u = f"};
  app.footer(exit_help);
  app.require_subcommand(1);

  Context ctx;
  ctx.out = &std::cout;
  std::string manifest_path;
  app.add_option("--threads", ctx.threads, "worker threads for assembly and cells")
      ->envname("FRACLAP_THREADS")
      ->check(CLI::Range(1, 1024));
  auto* det = app.add_flag("--deterministic,!--no-deterministic", ctx.deterministic,
                           "bitwise reproducible reductions and zeroed wall times (default on)");
  app.add_option("--manifest", manifest_path, "write a JSON run manifest to this file");

  MeshArgs mesh;
  auto* c_mesh = app.add_subcommand("mesh", "generate a graded disk or interval mesh");
  c_mesh->add_option("--shape", mesh.shape, "disk or interval")->check(CLI::IsMember({"disk", "interval"}));
  c_mesh->add_option("--rings", mesh.rings, "number of rings M (interval: cells per half)")->required();
  c_mesh->add_option("--grading", mesh.grading, "grading exponent mu (1 = uniform)");
  c_mesh->add_option("--a", mesh.a, "interval left end");
  c_mesh->add_option("--b", mesh.b, "interval right end");
  c_mesh->add_option("--out", mesh.out, "mesh file")->required();

  AssembleArgs assemble;
  auto* c_assemble = app.add_subcommand("assemble", "assemble stiffness matrix and load vector");
  c_assemble->add_option("--mesh", assemble.mesh, "mesh file")->required();
  c_assemble->add_option("--s", assemble.s, "fractional order in (0, 1)")->required();
  c_assemble->add_option("--rhs", assemble.rhs, "one, or sine (1D truncated sine)");
  c_assemble->add_flag("--exact-circle", assemble.exact_circle, "complement term against the unit circle");
  c_assemble->add_option("--out", assemble.out, "output prefix; writes PREFIX.fracmat and PREFIX.fracvec")
      ->required();

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "solve one benchmark problem and report the energy error");
  c_solve->add_option("--problem", solve.problem, "disk-constant or interval-sine");
  c_solve->add_option("--s", solve.s, "fractional order in (0, 1)")->required();
  c_solve->add_option("--rings", solve.rings, "number of rings M");
  c_solve->add_option("--grading", solve.grading, "grading exponent mu (1 = uniform)");
  c_solve->add_flag("--exact-circle", solve.exact_circle, "complement term against the unit circle");
  c_solve->add_option("--solution", solve.solution_out, "write the dof vector (fracvec)");
  c_solve->add_flag("--json", solve.json, "print the summary as JSON");

  ConvergenceArgs conv;
  auto* c_conv = app.add_subcommand("convergence", "run a convergence study from a JSON config");
  c_conv->add_option("--config", conv.config, "experiment config")->required();
  c_conv->add_option("--s", conv.s_values, "override the s list")->delimiter(',');
  c_conv->add_option("--levels", conv.levels, "override the ring ladder")->delimiter(',');
  c_conv->add_option("--mu", conv.mu, "override the grading exponent");
  c_conv->add_option("--csv", conv.csv, "override the CSV path");
  c_conv->add_option("--json", conv.json, "override the JSON path");
  c_conv->add_option("--plot-dir", conv.plot_dir, "override the plot-data directory");
  c_conv->add_flag("--parallel-cells", conv.parallel_cells, "run (s, level) cells concurrently");
  c_conv->add_flag("--quiet", conv.quiet, "no per-cell progress on stderr");

  QuadCheckArgs qc;
  auto* c_qc = app.add_subcommand("quad-check", "reference-pair entries and self-consistency deltas");
  c_qc->add_option("--class", qc.pair_class, "identical, shared-edge, shared-vertex or disjoint");
  c_qc->add_option("--s", qc.s, "fractional order in (0, 1)");
  c_qc->add_option("--order", qc.order, "quadrature order (compared against order + 4)");
  c_qc->add_option("--dim", qc.dimension, "1 or 2");

  ExactArgs exact;
  auto* c_exact = app.add_subcommand("exact", "evaluate the closed-form solution for f = 1 on a ball");
  c_exact->add_option("--n", exact.n, "dimension, 1 or 2");
  c_exact->add_option("--s", exact.s, "fractional order in (0, 1)")->required();
  c_exact->add_option("--at", exact.at, "point X or X,Y");
  c_exact->add_option("--radius", exact.radius, "ball radius");
  c_exact->add_flag("--energy", exact.energy, "also print the squared energy norm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return exit_usage;
  }
  ctx.threads_given = app.get_option("--threads")->count() > 0 || std::getenv("FRACLAP_THREADS") != nullptr;
  ctx.deterministic_given = det->count() > 0;

  RunManifest manifest;
  manifest.started = utc_timestamp(std::chrono::system_clock::now());
  int status = exit_ok;
  try {
    if (c_mesh->parsed()) {
      manifest.command = "mesh";
      run_mesh(mesh, ctx);
    } else if (c_assemble->parsed()) {
      manifest.command = "assemble";
      run_assemble(assemble, ctx);
    } else if (c_solve->parsed()) {
      manifest.command = "solve";
      run_solve(solve, ctx);
    } else if (c_conv->parsed()) {
      manifest.command = "convergence";
      run_convergence(conv, ctx);
    } else if (c_qc->parsed()) {
      manifest.command = "quad-check";
      run_quad_check(qc, ctx);
    } else if (c_exact->parsed()) {
      manifest.command = "exact";
      run_exact(exact, ctx);
    }
  } catch (const fraclap::Error& e) {
    status = exit_code(e.category());
    manifest.error = std::string(fraclap::to_string(e.category())) + ": " + e.what();
  } catch (const std::exception& e) {
    status = exit_internal;
    manifest.error = std::string("internal: ") + e.what();
  }
  std::cout.flush();
  if (status != exit_ok) std::cerr << "error: " << manifest.error << '\n';

  if (!manifest_path.empty()) {
    manifest.finished = utc_timestamp(std::chrono::system_clock::now());
    manifest.exit_status = status;
    manifest.config = ctx.config;
    manifest.config["threads"] = ctx.threads;
    manifest.config["deterministic"] = ctx.deterministic;
    manifest.outputs = ctx.outputs;
    try {
      write_manifest(manifest_path, manifest);
    } catch (const fraclap::Error& e) {
      std::cerr << "error: io: " << e.what() << '\n';
      if (status == exit_ok) status = exit_io;
    }
  }
  return status;
}
