#pragma once

#include <string_view>

#include "fraclap/assembly.hpp"

namespace fraclap {

enum class SolveMethod { cholesky, cg };

std::string_view to_string(SolveMethod method) noexcept;

struct SolveReport {
  Vector solution;
  SolveMethod method = SolveMethod::cholesky;
  int iterations = 0;        // CG only
  double residual = 0.0;     // ||K U - F|| / ||F||
  double min_pivot = 0.0;    // smallest Cholesky diagonal entry (Cholesky only)
};

struct SolveOptions {
  Index cg_threshold = 4000;  // N_dof above which CG is used
  double cg_tolerance = 1e-12;
  int max_iterations = 0;     // 0: 10 N
  bool force_cg = false;
  bool force_cholesky = false;
};

/// Solves K U = F for symmetric positive definite K. Cholesky by default,
/// Jacobi-preconditioned CG above the size threshold. A non-positive pivot
/// is reported as a numerical error, never regularized.
SolveReport solve_spd(const Matrix& k, const Vector& f, const SolveOptions& options = {});

inline SolveReport solve_spd(const StiffnessMatrix& k, const LoadVector& f, const SolveOptions& options = {}) {
  return solve_spd(k.values, f.values, options);
}

/// max |K_ij - K_ji| / max |K_ij|.
double symmetry_defect(const Matrix& k);

}  // namespace fraclap
