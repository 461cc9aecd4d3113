#include "fraclap/linalg.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include "fraclap/error.hpp"

namespace fraclap {

std::string_view to_string(SolveMethod method) noexcept {
  return method == SolveMethod::cholesky ? "cholesky" : "cg";
}

SolveReport solve_spd(const Matrix& k, const Vector& f, const SolveOptions& options) {
  require(k.rows() == k.cols(), ErrorCategory::mismatch, "matrix is not square");
  require(k.rows() == f.size(), ErrorCategory::mismatch, "load vector size does not match the matrix");
  require(!(options.force_cg && options.force_cholesky), ErrorCategory::invalid_argument,
          "cannot force both Cholesky and CG");
  SolveReport report;
  const Index n = static_cast<Index>(k.rows());
  if (n == 0) {
    report.solution = Vector(0);
    return report;
  }
  const bool use_cg = options.force_cg || (!options.force_cholesky && n > options.cg_threshold);
  if (!use_cg) {
    Eigen::LLT<Matrix> llt(k);
    require(llt.info() == Eigen::Success, ErrorCategory::numerical,
            "Cholesky factorization hit a non-positive pivot; the matrix is not positive definite");
    report.min_pivot = llt.matrixLLT().diagonal().minCoeff();
    require(report.min_pivot > 0.0, ErrorCategory::numerical, "Cholesky factorization hit a non-positive pivot");
    report.solution = llt.solve(f);
    report.method = SolveMethod::cholesky;
  } else {
    require((k.diagonal().array() > 0.0).all(), ErrorCategory::numerical,
            "matrix has a non-positive diagonal entry");
    Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(options.cg_tolerance);
    cg.setMaxIterations(options.max_iterations > 0 ? options.max_iterations : 10 * n);
    cg.compute(k);
    report.solution = cg.solve(f);
    report.iterations = static_cast<int>(cg.iterations());
    report.method = SolveMethod::cg;
    require(cg.info() == Eigen::Success, ErrorCategory::numerical, "CG did not converge");
  }
  const double fnorm = f.norm();
  report.residual = (k * report.solution - f).norm() / (fnorm > 0.0 ? fnorm : 1.0);
  require(std::isfinite(report.residual), ErrorCategory::numerical, "solution has non-finite entries");
  return report;
}

double symmetry_defect(const Matrix& k) {
  const double scale = k.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (k - k.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace fraclap
