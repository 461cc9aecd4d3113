#include <random>

#include <gtest/gtest.h>

#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"
#include "fraclap/linalg.hpp"

using namespace fraclap;

namespace {

Matrix random_spd(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  }
  return a * a.transpose() + n * Matrix::Identity(n, n);
}

}  // namespace

TEST(Linalg, CholeskyAndCgAgree) {
  const Matrix k = random_spd(60, 1);
  const Vector f = Vector::LinSpaced(60, -1.0, 2.0);
  SolveOptions chol;
  chol.force_cholesky = true;
  SolveOptions cg;
  cg.force_cg = true;
  const SolveReport a = solve_spd(k, f, chol);
  const SolveReport b = solve_spd(k, f, cg);
  EXPECT_EQ(a.method, SolveMethod::cholesky);
  EXPECT_EQ(b.method, SolveMethod::cg);
  EXPECT_GT(b.iterations, 0);
  EXPECT_LE((a.solution - b.solution).norm(), 1e-10 * a.solution.norm());
  EXPECT_LE(a.residual, 1e-14);
  EXPECT_GT(a.min_pivot, 0.0);
}

TEST(Linalg, ThresholdSelectsMethod) {
  const Matrix k = random_spd(20, 2);
  const Vector f = Vector::Ones(20);
  SolveOptions o;
  o.cg_threshold = 10;
  EXPECT_EQ(solve_spd(k, f, o).method, SolveMethod::cg);
  o.cg_threshold = 100;
  EXPECT_EQ(solve_spd(k, f, o).method, SolveMethod::cholesky);
}

TEST(Linalg, IndefiniteMatrixIsNumericalError) {
  Matrix k = Matrix::Identity(3, 3);
  k(1, 1) = -1.0;
  try {
    solve_spd(k, Vector::Ones(3));
    ADD_FAILURE() << "indefinite matrix accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::numerical);
  }
}

TEST(Linalg, SizeMismatch) {
  try {
    solve_spd(Matrix::Identity(3, 3), Vector::Ones(4));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::mismatch);
  }
  SolveOptions both;
  both.force_cg = both.force_cholesky = true;
  EXPECT_THROW(solve_spd(Matrix::Identity(2, 2), Vector::Ones(2), both), Error);
}

TEST(Linalg, SymmetryDefect) {
  Matrix k = Matrix::Identity(3, 3);
  EXPECT_EQ(symmetry_defect(k), 0.0);
  k(0, 2) = 0.5;
  EXPECT_DOUBLE_EQ(symmetry_defect(k), 0.5);
}
