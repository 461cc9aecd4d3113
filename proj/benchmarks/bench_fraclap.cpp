#include <cmath>

#include <benchmark/benchmark.h>

#include "fraclap/assembly.hpp"
#include "fraclap/linalg.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/quadrature.hpp"

using namespace fraclap;

namespace {

const Mesh& graded_mesh() {
  static const Mesh m = build_graded_disk_mesh({8, 1.95});
  return m;
}

std::pair<Index, Index> first_pair(const Mesh& m, PairClass cls) {
  for (Index e = 0; e < m.element_count(); ++e) {
    for (Index f = e; f < m.element_count(); ++f) {
      if (classify_pair(m, e, f) == cls) return {e, f};
    }
  }
  return {0, 0};
}

void BM_PairKernel(benchmark::State& state) {
  const Mesh& m = graded_mesh();
  const auto cls = static_cast<PairClass>(state.range(0));
  const auto [e, f] = first_pair(m, cls);
  for (auto _ : state) benchmark::DoNotOptimize(pair_kernel_entries(m, e, f, cls, 0.7, 7));
  state.SetLabel(to_string(cls));
}
BENCHMARK(BM_PairKernel)->DenseRange(0, 3);

void BM_Complement(benchmark::State& state) {
  const Mesh m = build_graded_disk_mesh({static_cast<int>(state.range(0)), 1.95});
  const ComplementEvaluator kappa(m, 0.7, 12, ComplementGeometry::polygon, static_cast<double>(state.range(1)));
  double t = 0.0;
  for (auto _ : state) {
    t += 0.37;
    const double r = 0.999 * (0.5 + 0.5 * std::sin(3.1 * t));
    benchmark::DoNotOptimize(kappa({r * std::cos(t), r * std::sin(t)}));
  }
}
BENCHMARK(BM_Complement)->Args({8, 0})->Args({8, 4})->Args({24, 0})->Args({24, 4});

void BM_AssembleDisk(benchmark::State& state) {
  const Mesh m = build_graded_disk_mesh({static_cast<int>(state.range(0)), state.range(1) ? 1.95 : 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m, 0.5, AssemblyOptions::defaults(2)));
  state.counters["elements"] = m.element_count();
}
BENCHMARK(BM_AssembleDisk)->Args({4, 0})->Args({8, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

void BM_AssembleInterval(benchmark::State& state) {
  const Mesh m = build_interval_mesh(-1.0, 1.0, {static_cast<int>(state.range(0)), 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(m, 0.6, AssemblyOptions::defaults(1)));
}
BENCHMARK(BM_AssembleInterval)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const Mesh m = build_graded_disk_mesh({8, 1.95});
  const StiffnessMatrix k = assemble_stiffness(m, 0.5, AssemblyOptions::defaults(2));
  const LoadVector f = assemble_load(m, ConstantOne{});
  SolveOptions o;
  o.force_cg = state.range(0) == 1;
  o.force_cholesky = !o.force_cg;
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(k, f, o));
  state.SetLabel(o.force_cg ? "cg" : "cholesky");
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
