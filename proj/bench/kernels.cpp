// Serial reference vs OpenMP kernels on the same data. Run with
// OMP_NUM_THREADS set to the thread count of interest.
#include <map>

#include <benchmark/benchmark.h>

#include "cflow/assembly.hpp"
#include "cflow/linalg.hpp"
#include "cflow/mesh.hpp"

using namespace cflow;

namespace {

MeshPtr bench_mesh(int64_t level) {
  static std::map<int64_t, MeshPtr> cache;
  auto& m = cache[level];
  if (!m) m = mesh_hierarchy(DomainSpec::ellipse(1.5, 1.0), 0.05, static_cast<int>(level) + 1).back();
  return m;
}

Execution exec_of(const benchmark::State& state) { return state.range(1) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& state, long dofs) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
  state.counters["dofs"] = static_cast<double>(dofs);
}

void BM_AssembleStiffnessP2(benchmark::State& state) {
  auto space = make_space(bench_mesh(state.range(0)), SpaceKind::P2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(*space, exec_of(state)));
  label(state, space->dof_count());
}

void BM_AssembleMorleyHessian(benchmark::State& state) {
  auto space = make_space(bench_mesh(state.range(0)), SpaceKind::Morley);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_morley_hessian(*space, exec_of(state)));
  label(state, space->dof_count());
}

void BM_AssembleStokes(benchmark::State& state) {
  auto space = make_space(bench_mesh(state.range(0)), SpaceKind::TaylorHood);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stokes_system(*space, exec_of(state)));
  label(state, space->dof_count());
}

void BM_Spmm(benchmark::State& state) {
  auto space = make_space(bench_mesh(state.range(0)), SpaceKind::P2);
  const SparseMatrix k = assemble_stiffness(*space);
  const DenseMatrix x = seeded_block(k.cols(), 6, 1);
  for (auto _ : state) benchmark::DoNotOptimize(spmm(k, x, exec_of(state)));
  label(state, space->dof_count());
}

void BM_Spmv(benchmark::State& state) {
  auto space = make_space(bench_mesh(state.range(0)), SpaceKind::P2);
  const SparseMatrix k = assemble_stiffness(*space);
  const Vector x = seeded_block(k.cols(), 1, 1).col(0);
  Vector y(k.rows());
  for (auto _ : state) {
    spmv(k, x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
  label(state, space->dof_count());
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int64_t level : {0, 1, 2})
    for (int64_t parallel : {0, 1}) b->Args({level, parallel});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_AssembleStiffnessP2)->Apply(sizes);
BENCHMARK(BM_AssembleMorleyHessian)->Apply(sizes);
BENCHMARK(BM_AssembleStokes)->Apply(sizes);
BENCHMARK(BM_Spmm)->Apply(sizes);
BENCHMARK(BM_Spmv)->Apply(sizes);

BENCHMARK_MAIN();
