#include "thermohom/cell_problems.hpp"
#include "thermohom/fem.hpp"

#include <benchmark/benchmark.h>

using namespace thermohom;

namespace {

MaterialTable aluminium_table() { return {RegionMaterial::from(aluminium())}; }

void BM_MeshSinglePore(benchmark::State& state) {
  const RveSpec spec = make_preset(Preset::single);
  for (auto _ : state) benchmark::DoNotOptimize(generate_mesh(spec, static_cast<int>(state.range(0)), 2));
}
BENCHMARK(BM_MeshSinglePore)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AssembleElasticity(benchmark::State& state) {
  const Mesh m = generate_mesh(make_preset(Preset::single), static_cast<int>(state.range(0)), 2);
  const MaterialTable mats = aluminium_table();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_bilinear(m, mats, Operator::elasticity));
  state.counters["nodes"] = static_cast<double>(m.num_nodes());
}
BENCHMARK(BM_AssembleElasticity)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FactorizeElasticity(benchmark::State& state) {
  const Mesh m = generate_mesh(make_preset(Preset::single), static_cast<int>(state.range(0)), 2);
  const DofMap d(m, 2);
  const SparseMatrix K = reduce_periodic(assemble_bilinear(m, aluminium_table(), Operator::elasticity), d);
  const Eigen::VectorXd w = node_weights(m);
  for (auto _ : state) {
    ConstrainedSolver solver(K, d, w, true);
    benchmark::DoNotOptimize(solver.symmetry_error());
  }
}
BENCHMARK(BM_FactorizeElasticity)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CellProblems(benchmark::State& state) {
  const Mesh m = generate_mesh(make_preset(Preset::single), static_cast<int>(state.range(0)), 2);
  const MaterialTable mats = aluminium_table();
  for (auto _ : state) benchmark::DoNotOptimize(solve_cell_problems(m, mats));
}
BENCHMARK(BM_CellProblems)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
