#include <benchmark/benchmark.h>

#include <cmath>

#include "stadium/contour.hpp"
#include "stadium/discretize.hpp"
#include "stadium/eigensolve.hpp"
#include "stadium/geometry.hpp"

using namespace stadium;

namespace {

Grid quadrant_grid(double h) { return build_grid(StadiumGeometry(1.0), GridSpec::quadrant(h, SymmetryClass::EE)); }

void BM_Assemble(benchmark::State& state) {
  const Grid grid = quadrant_grid(1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_laplacian(grid));
  state.counters["n"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(128);

void BM_Matvec(benchmark::State& state) {
  const Grid grid = quadrant_grid(1.0 / static_cast<double>(state.range(0)));
  const SparseSymMatrix m = assemble_laplacian(grid);
  std::vector<double> x(m.n(), 1.0), y(m.n());
  for (auto _ : state) {
    matvec(m, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.nnz()));
}
BENCHMARK(BM_Matvec)->Arg(64)->Arg(128)->Arg(256);

void BM_Lobpcg(benchmark::State& state) {
  const SparseSymMatrix m = assemble_laplacian(quadrant_grid(1.0 / 32));
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_k(m, k));
}
BENCHMARK(BM_Lobpcg)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MarchingSquares(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const double h = 2.0 / static_cast<double>(n - 1);
  const auto f = LatticeField::from_function(-1.0, -1.0, h, n, n,
                                             [](double x, double y) { return std::sin(6 * x) * std::cos(5 * y); });
  const std::vector<double> levels{-0.5, 0.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(marching_squares(f, levels));
}
BENCHMARK(BM_MarchingSquares)->Arg(129)->Arg(513);

}  // namespace

BENCHMARK_MAIN();
