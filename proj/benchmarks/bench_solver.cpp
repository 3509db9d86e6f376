#include <benchmark/benchmark.h>

#include <random>

#include <spdlog/spdlog.h>

#include "rwprop/dirichlet.hpp"
#include "rwprop/phantom.hpp"
#include "rwprop/propagation.hpp"

using namespace rwprop;

namespace {

// Cube of side n split into two intensity halves, with sparse random seeds.
struct Cube {
  ImageVolume guidance;
  MaskVolume roi;
  LatticeGraph graph;
  std::vector<LabelId> seeds;
  LabelSet labels{{{1, "A"}, {2, "B"}, {3, "C"}}};
};

Cube make_cube(std::size_t n, double seed_density) {
  Grid g;
  g.dims = {n, n, n};
  Cube c;
  c.guidance = make_image(g);
  std::mt19937_64 rng(n);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) c.guidance[i] = (g.coords(i)[0] < n / 2 ? 0.3 : 0.7) + noise(rng);
  c.roi = make_mask(g, true);
  c.graph = build_lattice(c.guidance, c.roi, kDefaultBeta);
  c.seeds.assign(c.graph.node_count(), kBackground);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : c.seeds) {
    if (u(rng) < seed_density) s = static_cast<LabelId>(1 + rng() % 3);
  }
  c.seeds[0] = 1;
  return c;
}

void BM_BuildLattice(benchmark::State& state) {
  const auto c = make_cube(static_cast<std::size_t>(state.range(0)), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(build_lattice(c.guidance, c.roi, kDefaultBeta));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.graph.node_count()));
}
BENCHMARK(BM_BuildLattice)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveAll(benchmark::State& state) {
  const auto c = make_cube(static_cast<std::size_t>(state.range(0)), 0.01);
  const auto sys = assemble(c.graph, c.seeds, c.labels);
  SolverConfig cfg;
  cfg.threads = 1;
  cfg.preconditioner = static_cast<Preconditioner>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(solve_all(sys, cfg));
  state.SetLabel(std::string(to_string(cfg.preconditioner)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sys.unseeded_count()));
}
BENCHMARK(BM_SolveAll)
    ->Args({24, static_cast<int>(Preconditioner::Multigrid)})
    ->Args({24, static_cast<int>(Preconditioner::Jacobi)})
    ->Args({48, static_cast<int>(Preconditioner::Multigrid)})
    ->Unit(benchmark::kMillisecond);

void BM_PropagatePhantom(benchmark::State& state) {
  spdlog::set_level(spdlog::level::warn);
  const Phantom ph = make_phantom(thalamus_phantom_spec(0.3, 0.2, 2023));
  PropagationRequest req;
  req.guidance = ph.guidance;
  req.roi = ph.roi;
  req.annotation = ph.annotation;
  req.solver.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(req));
}
BENCHMARK(BM_PropagatePhantom)->Arg(1)->Unit(benchmark::kSecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
