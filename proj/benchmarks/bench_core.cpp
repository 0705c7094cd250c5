#include <benchmark/benchmark.h>

#include <random>

#include "oqs/collective.hpp"
#include "oqs/lindblad.hpp"
#include "oqs/meanfield.hpp"
#include "oqs/response.hpp"

using namespace oqs;

namespace {

opspec::ModelSpec lossy_hubbard(int sites) {
  opspec::ModelSpec spec;
  spec.num_sites = sites;
  spec.hopping = 1.0;
  spec.interaction = 4.0;
  spec.chemical_potential = 2.0;
  for (int r = 0; r < sites; ++r)
    spec.dissipators.push_back(
        {"loss", 0.2,
         opspec::Expr::product(
             {opspec::Expr::atom(opspec::OpAtom::Kind::annihilate, r,
                                 opspec::Spin::dn),
              opspec::Expr::atom(opspec::OpAtom::Kind::annihilate, r,
                                 opspec::Spin::up)})});
  return spec;
}

void BM_BuildLiouvillian(benchmark::State& state) {
  auto spec = lossy_hubbard(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto liou = lindblad::build_liouvillian(spec);
    benchmark::DoNotOptimize(liou.matrix);
  }
}
BENCHMARK(BM_BuildLiouvillian)->Arg(2)->Arg(3);

void BM_EvolveUnitTime(benchmark::State& state) {
  auto spec = lossy_hubbard(static_cast<int>(state.range(0)));
  auto liou = lindblad::build_liouvillian(spec);
  std::mt19937_64 rng(1);
  fock::Matrix rho0 = fock::random_density_matrix(liou.dim, rng);
  lindblad::EvolveOptions opts;
  opts.total_time = 1.0;
  opts.dt0 = 1e-2;
  for (auto _ : state) {
    auto traj = lindblad::evolve(liou, rho0, opts);
    benchmark::DoNotOptimize(traj.records.back().n_total);
  }
}
BENCHMARK(BM_EvolveUnitTime)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_GreensEvaluate(benchmark::State& state) {
  response::NambuGreens g;
  g.mu = 1.0;
  g.delta = 0.1;
  g.gamma_n = 0.05;
  double omega = -2.0;
  for (auto _ : state) {
    omega += 1e-6;
    benchmark::DoNotOptimize(
        g.evaluate(response::GreensKind::time_ordered, omega, 1.1));
  }
}
BENCHMARK(BM_GreensEvaluate);

void BM_GapSolve(benchmark::State& state) {
  auto grid =
      MomentumGrid::make_uniform(static_cast<int>(state.range(0)), 1.0, 3.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(meanfield::solve_gap(7.8, grid));
}
BENCHMARK(BM_GapSolve)->Arg(512)->Arg(4096);

void BM_ZerothOrderResidual(benchmark::State& state) {
  auto grid = MomentumGrid::make_uniform(512, 1.0, 3.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        collective::zeroth_order_residual(0.01, 0.02, 0.1, grid));
}
BENCHMARK(BM_ZerothOrderResidual)->Unit(benchmark::kMillisecond);

void BM_BcsEvolveUnitTime(benchmark::State& state) {
  auto grid =
      MomentumGrid::make_uniform(static_cast<int>(state.range(0)), 1.0, 3.0);
  const double u = meanfield::attraction_for_gap(0.1, grid);
  for (auto _ : state) {
    auto s = meanfield::init_bcs(0.1, grid);
    meanfield::BcsRunOptions opts;
    opts.total_time = 1.0;
    opts.dt0 = 5e-3;
    auto rows = meanfield::evolve_bcs(s, u, 0.1 * u, grid, opts);
    benchmark::DoNotOptimize(rows.back().n);
  }
}
BENCHMARK(BM_BcsEvolveUnitTime)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
