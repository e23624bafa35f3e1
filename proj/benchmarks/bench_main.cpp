// Microbenchmarks for the hot paths: equilibrium transfers, welfare
// evaluation, the curvature decomposition, and the two plan searches.
#include <benchmark/benchmark.h>

#include <random>

#include "distopt/district.hpp"
#include "distopt/optimizer.hpp"
#include "distopt/platforms.hpp"
#include "distopt/scenario.hpp"
#include "distopt/surface.hpp"
#include "distopt/welfare.hpp"

namespace {

using namespace distopt;

PerMatchup<GroupVals> flat(double md, double nd, double r) {
  PerMatchup<GroupVals> out;
  for (Matchup m : kMatchups) out[m] = GroupVals{md, nd, r};
  return out;
}

Scenario reduced_scenario(int districts) {
  PerMatchup<GroupVals> phi;
  phi[Matchup::primary_mD_nD] = GroupVals{0.8, 0.4, 0.3};
  phi[Matchup::general_mD_R] = GroupVals{0.9, 0.6, 0.2};
  phi[Matchup::general_nD_R] = GroupVals{0.7, 0.75, 0.25};
  return Scenario::from_reduced({GroupVals{0.25, 0.4, 0.35}, districts},
                                PrimaryRule::closed, MatchupMode::expectation_weighted,
                                IdeologyWeights{0.5}, flat(2.0, 3.0, 1.0), phi, 0.5, 1.0);
}

Scenario smoothed_scenario() {
  Primitives prims;
  prims.epsilon = 0.5;
  for (Group g : kGroups) {
    GroupProfile& p = prims.profiles[index_of(g)];
    p.kappa = 1.0;
    p.epsilon = 0.5;
    auto general = AffinityDistribution::logistic(0.0, 1.0);
    p.affinity[Matchup::primary_mD_nD] = AffinityDistribution::logistic(0.0, 0.25);
    p.affinity[Matchup::general_mD_R] = general;
    p.affinity[Matchup::general_nD_R] = general;
  }
  prims.mu[Matchup::primary_mD_nD] = GroupVals{0.7, -0.8, 0.0};
  prims.mu[Matchup::general_mD_R] = GroupVals{0.4, 0.3, -0.6};
  prims.mu[Matchup::general_nD_R] = GroupVals{-0.1, 0.5, -0.4};
  return Scenario::from_primitives({GroupVals{0.25, 0.4, 0.35}, 2}, PrimaryRule::closed,
                                   MatchupMode::smoothed, IdeologyWeights{0.5},
                                   std::move(prims));
}

DistrictingPlan two_district_plan() {
  return DistrictingPlan{{DistrictComposition{GroupVals{0.35, 0.35, 0.30}, 1.0},
                          DistrictComposition{GroupVals{0.15, 0.45, 0.40}, 1.0}}};
}

void BM_EquilibriumPlatforms(benchmark::State& state) {
  GroupPowerVector pw{GroupVals{2.0, 3.0, 1.0}, Matchup::general_mD_R};
  DistrictComposition d{GroupVals{0.3, 0.4, 0.3}, 1.0};
  Electorate elec = Electorate::full();
  for (auto _ : state) {
    benchmark::DoNotOptimize(equilibrium_platforms(pw, d, elec));
  }
}
BENCHMARK(BM_EquilibriumPlatforms);

void BM_MinorityShareGradient(benchmark::State& state) {
  GroupVals pw{2.0, 3.0, 1.0};
  DistrictComposition d{GroupVals{0.3, 0.4, 0.3}, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(share_gradient(pw, d));
    benchmark::DoNotOptimize(share_hessian(pw, d));
  }
}
BENCHMARK(BM_MinorityShareGradient);

void BM_TotalWelfareSmoothed(benchmark::State& state) {
  Scenario s = smoothed_scenario();
  DistrictingPlan plan = two_district_plan();
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_welfare(s, plan));
  }
}
BENCHMARK(BM_TotalWelfareSmoothed);

void BM_WelfareCurvature(benchmark::State& state) {
  Scenario s = smoothed_scenario();
  DistrictingPlan plan = two_district_plan();
  for (auto _ : state) {
    benchmark::DoNotOptimize(welfare_curvature(s, plan, 0, {}));
  }
}
BENCHMARK(BM_WelfareCurvature);

void BM_TippingScan(benchmark::State& state) {
  Scenario s = smoothed_scenario();
  DistrictingPlan plan = two_district_plan();
  const double grid = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tipping_region(s, plan, 0, grid, {}, 0.1));
  }
}
BENCHMARK(BM_TippingScan)->Arg(25)->Arg(100);

void BM_OptimizeThreeDistricts(benchmark::State& state) {
  Scenario s = reduced_scenario(3);
  ObjectiveSpec obj;
  OptimizerConfig cfg;
  cfg.restarts = static_cast<int>(state.range(0));
  cfg.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize(s, obj, cfg));
  }
}
BENCHMARK(BM_OptimizeThreeDistricts)->Arg(8)->Arg(64);

void BM_GridOracleTwoDistricts(benchmark::State& state) {
  Scenario s = reduced_scenario(2);
  ObjectiveSpec obj;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_oracle(s, obj, 0.05));
  }
}
BENCHMARK(BM_GridOracleTwoDistricts);

}  // namespace

BENCHMARK_MAIN();
