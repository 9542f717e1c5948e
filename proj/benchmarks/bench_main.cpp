#include <benchmark/benchmark.h>

#include "btlf/centralizer.hpp"
#include "btlf/scenario.hpp"

using namespace btlf;

namespace {

// Everything below is deterministic: fixtures come straight from the catalog
// so the timed region never touches an RNG.
const ScenarioData& sp4() {
  static const ScenarioData sd = realize(catalog_scenario("sp4-mixed"));
  return sd;
}

LatticeFunction sp4_skew_fn() {
  // a non-split basis with fractional offsets, to keep dual/HNF work honest
  const FieldLayer* F = sp4().F;
  Matrix b = Matrix::identity(F, 4);
  b.at(0, 2) = F->from_rat(Rat(1, 3));
  b.at(1, 3) = F->from_rat(Rat(2));
  b.at(0, 1) = F->from_rat(Rat(5));
  return make_lattice_function(b, {Rat(-1, 4), Rat(1, 6), Rat(0), Rat(1, 2)});
}

}  // namespace

static void BM_LayerMul(benchmark::State& state) {
  const FieldLayer* F = Tower::rationals(3);
  const FieldLayer* E = Tower::quadratic(F, Rat(3));
  FElem x = E->from_rat(Rat(7, 5)) + Rat(2) * E->monomial(1);
  for (auto _ : state) {
    FElem y = x * x;
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_LayerMul);

static void BM_LatticeHnf(benchmark::State& state) {
  const LatticeFunction fn = sp4_skew_fn();
  for (auto _ : state) {
    DvrLattice L = make_lattice(fn.basis);
    benchmark::DoNotOptimize(L);
  }
}
BENCHMARK(BM_LatticeHnf);

static void BM_DualFunction(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  const LatticeFunction fn = sp4_skew_fn();
  for (auto _ : state) {
    LatticeFunction d = dual_function(sd.h, fn);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_DualFunction);

static void BM_RecoverSelfDual(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  const LatticeFunction shifted = translate(embed_point(sd.D, sd.x), Rat(5, 3));
  for (auto _ : state) {
    LatticeFunction r = recover_self_dual(sd.h, shifted);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RecoverSelfDual);

static void BM_DecomposeBeta(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  for (auto _ : state) {
    BetaDecomposition D = decompose_beta(sd.h, sd.beta);
    benchmark::DoNotOptimize(D);
  }
}
BENCHMARK(BM_DecomposeBeta);

static void BM_EmbedPoint(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  for (auto _ : state) {
    LatticeFunction y = embed_point(sd.D, sd.x);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_EmbedPoint);

static void BM_LieProfile(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  for (auto _ : state) {
    FiltrationProfile p = central_lie_profile(sd.D, sd.x);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_LieProfile);

static void BM_AmbientCutProfile(benchmark::State& state) {
  const ScenarioData& sd = sp4();
  const LatticeFunction y = embed_point(sd.D, sd.x);
  const Matrix W = centralizer_lie_frame(sd.D);
  for (auto _ : state) {
    FiltrationProfile p = ambient_cut_profile(y, W);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_AmbientCutProfile);

BENCHMARK_MAIN();
