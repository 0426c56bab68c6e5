#include "aniso/oracles.hpp"
#include "aniso/tubes.hpp"
#include "aniso/variational.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace aniso;

namespace {

Lagrangian profile() { return Lagrangian::angle_profile(3, 2, {1.0, 0.1}); }

void BM_Exp(benchmark::State& state) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Vec p0 = m.base_point();
  Vec v = m.from_base(Vec::Constant(4, 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(m.exp(p0, v));
}
BENCHMARK(BM_Exp);

void BM_PropagateJacobi(benchmark::State& state) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Vec p0 = m.base_point();
  const Vec w = m.from_base(Vec::Constant(4, 0.5));
  const Vec y = m.from_base(unit_vector(4, 1));
  for (auto _ : state) benchmark::DoNotOptimize(propagate_jacobi(m, p0, w, y, y, 0.7));
}
BENCHMARK(BM_PropagateJacobi);

void BM_JacobiRk4(benchmark::State& state) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Vec p0 = m.base_point();
  const Vec w = m.from_base(Vec::Constant(4, 0.5));
  const Vec y = m.from_base(unit_vector(4, 1));
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_rk4(m, p0, w, y, y, 0.7));
}
BENCHMARK(BM_JacobiRk4)->Unit(benchmark::kMillisecond);

void BM_SurfaceSample(benchmark::State& state) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion f = geodesic_sphere(m, f_lag, 0.3, Domain::sphere(3, 16));
  Param u(3);
  u << 0.7, 0.3, 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(surface_sample(f, f_lag, u));
}
BENCHMARK(BM_SurfaceSample)->Unit(benchmark::kMicrosecond);

void BM_FocalRadii(benchmark::State& state) {
  const AmbientModel m = AmbientModel::sphere_product(2, 2);
  const Lagrangian f_lag = profile();
  const Immersion f = geodesic_sphere(m, f_lag, 0.3, Domain::sphere(3, 16));
  Param u(3);
  u << 0.7, 0.3, 1.1;
  const FocalSample s = focal_sample(surface_sample(f, f_lag, u));
  for (auto _ : state) benchmark::DoNotOptimize(focal_radii(m, s));
}
BENCHMARK(BM_FocalRadii)->Unit(benchmark::kMillisecond);

void BM_Energy(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(res, res));
  Mat q = Mat::Zero(3, 3);
  q.diagonal() << 1.0, 1.5, 4.0;
  const Lagrangian f_lag = Lagrangian::quadratic_form(q);
  for (auto _ : state) benchmark::DoNotOptimize(energy(torus, f_lag));
  state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(BM_Energy)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FirstVariation(benchmark::State& state) {
  const Immersion torus = euclidean_torus(1.0, 0.4, Domain::torus2(32, 32));
  const Lagrangian one = Lagrangian::constant(2, 1.0);
  std::mt19937_64 rng(1);
  const std::vector<Variation> vs{random_variation(torus, rng, false)};
  for (auto _ : state) benchmark::DoNotOptimize(verify_first_variation(torus, one, vs));
}
BENCHMARK(BM_FirstVariation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
