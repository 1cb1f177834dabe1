#include <benchmark/benchmark.h>

#include "fiolab/amplitude.hpp"
#include "fiolab/decomp.hpp"
#include "fiolab/engine.hpp"
#include "fiolab/phase.hpp"

namespace {

using namespace fiolab;

void BM_KernelF(benchmark::State& state) {
  const auto phi = make_builtin_phase("shifted_wave", 2);
  const auto b = make_builtin_amplitude("sg_power", 2, Orders{-0.25, -0.25, -0.5}, Flavor::I);
  QuadratureSpec q;
  q.k_max = static_cast<int>(state.range(0));
  const Point x{2.0, 0.5, 0.0}, y{0.5, 0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(kernel_F(b, phi, x, y, q));
}
BENCHMARK(BM_KernelF)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_KernelField(benchmark::State& state) {
  const auto phi = make_builtin_phase("shifted_wave", 2);
  const auto b = make_builtin_amplitude("sg_power", 2, Orders{-0.25, -0.25, -0.5}, Flavor::I);
  QuadratureSpec q;
  const int k = static_cast<int>(state.range(0));
  Grid g;
  g.extent = 3.0;
  g.points_per_axis = lattice_points_required(g.extent, std::ldexp(1.0, k + 2), q.oversample);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_field(b, phi, Point{}, g, q, KernelVariant::dyadic(k)));
}
BENCHMARK(BM_KernelField)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ApplyTLattice(benchmark::State& state) {
  const auto phi = make_builtin_phase("shifted_wave", 2);
  const auto b = make_builtin_amplitude("sg_power", 2, Orders{-1.0, 0.0, -0.5}, Flavor::I);
  QuadratureSpec q;
  q.k_max = 4;
  Grid g;
  g.extent = 8.0;
  g.points_per_axis = static_cast<int>(state.range(0));
  const Field u = make_atom(2, Point{}, 1.0, "tensor_haar_smoothed").sample(g);
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(b, phi, u, q));
}
BENCHMARK(BM_ApplyTLattice)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_AngularCutoffs(benchmark::State& state) {
  const auto fr = make_angular_frame(2, static_cast<int>(state.range(0)), Point{4.0, 0.0, 0.0});
  std::vector<std::pair<int, double>> out;
  double a = 0.0;
  for (auto _ : state) {
    a += 0.001;
    fr.cutoffs(Point{std::cos(a) * 64.0, std::sin(a) * 64.0, 0.0}, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_AngularCutoffs)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
