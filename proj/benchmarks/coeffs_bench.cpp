#include <benchmark/benchmark.h>

#include "kolmo/field_library.hpp"
#include "kolmo/mollify.hpp"
#include "kolmo/oscillation.hpp"

namespace {

using namespace kolmo;

void BM_MeanOscillation(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto f = coeffs::weierstrass_field(d, 0.5, 0.5);
  const auto radii = coeffs::log_spaced(1e-3, 0.5, 8);
  coeffs::SamplingSpec s;
  s.box = {d, -1, 1};
  s.centers = 32;
  s.points_per_ball = 32;
  for (auto _ : state) benchmark::DoNotOptimize(coeffs::dini_mean_oscillation(f, radii, s));
}
BENCHMARK(BM_MeanOscillation)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MollifiedEvaluation(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto g = coeffs::mollify(coeffs::log_modulus_field(d, 0.5), coeffs::MollifierSpec(d, 0.01));
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g(Point{x, 0.3 * x}));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_MollifiedEvaluation)->Arg(1)->Arg(2);

}  // namespace
