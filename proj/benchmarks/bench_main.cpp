#include <benchmark/benchmark.h>

#include "deblur/kernel.hpp"
#include "deblur/latent.hpp"
#include "deblur/pipeline.hpp"
#include "deblur/transforms.hpp"
#include "fixtures.hpp"

using namespace deblur;
using namespace deblur::testing;

static void BM_Dft2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image x = random_image(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dft2(x));
  state.SetComplexityN(static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_Dft2)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNLogN);

static void BM_FrameletRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image x = random_image(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(framelet_synthesis(framelet_analysis(x)));
}
BENCHMARK(BM_FrameletRoundTrip)->RangeMultiplier(2)->Range(64, 512);

static void BM_FbsProx(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FrameletCoeffs wx = random_coeffs(n, n, 3);
  FbsParams p;
  p.beta = 0.5;
  p.lambda = 4e-3;
  p.sigma = 1.0;
  p.alpha = 40.0;
  p.tau = fbs_step_size(fbs_lipschitz(p.beta, p.lambda, p.sigma, p.alpha), 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(update_u_fbs(wx, wx, p));
}
BENCHMARK(BM_FbsProx)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_UpdateX(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image y = random_image(n, n, 4);
  const FreqCache cache(random_kernel(7, 5), y.shape());
  const GradientField g = random_gradient(n, n, 6);
  const FrameletCoeffs u = random_coeffs(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(update_x(y, cache, g, u, 4e-3, 1.0, 1.0));
}
BENCHMARK(BM_UpdateX)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_SolveLatent(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Kernel k = Kernel::uniform(5, 5);
  const Image y = convolve_periodic(shapes_fixture(n), k);
  SolverConfig cfg;
  cfg.gamma = 4e-3;
  const ValidatedConfig v = validate_config(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solve_latent(y, k, v));
}
BENCHMARK(BM_SolveLatent)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SolveKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image x = shapes_fixture(n);
  const Image y = convolve_periodic(x, Kernel::uniform(5, 5));
  SolverConfig cfg;
  cfg.gamma = 4e-3;
  const ValidatedConfig v = validate_config(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernel(x, y, v, Kernel::uniform(7, 7)));
}
BENCHMARK(BM_SolveKernel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_BlindDeblur(benchmark::State& state) {
  const Image y = convolve_periodic(shapes_fixture(64), Kernel::uniform(5, 5));
  SolverConfig cfg;
  cfg.gamma = 4e-3;
  for (auto _ : state) benchmark::DoNotOptimize(blind_deblur(y, cfg));
}
BENCHMARK(BM_BlindDeblur)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
