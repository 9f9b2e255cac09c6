// Serial reference vs OpenMP kernels at the default 32 x 768 feature geometry.

#include <benchmark/benchmark.h>

#include <vector>

#include "vlfsim/codec.hpp"
#include "vlfsim/kernels.hpp"
#include "vlfsim/rng.hpp"

namespace {

using vlfsim::kernels::Complex;

constexpr std::size_t kElements = 32 * 768;

std::vector<double> features(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = vlfsim::rng::real_normal(11, 0, i);
  return x;
}

template <auto Kernel>
void BM_Pack(benchmark::State& state) {
  const auto x = features(static_cast<std::size_t>(state.range(0)));
  std::vector<Complex> out(x.size() / 2);
  for (auto _ : state) {
    Kernel(x, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pack<vlfsim::kernels::serial::pack>)->Arg(kElements)->Arg(1 << 20);
BENCHMARK(BM_Pack<vlfsim::kernels::parallel::pack>)->Arg(kElements)->Arg(1 << 20);

template <auto Kernel>
void BM_SumSquares(benchmark::State& state) {
  const auto x = features(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SumSquares<vlfsim::kernels::serial::sum_squares>)->Arg(kElements)->Arg(1 << 20);
BENCHMARK(BM_SumSquares<vlfsim::kernels::parallel::sum_squares>)->Arg(kElements)->Arg(1 << 20);

template <auto Kernel>
void BM_Channel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<Complex> tx(n, Complex(0.7, -0.7));
  std::vector<Complex> gains(n), rx(n);
  const vlfsim::kernels::ChannelDraw draw{true, 0.3, 42};
  for (auto _ : state) {
    Kernel(tx, draw, gains, rx);
    benchmark::DoNotOptimize(rx.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Channel<vlfsim::kernels::serial::apply_channel>)->Arg(kElements / 2)->Arg(1 << 19);
BENCHMARK(BM_Channel<vlfsim::kernels::parallel::apply_channel>)->Arg(kElements / 2)->Arg(1 << 19);

template <auto Kernel>
void BM_ZeroForcing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Complex> gains(n), rx(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    gains[i] = vlfsim::rng::complex_normal(3, 1, i);
    rx[i] = vlfsim::rng::complex_normal(3, 2, i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(rx, gains, 1e-12, out));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ZeroForcing<vlfsim::kernels::serial::zf_equalize>)->Arg(kElements / 2)->Arg(1 << 19);
BENCHMARK(BM_ZeroForcing<vlfsim::kernels::parallel::zf_equalize>)->Arg(kElements / 2)->Arg(1 << 19);

void BM_Projection(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? vlfsim::Exec::Serial : vlfsim::Exec::Parallel;
  const vlfsim::OrthoProjection proj(kElements, 3 * 128 * 128, 5);
  const auto x = features(proj.cols());
  for (auto _ : state) benchmark::DoNotOptimize(proj.apply(x, exec));
  state.SetLabel(exec == vlfsim::Exec::Serial ? "serial" : "parallel");
}
BENCHMARK(BM_Projection)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
