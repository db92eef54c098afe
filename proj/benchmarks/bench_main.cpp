#include <benchmark/benchmark.h>

#include "gprd/classical.hpp"
#include "gprd/metrics.hpp"
#include "gprd/nn/crnet.hpp"
#include "gprd/nn/layers.hpp"
#include "gprd/random.hpp"

using namespace gprd;

namespace {

Radargram random_scan(std::size_t h, std::size_t w, std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<double> d(h * w);
  for (auto& v : d) v = rng.uniform();
  return Radargram(h, w, std::move(d));
}

void BM_Conv3x3(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  nn::Conv2d<float> conv("c", c, c, 3);
  nn::Tensor4<float> x({1, c, 64, 32}, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_Conv3x3)->Arg(8)->Arg(32)->Arg(64);

void BM_Rpca(benchmark::State& state) {
  const auto r = random_scan(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(classical::rpca_decompose(r));
}
BENCHMARK(BM_Rpca)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Svd(benchmark::State& state) {
  const auto r = random_scan(256, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(classical::svd_removal(r, 1));
}
BENCHMARK(BM_Svd)->Unit(benchmark::kMillisecond);

void BM_MsSsim(benchmark::State& state) {
  const auto a = random_scan(256, 64, 3);
  const auto b = random_scan(256, 64, 4);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ms_ssim(a, b));
}
BENCHMARK(BM_MsSsim)->Unit(benchmark::kMicrosecond);

void BM_MsSsimGradient(benchmark::State& state) {
  const auto a = random_scan(256, 64, 3);
  const auto b = random_scan(256, 64, 4);
  const auto cfg = metrics::resolve({}, 256, 64);
  std::vector<double> grad(a.size());
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ms_ssim(a.data(), b.data(), 256, 64, cfg, grad));
}
BENCHMARK(BM_MsSsimGradient)->Unit(benchmark::kMicrosecond);

void BM_CrnetForward(benchmark::State& state) {
  nn::CRNetConfig cfg;
  cfg.base_width = static_cast<std::size_t>(state.range(0));
  nn::CRNet<float> net(cfg);
  net.initialize(1);
  nn::Tensor4<float> x({1, 1, 256, 64}, 0.5f);
  net.forward(x, nn::Mode::train);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, nn::Mode::eval));
}
BENCHMARK(BM_CrnetForward)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CrnetTrainStep(benchmark::State& state) {
  nn::CRNetConfig cfg;
  cfg.base_width = 8;
  nn::CRNet<float> net(cfg);
  net.initialize(1);
  nn::Tensor4<float> x({8, 1, 64, 32}, 0.5f);
  nn::Tensor4<float> g({8, 1, 64, 32}, 1e-3f);
  for (auto _ : state) {
    net.zero_grad();
    net.forward(x, nn::Mode::train);
    benchmark::DoNotOptimize(net.backward(g));
  }
}
BENCHMARK(BM_CrnetTrainStep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
