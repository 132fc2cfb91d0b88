#include <benchmark/benchmark.h>

#include "biosynth/analysis.hpp"
#include "biosynth/beat_intervals.hpp"
#include "biosynth/config.hpp"
#include "biosynth/noise.hpp"
#include "biosynth/pipeline.hpp"
#include "biosynth/waveform.hpp"

namespace {

using namespace biosynth;

std::vector<double> fft_grid(std::size_t n, double fs) {
  std::vector<double> grid;
  for (std::size_t k = 1; k <= n / 2; ++k)
    grid.push_back(static_cast<double>(k) * fs / static_cast<double>(n));
  return grid;
}

void BM_GenerateGamma(benchmark::State& state) {
  const GammaParams params;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_gamma(n, params, 1));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_GenerateGamma)->Arg(10000)->Arg(100000);

void BM_GenerateIntervals(benchmark::State& state) {
  const BeatModel model;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        generate_intervals(model, GenerationSpan::beats(static_cast<std::size_t>(state.range(0))), 2));
}
BENCHMARK(BM_GenerateIntervals)->Arg(1000)->Arg(100000);

void BM_SynthesizeClean(benchmark::State& state) {
  const BeatModel model;
  const auto series = generate_intervals(model, GenerationSpan::duration(30.0), 3);
  const auto waves = WaveParameterSet::ecg_defaults();
  SynthOptions options;
  options.strict_resolution = false;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_clean(series, waves, 250.0, options));
}
BENCHMARK(BM_SynthesizeClean);

void BM_SynthesizeNoise(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto psd = model_psd(fft_grid(n, 250.0), NoiseModelParams{}, 250.0);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_noise(psd, n, 7));
}
BENCHMARK(BM_SynthesizeNoise)->Arg(7500)->Arg(60000);

void BM_WelchPsd(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto psd = model_psd(fft_grid(n, 250.0), NoiseModelParams{}, 250.0);
  const auto noise = synthesize_noise(psd, n, 9);
  for (auto _ : state) benchmark::DoNotOptimize(welch_psd(noise, 250.0));
}
BENCHMARK(BM_WelchPsd)->Arg(15000)->Arg(60000);

void BM_Dfa(benchmark::State& state) {
  const BeatModel model;
  const auto series =
      generate_intervals(model, GenerationSpan::beats(static_cast<std::size_t>(state.range(0))), 4);
  for (auto _ : state) benchmark::DoNotOptimize(dfa(series.intervals));
}
BENCHMARK(BM_Dfa)->Arg(10000)->Arg(100000);

void BM_RenderSignal(benchmark::State& state) {
  GeneratorConfig config;
  config.seed = 5;
  const SourceRegistry registry;
  const auto recipe = build_recipe(config, registry, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(render_recipe(recipe, registry, config.quality));
}
BENCHMARK(BM_RenderSignal);

}  // namespace

BENCHMARK_MAIN();
