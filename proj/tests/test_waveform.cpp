#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "biosynth/errors.hpp"
#include "biosynth/waveform.hpp"

using namespace biosynth;

namespace {

constexpr double kPi = 3.14159265358979323846;

BeatIntervalSeries constant_series(double theta, std::size_t beats) {
  return BeatIntervalSeries::from_intervals(std::vector<double>(beats, theta));
}

std::vector<double> phi_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

}  // namespace

TEST_CASE("phase_ramp: endpoints and direct substitution") {
  const auto series = BeatIntervalSeries::from_intervals({0.8, 1.0});
  CHECK(phase_ramp(0.0, series) == 0.0);
  CHECK(phase_angle(phase_ramp(0.0, series)) == doctest::Approx(-kPi));
  CHECK(phase_ramp(0.8, series) == doctest::Approx(1.0));
  CHECK(phase_ramp(1.3, series) == doctest::Approx(0.5));
  CHECK(phase_angle(phase_ramp(1.3, series)) == doctest::Approx(0.0));
  CHECK(phase_ramp(1.8, series) == doctest::Approx(1.0));
  CHECK_THROWS_AS(phase_ramp(1.9, series), std::invalid_argument);
  CHECK_THROWS_AS(phase_ramp(-0.1, series), std::invalid_argument);
}

TEST_CASE("wave_derivative: zero at the peak center") {
  WaveParams p{0.2, 1.0, 0.1, 1.0};
  CHECK(wave_derivative(p.d * kPi, p) == 0.0);
}

TEST_CASE("wave_derivative: odd symmetry for m = 1") {
  WaveParams p{0.0, 0.7, 0.3, 1.0};
  const double g_minus = wave_derivative(-0.3, p);
  const double g_plus = wave_derivative(0.3, p);
  CHECK(g_minus > 0.0);  // rising flank before the peak for a > 0
  CHECK(g_minus == doctest::Approx(-g_plus).epsilon(1e-12));
}

TEST_CASE("wave_derivative: hand-evaluated value") {
  // a=1, w=0.5, m=1 at psi=0.5: -(2*pi*0.5/0.25)*exp(-0.5) = -4*pi*e^-0.5
  WaveParams p{0.0, 1.0, 0.5, 1.0};
  CHECK(wave_derivative(0.5, p) == doctest::Approx(-7.621889058920719).epsilon(1e-9));
}

TEST_CASE("wave_derivative: asymmetry applies to the trailing side only") {
  WaveParams p{0.0, 1.0, 0.3, 2.0};
  WaveParams sym{0.0, 1.0, 0.3, 1.0};
  CHECK(wave_derivative(-0.2, p) == wave_derivative(-0.2, sym));
  CHECK(wave_derivative(0.2, p) != wave_derivative(0.2, sym));
}

TEST_CASE("wave set validation") {
  auto set = WaveParameterSet::ecg_defaults();
  set.validate();
  set.waves[2].params.d = 0.1;  // R must stay at zero
  CHECK_THROWS_AS(set.validate(), std::invalid_argument);

  auto ppg = WaveParameterSet::ppg_defaults();
  ppg.validate();
  ppg.waves.pop_back();
  CHECK_THROWS_AS(ppg.validate(), std::invalid_argument);
}

TEST_CASE("gradient_check: analytic identity for symmetric waves") {
  WaveParameterSet single;
  single.modality = Modality::ppg;
  single.waves = {{"Sys", {0.0, 1.0, 0.1, 1.0}}, {"Dias", {0.3, 0.5, 0.4, 1.0}}};
  const auto grid = phi_grid(501);
  CHECK(gradient_check(single, grid) < 1e-6);

  auto ecg = WaveParameterSet::ecg_defaults();
  for (auto& wv : ecg.waves) wv.params.m = 1.0;
  CHECK(gradient_check(ecg, grid) < 1e-6);
}

TEST_CASE("gradient_check: narrowest table width on a fine grid") {
  WaveParameterSet set;
  set.modality = Modality::ppg;
  set.waves = {{"Sys", {-0.2, 1.0, 0.03, 1.0}}, {"Dias", {0.2, 0.8, 0.03, 1.0}}};
  CHECK(gradient_check(set, phi_grid(4001)) < 1e-5);
}

TEST_CASE("gradient_check: rejects asymmetric waves") {
  const auto set = WaveParameterSet::ecg_defaults();  // T has m = 2
  CHECK_THROWS_AS(gradient_check(set, phi_grid(11)), std::invalid_argument);
}

TEST_CASE("synthesize_clean: zero amplitudes give a zero signal") {
  auto set = WaveParameterSet::ecg_defaults();
  for (auto& wv : set.waves) wv.params.a = 0.0;
  const auto clean = synthesize_clean(constant_series(1.0, 5), set, 250.0);
  for (double v : clean.samples) CHECK(v == 0.0);
}

TEST_CASE("synthesize_clean: per-beat argmax is the R event") {
  const auto set = WaveParameterSet::ecg_defaults();
  const auto clean = synthesize_clean(constant_series(1.0, 10), set, 250.0);
  REQUIRE(clean.beat_count() == 10);
  const std::size_t r_idx = 2;  // P Q R S T
  REQUIRE(clean.wave_names[r_idx] == "R");
  for (std::size_t k = 0; k < 10; ++k) {
    const std::size_t lo = clean.beat_boundaries[k];
    const std::size_t hi = clean.beat_boundaries[k + 1];
    const auto it = std::max_element(clean.samples.begin() + lo, clean.samples.begin() + hi);
    const long long argmax = it - clean.samples.begin();
    const long long r_sample = std::llround(clean.events[k].waves[r_idx].peak_time * clean.fs);
    CHECK(std::abs(argmax - r_sample) <= 1);
  }
}

TEST_CASE("synthesize_clean: event ordering follows P Q R S T") {
  const auto set = WaveParameterSet::ecg_defaults();
  const auto clean = synthesize_clean(constant_series(0.9, 4), set, 500.0);
  for (const auto& beat : clean.events) {
    for (std::size_t w = 1; w < beat.waves.size(); ++w)
      CHECK(beat.waves[w].peak_time > beat.waves[w - 1].peak_time);
  }
}

TEST_CASE("synthesize_clean: longer beats render higher amplitudes") {
  const auto set = WaveParameterSet::ecg_defaults();
  const auto slow = synthesize_clean(constant_series(1.2, 6), set, 500.0);
  const auto fast = synthesize_clean(constant_series(0.6, 6), set, 500.0);
  auto p2p = [](const CleanSignal& c, std::size_t beat) {
    const auto lo = c.samples.begin() + c.beat_boundaries[beat];
    const auto hi = c.samples.begin() + c.beat_boundaries[beat + 1];
    return *std::max_element(lo, hi) - *std::min_element(lo, hi);
  };
  for (std::size_t k = 1; k < 5; ++k) CHECK(p2p(slow, k) > p2p(fast, k));
}

TEST_CASE("synthesize_clean: identical beats for constant theta and m = 1") {
  auto set = WaveParameterSet::ecg_defaults();
  for (auto& wv : set.waves) wv.params.m = 1.0;
  const auto clean = synthesize_clean(constant_series(1.0, 6), set, 250.0);
  const std::size_t n = 250;
  double max_abs = 0.0;
  for (double v : clean.samples) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t k = 2; k < 6; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = clean.samples[n + i] - clean.samples[n];
      const double b = clean.samples[k * n + i] - clean.samples[k * n];
      CHECK(std::abs(a - b) <= 1e-9 * max_abs);
    }
  }
}

TEST_CASE("synthesize_clean: doubling amplitudes doubles the samples") {
  auto set = WaveParameterSet::ecg_defaults();
  const auto base = synthesize_clean(constant_series(0.8, 5), set, 500.0);
  for (auto& wv : set.waves) wv.params.a *= 2.0;
  const auto doubled = synthesize_clean(constant_series(0.8, 5), set, 500.0);
  for (std::size_t i = 0; i < base.samples.size(); ++i)
    CHECK(doubled.samples[i] == doctest::Approx(2.0 * base.samples[i]).epsilon(1e-12));
}

TEST_CASE("synthesize_clean: T-wave asymmetry narrows the trailing flank") {
  auto set = WaveParameterSet::ecg_defaults();
  set.waves[4].params.m = 2.0;
  set.waves[4].params.w = 0.2;
  const auto clean = synthesize_clean(constant_series(1.0, 4), set, 500.0);

  const std::size_t beat = 2;
  const std::size_t t_idx = 4;
  const std::size_t t_sample =
      static_cast<std::size_t>(std::llround(clean.events[beat].waves[t_idx].peak_time * clean.fs));
  const double base = clean.samples[clean.beat_boundaries[beat]];
  const double peak = clean.samples[t_sample];
  const double half = base + (peak - base) * 0.5;

  std::size_t left = t_sample;
  while (left > clean.beat_boundaries[beat] && clean.samples[left] > half) --left;
  std::size_t right = t_sample;
  while (right + 1 < clean.beat_boundaries[beat + 1] && clean.samples[right] > half) ++right;
  CHECK(t_sample - left > right - t_sample);
}

TEST_CASE("synthesize_clean: continuity bound on adjacent samples") {
  const auto set = WaveParameterSet::ecg_defaults();
  const auto series = BeatIntervalSeries::from_intervals({0.8, 1.0, 0.7, 1.1, 0.9});
  const auto clean = synthesize_clean(series, set, 500.0);

  double g_max = 0.0;
  for (double x = 0.0; x < 1.0; x += 1e-4) {
    double g = 0.0;
    for (const auto& wv : set.waves) g += wave_derivative_circular(phase_angle(x), wv.params);
    g_max = std::max(g_max, std::abs(g));
  }
  const double bound = g_max / clean.fs * (1.0 + 1e-9);
  for (std::size_t i = 1; i < clean.samples.size(); ++i)
    CHECK(std::abs(clean.samples[i] - clean.samples[i - 1]) <= bound);
}

TEST_CASE("synthesize_clean: sample allocation never drifts more than a sample") {
  const auto set = WaveParameterSet::ecg_defaults();
  BeatIntervalSeries series = BeatIntervalSeries::from_intervals(
      {0.777, 0.913, 1.031, 0.688, 0.805, 0.951, 1.204, 0.633});
  const double fs = 500.0;
  const auto clean = synthesize_clean(series, set, fs);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double boundary_time = static_cast<double>(clean.beat_boundaries[k]) / fs;
    CHECK(std::abs(boundary_time - series.cumulative_times[k]) < 1.0 / fs);
    const long long nk = static_cast<long long>(clean.beat_boundaries[k + 1]) -
                         static_cast<long long>(clean.beat_boundaries[k]);
    CHECK(std::abs(nk - std::llround(series.intervals[k] * fs)) <= 1);
  }
  CHECK(clean.beat_boundaries.back() == clean.samples.size());
}

TEST_CASE("synthesize_clean: PPG stays anchored over many beats") {
  const auto set = WaveParameterSet::ppg_defaults();
  const auto clean = synthesize_clean(constant_series(0.78, 40), set, 125.0);
  auto beat_mean = [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = clean.beat_boundaries[k]; i < clean.beat_boundaries[k + 1]; ++i)
      acc += clean.samples[i];
    return acc / static_cast<double>(clean.beat_boundaries[k + 1] - clean.beat_boundaries[k]);
  };
  const double p2p = *std::max_element(clean.samples.begin(), clean.samples.end()) -
                     *std::min_element(clean.samples.begin(), clean.samples.end());
  CHECK(std::abs(beat_mean(38) - beat_mean(1)) < 0.05 * p2p);
}

TEST_CASE("synthesize_clean: resolution guard") {
  auto set = WaveParameterSet::ecg_defaults();
  set.waves[1].params.w = 0.03;
  const auto series = constant_series(0.5, 4);
  // 0.03 * 0.5 * 250 / (2*pi) < 2 samples per sigma
  CHECK_THROWS_AS(synthesize_clean(series, set, 250.0), GenerationError);

  SynthOptions lenient;
  lenient.strict_resolution = false;
  const auto clean = synthesize_clean(series, set, 250.0, lenient);
  CHECK(!clean.warnings.empty());

  CHECK_THROWS_AS(synthesize_clean(series, set, 20.0), std::invalid_argument);  // fs < 50
}

TEST_CASE("synthesize_clean: detrend removes the linear component") {
  const auto set = WaveParameterSet::ppg_defaults();
  SynthOptions opts;
  opts.detrend = true;
  const auto clean = synthesize_clean(constant_series(0.8, 30), set, 125.0, opts);
  double front = 0.0, back = 0.0;
  const std::size_t w = 200;
  for (std::size_t i = 0; i < w; ++i) {
    front += clean.samples[i];
    back += clean.samples[clean.samples.size() - 1 - i];
  }
  const double p2p = *std::max_element(clean.samples.begin(), clean.samples.end()) -
                     *std::min_element(clean.samples.begin(), clean.samples.end());
  CHECK(std::abs(front - back) / static_cast<double>(w) < 0.2 * p2p);
}
