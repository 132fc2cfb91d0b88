#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biosynth/errors.hpp"
#include "biosynth/noise.hpp"
#include "biosynth/rng.hpp"

using namespace biosynth;

namespace {

std::vector<double> fft_grid(std::size_t n, double fs) {
  std::vector<double> grid;
  for (std::size_t k = 1; k <= n / 2; ++k)
    grid.push_back(static_cast<double>(k) * fs / static_cast<double>(n));
  return grid;
}

double band_mean(const PsdSpec& psd, double lo, double hi) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
    if (psd.freqs[i] > lo && psd.freqs[i] <= hi) {
      acc += psd.powers[i];
      ++count;
    }
  }
  return count ? acc / static_cast<double>(count) : 0.0;
}

}  // namespace

TEST_CASE("model_psd: flat cases") {
  const auto grid = fft_grid(1000, 250.0);

  NoiseModelParams white{0.5, 0.0, 1.0};
  const auto psd_white = model_psd(grid, white, 250.0);
  for (double p : psd_white.powers) CHECK(p == doctest::Approx(1.0));

  // alpha = 0 collapses the 1/f part to the constant c
  NoiseModelParams degenerate{0.0, 0.4, 0.1};
  const auto psd_flat = model_psd(grid, degenerate, 250.0);
  for (double p : psd_flat.powers) CHECK(p == doctest::Approx(0.5));
}

TEST_CASE("model_psd: 1/f ratio survives the normalization") {
  NoiseModelParams params{1.0, 1.0, 0.0};
  const auto psd = model_psd({1.0, 2.0}, params, 6.0);
  CHECK(psd.powers[0] / psd.powers[1] == doctest::Approx(2.0));
}

TEST_CASE("model_psd: rejects nonpositive frequencies and bad parameters") {
  CHECK_THROWS_AS(model_psd({0.0, 1.0}, NoiseModelParams{}, 4.0), std::invalid_argument);
  NoiseModelParams bad;
  bad.alpha = 6.0;
  CHECK_THROWS_AS(model_psd({1.0}, bad, 4.0), std::invalid_argument);
}

TEST_CASE("welch: white noise estimate is flat band-wise") {
  Rng rng(5);
  std::vector<double> x(15000);
  for (auto& v : x) v = rng.normal();
  const double fs = 250.0;
  const auto psd = welch_psd(x, fs);
  const double nyq = fs / 2.0;
  const double full = band_mean(psd, 0.0, nyq);
  for (int b = 0; b < 4; ++b) {
    const double m = band_mean(psd, nyq * b / 4.0, nyq * (b + 1) / 4.0);
    CHECK(m / full > 0.8);
    CHECK(m / full < 1.25);
  }
}

TEST_CASE("welch: pure sinusoid peaks at its frequency") {
  const double fs = 250.0;
  std::vector<double> x(8192);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * 3.14159265358979323846 * 50.0 * static_cast<double>(i) / fs);
  const auto psd = welch_psd(x, fs);
  const auto it = std::max_element(psd.powers.begin(), psd.powers.end());
  const double f_peak = psd.freqs[static_cast<std::size_t>(it - psd.powers.begin())];
  CHECK(std::abs(f_peak - 50.0) <= fs / 1024.0 + 1e-12);
}

TEST_CASE("welch: Parseval within 5 percent for white noise") {
  Rng rng(11);
  std::vector<double> x(30000);
  for (auto& v : x) v = rng.normal();
  const double fs = 250.0;
  const auto psd = welch_psd(x, fs);
  const double df = fs / 1024.0;
  const double integral = std::accumulate(psd.powers.begin(), psd.powers.end(), 0.0) * df;
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  CHECK(std::abs(integral - var) / var < 0.05);
}

TEST_CASE("welch: input validation") {
  std::vector<double> x(100, 0.0);
  CHECK_THROWS_AS(welch_psd(x, 250.0), std::invalid_argument);  // too short
  std::vector<double> y(4096, 0.0);
  WelchOptions odd;
  odd.segment_length = 1023;
  CHECK_THROWS_AS(welch_psd(y, 250.0, odd), std::invalid_argument);
}

TEST_CASE("add_point_frequency: changes exactly one bin") {
  const auto grid = fft_grid(2000, 250.0);
  const auto base = model_psd(grid, NoiseModelParams{0.0, 0.0, 1.0}, 250.0);

  const auto same = add_point_frequency(base, 50.0, 0.0);
  CHECK(same.powers == base.powers);

  const auto spiked = add_point_frequency(base, 50.0, 40.0);
  std::size_t changed = 0;
  std::size_t changed_idx = 0;
  for (std::size_t i = 0; i < base.powers.size(); ++i) {
    if (spiked.powers[i] != base.powers[i]) {
      ++changed;
      changed_idx = i;
    }
  }
  CHECK(changed == 1);
  CHECK(std::abs(spiked.freqs[changed_idx] - 50.0) <= 250.0 / 2000.0);
  const auto it = std::max_element(spiked.powers.begin(), spiked.powers.end());
  CHECK(static_cast<std::size_t>(it - spiked.powers.begin()) == changed_idx);

  CHECK_THROWS_AS(add_point_frequency(base, 125.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(add_point_frequency(base, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("synthesize_noise: zero PSD gives zeros") {
  const auto grid = fft_grid(1024, 250.0);
  PsdSpec psd;
  psd.freqs = grid;
  psd.powers.assign(grid.size(), 0.0);
  psd.fs = 250.0;
  const auto x = synthesize_noise(psd, 1024, 9);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("synthesize_noise: spectrum symmetry is exact and DC is pinned") {
  const std::size_t n = 4096;
  const double fs = 250.0;
  const auto psd = model_psd(fft_grid(n, fs), NoiseModelParams{1.0, 1.0, 0.1}, fs);
  const auto spectrum = build_noise_spectrum(psd, n, 31);
  REQUIRE(spectrum.size() == n);
  CHECK(spectrum[0] == std::complex<double>(0.0, 0.0));
  CHECK(spectrum[n / 2].imag() == 0.0);
  for (std::size_t k = 1; k < n / 2; ++k) CHECK(spectrum[n - k] == std::conj(spectrum[k]));

  const auto x = synthesize_noise(psd, n, 31);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  CHECK(std::abs(mean) < 5.0 * std::sqrt(var / static_cast<double>(n)));
}

TEST_CASE("synthesize_noise: flat PSD round trip within 25 percent per band") {
  const std::size_t n = 15000;
  const double fs = 250.0;
  const auto psd = model_psd(fft_grid(n, fs), NoiseModelParams{0.0, 0.0, 1.0}, fs);

  std::vector<double> avg;
  std::vector<double> freqs;
  const int n_seeds = 10;
  for (int seed = 0; seed < n_seeds; ++seed) {
    const auto x = synthesize_noise(psd, n, 100 + static_cast<std::uint64_t>(seed));
    const auto est = welch_psd(x, fs);
    if (avg.empty()) {
      avg.assign(est.powers.begin(), est.powers.end());
      freqs = est.freqs;
    } else {
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += est.powers[i];
    }
  }
  for (auto& v : avg) v /= n_seeds;
  PsdSpec est;
  est.freqs = freqs;
  est.powers = avg;
  est.fs = fs;
  const double nyq = fs / 2.0;
  for (int b = 0; b < 4; ++b) {
    const double m = band_mean(est, nyq * b / 4.0, nyq * (b + 1) / 4.0);
    CHECK(std::abs(m - 1.0) < 0.25);
  }
}

TEST_CASE("synthesize_noise: point-augmented PSD round-trips to a peak at f0") {
  const std::size_t n = 15000;
  const double fs = 250.0;
  auto psd = model_psd(fft_grid(n, fs), NoiseModelParams{0.0, 0.0, 1.0}, fs);
  const double f0 = 50.0;
  psd = add_point_frequency(psd, f0, 400.0);

  std::vector<double> avg;
  std::vector<double> freqs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto est = welch_psd(synthesize_noise(psd, n, 500 + seed), fs);
    if (avg.empty()) {
      avg.assign(est.powers.begin(), est.powers.end());
      freqs = est.freqs;
    } else {
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += est.powers[i];
    }
  }
  const auto it = std::max_element(avg.begin(), avg.end());
  const double f_peak = freqs[static_cast<std::size_t>(it - avg.begin())];
  CHECK(std::abs(f_peak - f0) <= fs / 1024.0 + 1e-12);
}

TEST_CASE("synthesize_noise: variance integrates the PSD") {
  const std::size_t n = 20000;
  const double fs = 250.0;
  const auto psd = model_psd(fft_grid(n, fs), NoiseModelParams{0.0, 0.0, 1.0}, fs);
  const auto x = synthesize_noise(psd, n, 5);
  double var = 0.0;
  for (double v : x) var += v * v;
  var /= static_cast<double>(n);
  CHECK(var == doctest::Approx(fs / 2.0).epsilon(0.05));
}

TEST_CASE("synthesize_noise: grid mismatch interpolates, strict mode rejects") {
  PsdSpec coarse;
  coarse.freqs = {1.0, 10.0, 50.0, 100.0};
  coarse.powers = {4.0, 2.0, 1.0, 0.5};
  coarse.fs = 250.0;
  const auto x = synthesize_noise(coarse, 5000, 77);
  CHECK(x.size() == 5000);

  NoiseSynthOptions strict;
  strict.strict_grid = true;
  CHECK_THROWS_AS(synthesize_noise(coarse, 5000, 77, strict), GenerationError);
}

TEST_CASE("synthesize_noise: deterministic per seed") {
  const auto psd = model_psd(fft_grid(2048, 125.0), NoiseModelParams{0.5, 0.5, 0.1}, 125.0);
  CHECK(synthesize_noise(psd, 2048, 3) == synthesize_noise(psd, 2048, 3));
  CHECK(synthesize_noise(psd, 2048, 3) != synthesize_noise(psd, 2048, 4));
}

TEST_CASE("scale_noise: exact standard deviation") {
  Rng rng(8);
  std::vector<double> x(5000);
  for (auto& v : x) v = rng.normal() * 3.7 + 1.1;

  const auto zeros = scale_noise(x, 0.0);
  for (double v : zeros) CHECK(v == 0.0);

  auto sd = [](const std::vector<double>& v) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double u : v) var += (u - mean) * (u - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
  };
  CHECK(sd(scale_noise(x, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd(scale_noise(x, 0.3)) == doctest::Approx(0.3).epsilon(1e-12));

  std::vector<double> flat(100, 2.0);
  CHECK_THROWS_AS(scale_noise(flat, 1.0), std::invalid_argument);
}

TEST_CASE("add_artifact: forced zero strength leaves the signal unchanged") {
  std::vector<double> signal(1000, 0.5);
  ArtifactSource src;
  src.name = "test";
  src.fs = 250.0;
  Rng rng(3);
  src.samples.resize(600);
  for (auto& v : src.samples) v = rng.normal();

  ArtifactOptions opts;
  opts.forced_strength = 0.0;
  const auto before = signal;
  const auto span = add_artifact(signal, src, 250.0, 12, opts);
  CHECK(signal == before);
  CHECK(span.end > span.start);
}

TEST_CASE("add_artifact: constant-zero source changes nothing but labels a span") {
  std::vector<double> signal(1000, 0.25);
  ArtifactSource src;
  src.name = "zeros";
  src.fs = 250.0;
  src.samples.assign(600, 0.0);
  const auto before = signal;
  const auto span = add_artifact(signal, src, 250.0, 4);
  CHECK(signal == before);
  CHECK(span.end > span.start);
  CHECK(span.strength >= 0.1);
  CHECK(span.strength <= 1.0);
}

TEST_CASE("add_artifact: bounded by the strength") {
  std::vector<double> signal(2000, 0.0);
  for (std::size_t i = 0; i < signal.size(); ++i)
    signal[i] = 0.5 + 0.5 * std::sin(static_cast<double>(i) * 0.01);
  const double max_before = *std::max_element(signal.begin(), signal.end());

  ArtifactSource src;
  src.name = "bumpy";
  src.fs = 250.0;
  Rng rng(6);
  src.samples.resize(800);
  for (auto& v : src.samples) v = rng.normal();

  const auto span = add_artifact(signal, src, 250.0, 99);
  const double max_after = *std::max_element(signal.begin(), signal.end());
  CHECK(max_after <= max_before + span.strength + 1e-12);
}

TEST_CASE("add_artifact: deterministic per seed, source too short rejected") {
  ArtifactSource src;
  src.name = "short";
  src.fs = 250.0;
  src.samples.assign(10, 1.0);
  std::vector<double> signal(1000, 0.0);
  CHECK_THROWS_AS(add_artifact(signal, src, 250.0, 1), GenerationError);

  ArtifactSource ok;
  ok.name = "ok";
  ok.fs = 250.0;
  Rng rng(9);
  ok.samples.resize(700);
  for (auto& v : ok.samples) v = rng.normal();
  std::vector<double> s1(1000, 0.1), s2(1000, 0.1);
  const auto a = add_artifact(s1, ok, 250.0, 5);
  const auto b = add_artifact(s2, ok, 250.0, 5);
  CHECK(s1 == s2);
  CHECK(a.start == b.start);
  CHECK(a.strength == b.strength);
}

TEST_CASE("welch: estimates from two halves of a stationary record agree") {
  Rng rng(23);
  std::vector<double> x(60000);
  for (auto& v : x) v = rng.normal();
  const double fs = 250.0;
  const auto first = welch_psd(std::span(x).subspan(0, 30000), fs);
  const auto second = welch_psd(std::span(x).subspan(30000), fs);
  const double nyq = fs / 2.0;
  for (int b = 0; b < 4; ++b) {
    const double m1 = band_mean(first, nyq * b / 4.0, nyq * (b + 1) / 4.0);
    const double m2 = band_mean(second, nyq * b / 4.0, nyq * (b + 1) / 4.0);
    CHECK(m1 / m2 > 0.9);
    CHECK(m1 / m2 < 1.1);
  }
}

TEST_CASE("psd validation") {
  PsdSpec bad;
  bad.freqs = {1.0, 1.0};
  bad.powers = {1.0, 1.0};
  bad.fs = 10.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.freqs = {1.0, 2.0};
  bad.powers = {-1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
