#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>

#include "biosynth/beat_intervals.hpp"
#include "biosynth/errors.hpp"
#include "biosynth/rng.hpp"

using namespace biosynth;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

BeatModel model_no_gamma(double mu, double beta, double fb) {
  BeatModel m;
  m.mu = mu;
  m.beta = beta;
  m.breathing_hz = fb;
  m.gamma.reset();
  return m;
}

}  // namespace

TEST_CASE("gamma: zero innovations give a zero series") {
  GammaParams p;
  p.sigma = 0.0;
  const auto g = generate_gamma(100, p, 42);
  REQUIRE(g.size() == 100);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("gamma: b = 0 kills the feedback, y is iid N(0, sigma^2)") {
  GammaParams p;
  p.b = 0.0;
  p.sigma = 0.5;
  std::vector<double> y;
  generate_gamma(20000, p, 7, &y);

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size() - 1);

  // sample variance of N(0, 0.25) has standard error 0.25*sqrt(2/(n-1))
  const double se = 0.25 * std::sqrt(2.0 / static_cast<double>(y.size() - 1));
  CHECK(std::abs(var - 0.25) < 3.0 * se);

  // autocorrelation at small lags stays within 3 standard errors of zero
  for (std::size_t lag = 1; lag <= 5; ++lag) {
    double acc = 0.0;
    for (std::size_t i = lag; i < y.size(); ++i) acc += (y[i] - mean) * (y[i - lag] - mean);
    const double rho = acc / (var * static_cast<double>(y.size() - lag));
    CHECK(std::abs(rho) < 3.0 / std::sqrt(static_cast<double>(y.size())));
  }
}

TEST_CASE("gamma: rejects bad arguments") {
  GammaParams p;
  CHECK_THROWS_AS(generate_gamma(0, p, 1), std::invalid_argument);
  p.a = 1.0;
  CHECK_THROWS_AS(generate_gamma(10, p, 1), std::invalid_argument);
  p.a = 1.02;
  p.sigma = -0.1;
  CHECK_THROWS_AS(generate_gamma(10, p, 1), std::invalid_argument);
}

TEST_CASE("gamma: deterministic per seed") {
  GammaParams p;
  const auto a = generate_gamma(5000, p, 99);
  const auto b = generate_gamma(5000, p, 99);
  CHECK(a == b);
  const auto c = generate_gamma(5000, p, 100);
  CHECK(a != c);
}

TEST_CASE("intervals: constant model") {
  const auto series = generate_intervals(model_no_gamma(1.0, 0.0, 0.28),
                                         GenerationSpan::beats(50), 3);
  REQUIRE(series.size() == 50);
  for (double v : series.intervals) CHECK(v == 1.0);
}

TEST_CASE("intervals: breathing bounds and exact first beat") {
  const auto series = generate_intervals(model_no_gamma(1.0, 0.1, 0.28),
                                         GenerationSpan::beats(200), 11);
  CHECK(series.intervals[0] == 1.0);  // sin(0) = 0
  for (double v : series.intervals) {
    CHECK(v >= 0.9);
    CHECK(v <= 1.1);
  }
}

TEST_CASE("intervals: cumulative differences reproduce the intervals exactly") {
  BeatModel m;
  m.mu = 0.8;
  const auto series = generate_intervals(m, GenerationSpan::beats(500), 5);
  REQUIRE(series.cumulative_times.size() == series.size() + 1);
  CHECK(series.cumulative_times[0] == 0.0);
  for (std::size_t i = 0; i < series.size(); ++i)
    CHECK(series.cumulative_times[i + 1] - series.cumulative_times[i] == series.intervals[i]);
}

TEST_CASE("intervals: breathing frequency shows up in the resampled spectrum") {
  // independent oracle: resample the interval series onto a uniform grid and
  // locate the periodogram peak with a direct DFT
  const double fb = 0.28;
  const auto series = generate_intervals(model_no_gamma(0.8, 0.1, fb),
                                         GenerationSpan::beats(200), 17);

  const double dt = 0.25;
  std::vector<double> grid;
  for (double t = series.cumulative_times[1]; t <= series.total_duration(); t += dt)
    grid.push_back(t);

  std::vector<double> resampled(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const auto it = std::lower_bound(series.cumulative_times.begin() + 1,
                                     series.cumulative_times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - series.cumulative_times.begin());
    const std::size_t idx = std::min(k - 1, series.size() - 1);
    resampled[i] = series.intervals[idx];
  }
  double mean = 0.0;
  for (double v : resampled) mean += v;
  mean /= static_cast<double>(resampled.size());

  const std::size_t n = resampled.size();
  const double bin = 1.0 / (static_cast<double>(n) * dt);
  double best_f = 0.0, best_p = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * bin;
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = -2.0 * 3.14159265358979323846 * f * (static_cast<double>(i) * dt);
      acc += (resampled[i] - mean) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    if (std::norm(acc) > best_p) {
      best_p = std::norm(acc);
      best_f = f;
    }
  }
  CHECK(std::abs(best_f - fb) <= bin + 1e-12);
}

TEST_CASE("intervals: parameter validation") {
  CHECK_THROWS_AS(generate_intervals(model_no_gamma(0.0, 0.0, 0.28), GenerationSpan::beats(5), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_intervals(model_no_gamma(0.5, 0.5, 0.28), GenerationSpan::beats(5), 1),
                  std::invalid_argument);  // beta >= mu
}

TEST_CASE("step change: mu_prime == mu reproduces generate_intervals exactly") {
  BeatModel m;
  m.mu = 0.8;
  StepChangeSpec spec;
  spec.mu_prime = 0.8;
  spec.l = 0.5;
  spec.tau_input = 2.0;

  const auto plain = generate_intervals(m, GenerationSpan::duration(60.0), 21);
  const auto stepped = apply_step_change(m, spec, 60.0, 21);
  CHECK(plain.intervals == stepped.intervals);

  BeatModel flat = model_no_gamma(0.8, 0.0, 0.28);
  const auto constant = apply_step_change(flat, spec, 30.0, 4);
  for (double v : constant.intervals) CHECK(v == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("step change: sigmoid midpoint at the transition center") {
  // T, l and mu chosen so the center d = l*T/mu is an integer beat index
  BeatModel m = model_no_gamma(1.0, 0.0, 0.28);
  StepChangeSpec spec;
  spec.mu_prime = 1.4;
  spec.l = 50.0 / 120.0;
  spec.tau_input = 2.0;
  const auto series = apply_step_change(m, spec, 120.0, 1);
  // beat i = 50 carries exactly half the change (1-based index)
  CHECK(series.intervals[49] == doctest::Approx(1.0 + 0.4 * 0.5).epsilon(1e-9));
}

TEST_CASE("step change: five-beat transition fractions match the calibration") {
  BeatModel m = model_no_gamma(1.0, 0.0, 0.28);
  const double expected[] = {0.995, 0.905, 0.762};
  const double tolerance[] = {0.002, 0.005, 0.005};
  for (int tau = 1; tau <= 3; ++tau) {
    StepChangeSpec spec;
    spec.mu_prime = 1.5;
    spec.l = 10.5 / 101.0;  // center lands between beats 10 and 11
    spec.tau_input = static_cast<double>(tau);
    const auto series = apply_step_change(m, spec, 101.0, 1);
    // beats 8 and 13 sit 2.5 beats either side of the center
    const double fraction = (series.intervals[12] - series.intervals[7]) / 0.5;
    CHECK(std::abs(fraction - expected[tau - 1]) < tolerance[tau - 1]);
  }
}

TEST_CASE("step change: monotone under beta=0, gamma off, mu_prime > mu") {
  BeatModel m = model_no_gamma(0.6, 0.0, 0.28);
  StepChangeSpec spec;
  spec.mu_prime = 1.1;
  spec.l = 0.5;
  spec.tau_input = 3.0;
  const auto series = apply_step_change(m, spec, 90.0, 2);
  // nondecreasing up to the one-ulp noise of the cumulative-difference storage
  for (std::size_t i = 1; i < series.size(); ++i)
    CHECK(series.intervals[i] >= series.intervals[i - 1] - 1e-12);
}

TEST_CASE("step change: rejects bad specs") {
  BeatModel m = model_no_gamma(0.8, 0.0, 0.28);
  StepChangeSpec spec;
  spec.mu_prime = 0.0;
  CHECK_THROWS_AS(apply_step_change(m, spec, 30.0, 1), std::invalid_argument);
  spec.mu_prime = 0.5;
  spec.l = 1.5;
  CHECK_THROWS_AS(apply_step_change(m, spec, 30.0, 1), std::invalid_argument);
}

TEST_CASE("duration span: cumulative time reaches the target") {
  BeatModel m;
  const auto series = generate_intervals(m, GenerationSpan::duration(45.0), 9);
  CHECK(series.total_duration() >= 45.0);
  CHECK(series.total_duration() < 45.0 + 3.0);  // at most one overshoot beat
}

TEST_CASE("interval floor clamps and counts") {
  BeatModel m;
  m.mu = 0.25;
  m.beta = 0.1;
  m.gamma.reset();
  const auto series = generate_intervals(m, GenerationSpan::beats(100), 3);
  for (double v : series.intervals) CHECK(v >= kIntervalFloor - 1e-12);
  CHECK(series.clamp_count > 0);
}

TEST_CASE("load_intervals: plain file") {
  const auto path = write_temp("bs_iv_plain.txt", "1.0\n1.0\n1.0\n");
  const auto series = load_intervals(path, IntervalFileKind::intervals, true);
  CHECK(series.intervals == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("load_intervals: header line and CSV column tolerated") {
  const auto path = write_temp("bs_iv_header.csv", "interval_s\n0.8,x\n0.9\n");
  const auto series = load_intervals(path, IntervalFileKind::intervals, true);
  REQUIRE(series.size() == 2);
  CHECK(series.intervals[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(series.intervals[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("load_intervals: zero interval errors in strict mode, drops in lenient") {
  const auto path = write_temp("bs_iv_zero.txt", "0.8\n0.0\n0.9\n");
  CHECK_THROWS_AS(load_intervals(path, IntervalFileKind::intervals, true), GenerationError);

  IntervalLoadReport report;
  const auto series = load_intervals(path, IntervalFileKind::intervals, false, &report);
  REQUIRE(series.size() == 2);
  CHECK(series.intervals[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(series.intervals[1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(report.dropped == 1);
  CHECK(report.warnings.size() == 1);
}

TEST_CASE("load_intervals: annotation times become first differences") {
  const auto path = write_temp("bs_iv_ann.txt", "0.0\n0.8\n1.7\n");
  const auto series = load_intervals(path, IntervalFileKind::annotation_times, true);
  REQUIRE(series.size() == 2);
  CHECK(series.intervals[0] == doctest::Approx(0.8));
  CHECK(series.intervals[1] == doctest::Approx(0.9));
}

TEST_CASE("load_intervals: malformed and missing files") {
  const auto path = write_temp("bs_iv_bad.txt", "0.8\nnot_a_number\n");
  CHECK_THROWS_AS(load_intervals(path, IntervalFileKind::intervals, false), IoError);
  CHECK_THROWS_AS(load_intervals("/nonexistent/file.txt", IntervalFileKind::intervals, false),
                  IoError);
  const auto empty = write_temp("bs_iv_empty.txt", "\n");
  CHECK_THROWS_AS(load_intervals(empty, IntervalFileKind::intervals, false), GenerationError);
}

TEST_CASE("determinism: identical seed and parameters give identical series") {
  BeatModel m;
  const auto a = generate_intervals(m, GenerationSpan::duration(120.0), 77);
  const auto b = generate_intervals(m, GenerationSpan::duration(120.0), 77);
  CHECK(a.intervals == b.intervals);
  CHECK(a.cumulative_times == b.cumulative_times);
}
