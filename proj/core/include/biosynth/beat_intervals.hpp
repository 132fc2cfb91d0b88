#ifndef BIOSYNTH_BEAT_INTERVALS_HPP
#define BIOSYNTH_BEAT_INTERVALS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace biosynth {

/// Beat intervals are never allowed below this floor (seconds); clamps are
/// counted on the series.
inline constexpr double kIntervalFloor = 0.2;

/// Parameters of the long-range-correlated interval fluctuation.
///
/// The recursion draws correlation lengths k_i >= 6 from a Pareto
/// distribution with minimum 6 and shape `a` (floored to an integer).
struct GammaParams {
  double a = 1.02;      ///< Pareto shape; must be > 1 so the mean exists
  double b = 0.075;     ///< feedback coefficient
  double sigma = 0.5;   ///< innovation standard deviation (seconds)
  double scale = 0.05;  ///< output multiplier

  void validate() const;
};

/// Ordered beat-to-beat intervals plus their running sum.
/// cumulative_times has size() + 1 entries and starts at exactly 0;
/// intervals are stored as the exact floating-point differences of the
/// cumulative grid, so cumulative_times[i+1] - cumulative_times[i] ==
/// intervals[i] holds bit-exactly (individual values may sit one ulp of the
/// cumulative time away from the model formula).
struct BeatIntervalSeries {
  std::vector<double> intervals;
  std::vector<double> cumulative_times;
  std::size_t clamp_count = 0;  ///< how many intervals hit kIntervalFloor

  std::size_t size() const { return intervals.size(); }
  bool empty() const { return intervals.empty(); }
  double total_duration() const { return cumulative_times.empty() ? 0.0 : cumulative_times.back(); }

  static BeatIntervalSeries from_intervals(std::vector<double> intervals);
  void validate() const;
};

/// Step change in the mean interval: transition centered at relative
/// location l of the signal, with user-scale transition length tau_input.
struct StepChangeSpec {
  double mu_prime = 0.6;   ///< target mean interval (seconds)
  double l = 0.5;          ///< relative location in [0, 1]
  double tau_input = 1.0;  ///< transition length, user scale

  void validate() const;
};

/// Maps the user transition length onto the sigmoid argument scale so that
/// 99.5% / 90.5% / 76.2% of the change falls within five beats for
/// tau_input 1 / 2 / 3.
double effective_tau(double tau_input);

/// Mean interval, respiratory modulation, and optional long-range component.
struct BeatModel {
  double mu = 0.8;            ///< mean beat interval (seconds)
  double beta = 0.1;          ///< breathing coefficient (seconds)
  double breathing_hz = 0.28; ///< respiratory frequency
  std::optional<GammaParams> gamma = GammaParams{};

  void validate() const;
};

/// Target length of a generated series: a fixed beat count, or generation
/// until the cumulative time reaches a duration (overshooting by one beat).
struct GenerationSpan {
  static GenerationSpan beats(std::size_t n);
  static GenerationSpan duration(double seconds);

  std::size_t beat_count = 0;  // 0 means duration-driven
  double seconds = 0.0;
};

/// Long-range-correlated fluctuation series gamma_1..gamma_n.
///
/// y_i = x_i * sqrt(1 + (b/k_i) * sum of the previous k_i squared y),
/// x_i ~ N(0, sigma^2), k_i ~ floor(Pareto(6, a)), and gamma_i is `scale`
/// times the sum of all y_j still active at beat i (y_j stays active for
/// k_j beats). Terms before the start of the series contribute zero.
/// When y_out is given it receives the underlying y series.
std::vector<double> generate_gamma(std::size_t n, const GammaParams& params, std::uint64_t seed,
                                   std::vector<double>* y_out = nullptr);

/// theta_i = mu + beta*sin(2*pi*f_b*t_{i-1}) + gamma_i, clamped at the floor.
BeatIntervalSeries generate_intervals(const BeatModel& model, const GenerationSpan& span,
                                      std::uint64_t seed);

/// Same as generate_intervals plus a sigmoid transition of the mean from
/// mu to spec.mu_prime. With spec.mu_prime == mu the output is identical to
/// generate_intervals for the same seed.
BeatIntervalSeries apply_step_change(const BeatModel& model, const StepChangeSpec& spec,
                                     double total_duration, std::uint64_t seed);

enum class IntervalFileKind {
  intervals,         ///< one interval (seconds) per line
  annotation_times,  ///< cumulative event times; intervals are first differences
};

struct IntervalLoadReport {
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

/// Reads a beat-interval file (plain text / CSV, one value per line,
/// optional non-numeric header). Out-of-range intervals (< 0.2 s or > 3 s)
/// are errors in strict mode, dropped with a warning otherwise.
BeatIntervalSeries load_intervals(const std::filesystem::path& path, IntervalFileKind kind,
                                  bool strict, IntervalLoadReport* report = nullptr);

}  // namespace biosynth

#endif
