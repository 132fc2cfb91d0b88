#ifndef BIOSYNTH_RANDOMIZATION_HPP
#define BIOSYNTH_RANDOMIZATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biosynth/beat_intervals.hpp"
#include "biosynth/noise.hpp"
#include "biosynth/rng.hpp"
#include "biosynth/waveform.hpp"

namespace biosynth {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(Rng& rng) const { return lo + (hi - lo) * rng.uniform01(); }
  double at(double u) const { return lo + (hi - lo) * u; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  void validate(const std::string& name) const;
};

struct WaveRanges {
  Range d, a, w;
  std::optional<Range> m;
};

/// Per-parameter uniform randomization limits. Defaults reproduce the
/// model's published parameter table.
struct RandomizationLimits {
  // ECG waves (R location is pinned to 0)
  WaveRanges ecg_p{{-0.18, -0.12}, {0.05, 0.2}, {0.065, 0.085}, {}};
  WaveRanges ecg_q{{-0.05, -0.03}, {-0.2, -0.05}, {0.03, 0.08}, {}};
  WaveRanges ecg_r{{0.0, 0.0}, {0.8, 1.2}, {0.06, 0.085}, {}};
  WaveRanges ecg_s{{0.03, 0.05}, {-0.2, -0.05}, {0.03, 0.08}, {}};
  WaveRanges ecg_t{{0.2, 0.25}, {0.1, 0.6}, {0.085, 0.21}, Range{1.0, 3.0}};

  // PPG waves (sampled jointly from one uniform draw)
  WaveRanges ppg_sys{{-0.32, -0.22}, {0.5, 1.0}, {0.5, 0.9}, {}};
  WaveRanges ppg_dias{{0.06, 0.16}, {0.5, 0.9}, {1.7, 2.1}, {}};

  Range mu{0.4, 1.2};            ///< mean beat interval
  Range gamma_sigma{0.45, 0.55};

  Range noise_alpha{0.005, 0.25};
  Range noise_c{0.0, 0.15};
  Range noise_sigma2{0.0, 0.1};
  Range noise_amplitude{0.1, 1.0};
  Range point_power{1.0, 10.0};  ///< multiple of the base PSD mean power

  Range step_mu_prime{0.3, 2.0};
  Range step_l{0.0, 1.0};
  Range step_tau{1.0, 10.0};

  double step_probability = 0.5;
  double artifact_probability = 0.3;
  double point_frequency_probability = 0.5;
  bool randomize_t_asymmetry = true;

  static RandomizationLimits defaults() { return {}; }
  void validate() const;
};

/// Each ECG parameter drawn independently and uniformly within its range.
WaveParameterSet sample_ecg_params(const RandomizationLimits& limits, std::uint64_t seed);

/// All PPG parameters driven by the same uniform draw u:
/// value = low + u * (high - low) for every range.
WaveParameterSet sample_ppg_params(const RandomizationLimits& limits, std::uint64_t seed);

/// One noise segment of the rendering plan, with everything resolved.
struct NoiseSegmentPlan {
  std::string type;      ///< "model" or a registered recording name
  double duration_s = 0.0;
  double amplitude = 0.0;
  std::optional<NoiseModelParams> model;
  std::optional<double> point_frequency_hz;
  double point_power = 0.0;
  std::uint64_t seed = 0;  ///< spectrum randomization seed
};

struct ArtifactPlan {
  std::string source;
  std::uint64_t seed = 0;
};

struct NoisePlan {
  std::vector<NoiseSegmentPlan> segments;
  std::optional<ArtifactPlan> artifact;
  std::vector<std::string> warnings;
};

/// Draws a single-segment noise plan: uniform choice over the registered
/// measured types plus the model PSD, randomized amplitude, optional mains
/// point frequency, optional artifact. A measured type drawn with no source
/// registered falls back to the model PSD (error in strict mode).
NoisePlan sample_noise_config(const RandomizationLimits& limits,
                              const std::vector<std::string>& measured_types,
                              const std::vector<std::string>& artifact_sources, double fs,
                              double duration_s, std::uint64_t seed, bool strict = false);

/// Optional transition of the pair delay over the recording.
struct DelayStepSpec {
  double delay2_s = 0.0;  ///< target delay after the transition
  double l = 0.5;
  double tau = 2.0;
};

/// Second-signal description for time-synchronized pairs. The second signal
/// runs on the same beat sequence, delayed by delay_s.
struct PairSpec {
  Modality first = Modality::ecg;
  Modality second = Modality::ppg;
  double delay_s = 0.25;
  std::optional<DelayStepSpec> delay_step;

  void validate() const;
};

/// Fully resolved, replayable recipe for one signal. Rendering a recipe
/// touches no randomization stream outside the seeds stored here.
struct SignalRecipe {
  std::uint64_t index = 0;
  Modality modality = Modality::ecg;
  double fs = kDefaultEcgFs;
  double duration_s = 30.0;
  WaveParameterSet waves;
  BeatModel beat;
  std::uint64_t interval_seed = 0;
  std::optional<StepChangeSpec> step;
  NoisePlan noise;
  std::size_t taper_overlap_samples = 0;
  std::optional<PairSpec> pair;
  std::optional<WaveParameterSet> second_waves;
  std::optional<NoisePlan> second_noise;
};

}  // namespace biosynth

#endif
