#ifndef BIOSYNTH_WAVEFORM_HPP
#define BIOSYNTH_WAVEFORM_HPP

#include <span>
#include <string>
#include <vector>

#include "biosynth/beat_intervals.hpp"

namespace biosynth {

enum class Modality { ecg, ppg };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

inline constexpr double kDefaultEcgFs = 250.0;
inline constexpr double kDefaultPpgFs = 125.0;

/// One Gaussian-derivative wave.
///
/// d places the peak at phase fraction (1 + d)/2 of the beat, so negative d
/// renders before mid-beat. w is the Gaussian width in phase radians. m > 1
/// compresses the trailing flank only, producing a left-skewed wave.
struct WaveParams {
  double d = 0.0;
  double a = 1.0;
  double w = 0.1;
  double m = 1.0;

  void validate() const;
};

struct NamedWave {
  std::string name;
  WaveParams params;
};

/// The per-modality wave set: ECG has exactly P, Q, R, S, T (R anchored at
/// d = 0); PPG has exactly Sys, Dias.
struct WaveParameterSet {
  Modality modality = Modality::ecg;
  std::vector<NamedWave> waves;

  /// Midpoints of the default randomization ranges.
  static WaveParameterSet ecg_defaults();
  static WaveParameterSet ppg_defaults();

  const WaveParams* find(const std::string& name) const;
  void validate() const;
};

/// Peak time plus the label window of one wave within one beat (seconds).
struct WaveEvent {
  double peak_time = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
};

struct BeatEvents {
  std::vector<WaveEvent> waves;  // aligned with WaveParameterSet::waves
};

/// Clean (noise-free) sampled signal with exact per-beat event times.
struct CleanSignal {
  std::vector<double> samples;
  double fs = 0.0;
  Modality modality = Modality::ecg;
  std::vector<std::string> wave_names;
  std::vector<BeatEvents> events;            // one entry per beat
  std::vector<std::size_t> beat_boundaries;  // sample index per beat start, plus end
  std::vector<double> beat_start_times;      // exact series times (seconds)
  std::vector<std::string> warnings;

  std::size_t beat_count() const { return events.size(); }
};

/// Sawtooth phase fraction x(t) in [0, 1]: position of t within its beat.
double phase_ramp(double t, const BeatIntervalSeries& series);

/// phi(x) = 2*pi*x - pi.
inline double phase_angle(double x) { return 2.0 * 3.14159265358979323846 * x - 3.14159265358979323846; }

/// Derivative of one skewed Gaussian wave at phase angle phi:
///   g = -(2*pi*m_eff*a*psi / w^2) * exp(-m_eff*psi^2 / (2*w^2))
/// with psi = phi - d*pi and m_eff = m on the trailing side (psi > 0) only.
double wave_derivative(double phi, const WaveParams& p);

/// Same derivative evaluated on the beat circle: psi is wrapped into
/// [-pi, pi) and the Gaussian is periodized so broad waves stay continuous
/// across beat boundaries. Identical to wave_derivative for narrow waves.
double wave_derivative_circular(double phi, const WaveParams& p);

struct SynthOptions {
  /// When true, fs too low to resolve the narrowest wave is an error;
  /// otherwise it is recorded as a warning on the output.
  bool strict_resolution = true;
  /// Remove the per-signal linear trend after integration (off by default).
  bool detrend = false;
};

/// Renders the summed circular wave derivatives through a cumulative
/// trapezoid integral at sampling rate fs. Each beat is allocated
/// round(theta_i * fs) samples with a carried remainder so the rendered
/// duration never drifts more than one sample from the series time.
CleanSignal synthesize_clean(const BeatIntervalSeries& series, const WaveParameterSet& params,
                             double fs, const SynthOptions& options = {});

/// Max relative error between the rendered derivative and a central finite
/// difference of the corresponding Gaussian sum over the phase grid.
/// Requires m == 1 for every wave.
double gradient_check(const WaveParameterSet& params, std::span<const double> phi_grid,
                      double step = 1e-6);

}  // namespace biosynth

#endif
