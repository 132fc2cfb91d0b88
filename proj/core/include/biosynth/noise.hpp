#ifndef BIOSYNTH_NOISE_HPP
#define BIOSYNTH_NOISE_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace biosynth {

enum class PsdProvenance { model, estimated };

/// One-sided power spectral density on an ascending positive frequency grid.
struct PsdSpec {
  std::vector<double> freqs;   // Hz, strictly increasing, 0 < f <= fs/2
  std::vector<double> powers;  // units^2/Hz, >= 0
  double fs = 0.0;
  PsdProvenance provenance = PsdProvenance::model;

  void validate() const;
};

/// 1/f + white noise PSD model. alpha/c/sigma2 hard validity bounds are
/// [0,5], [0,2], [0,2]; the narrower randomization defaults live in
/// RandomizationLimits.
struct NoiseModelParams {
  double alpha = 0.1;
  double c = 0.05;
  double sigma2 = 0.05;

  void validate() const;
};

/// PSD(f) = (c / f^alpha) / Pbar + sigma2, with Pbar the mean of 1/f^alpha
/// over the grid, so the 1/f and white parts scale independently.
PsdSpec model_psd(const std::vector<double>& freqs, const NoiseModelParams& params, double fs);

struct WelchOptions {
  std::size_t segment_length = 1024;
  double overlap_fraction = 0.5;
};

/// Welch averaged modified periodogram (Hann window, per-segment mean
/// removal, one-sided density scaling). The DC bin is dropped.
PsdSpec welch_psd(std::span<const double> signal, double fs, const WelchOptions& options = {});

/// Adds `power` to the PSD bin nearest f0; all other bins unchanged.
PsdSpec add_point_frequency(PsdSpec psd, double f0, double power);

struct NoiseSynthOptions {
  bool strict_grid = false;        ///< error instead of interpolating a mismatched grid
  bool log_interpolation = false;  ///< interpolate the PSD in log space
};

/// Full complex spectrum used by synthesize_noise: positive bins carry
/// sqrt(PSD)*z*scale with z complex standard Gaussian, negative bins are the
/// exact conjugate mirror, DC is zero, and an even-length Nyquist bin is
/// real with its mirror power folded in.
std::vector<std::complex<double>> build_noise_spectrum(const PsdSpec& psd, std::size_t n_samples,
                                                       std::uint64_t seed,
                                                       const NoiseSynthOptions& options = {});

/// Gaussian spectral synthesis: inverse FFT of build_noise_spectrum, scaled
/// so the Welch re-estimate of the output matches the input PSD in
/// expectation. The residual imaginary part must stay below 1e-9 relative.
std::vector<double> synthesize_noise(const PsdSpec& psd, std::size_t n_samples,
                                     std::uint64_t seed, const NoiseSynthOptions& options = {});

/// noise * amplitude / std(noise); the output standard deviation equals
/// `amplitude` exactly. Zero-variance input is an error.
std::vector<double> scale_noise(std::span<const double> noise, double amplitude);

/// A recorded noise signal usable as an artifact or measured-noise source.
struct ArtifactSource {
  std::string name;
  std::vector<double> samples;
  double fs = 0.0;
};

struct ArtifactOptions {
  double min_strength = 0.1;
  double max_strength = 1.0;
  double min_length_s = 0.5;
  double max_length_s = 2.0;
  std::optional<double> forced_strength;  ///< test hook
};

struct ArtifactSpan {
  std::size_t start = 0;  ///< first affected sample
  std::size_t end = 0;    ///< one past the last affected sample
  double strength = 0.0;
  std::string source;
};

/// Adds a random [0,1]-normalized segment of the source, scaled by a random
/// strength in [0.1, 1], at a random position of an already-normalized
/// signal. Returns the labeled span.
ArtifactSpan add_artifact(std::vector<double>& signal01, const ArtifactSource& source, double fs,
                          std::uint64_t seed, const ArtifactOptions& options = {});

}  // namespace biosynth

#endif
