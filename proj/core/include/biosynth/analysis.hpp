#ifndef BIOSYNTH_ANALYSIS_HPP
#define BIOSYNTH_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biosynth/noise.hpp"

namespace biosynth {

struct DfaOptions {
  std::size_t n_scales = 16;  ///< log-spaced from 4 to n/4 when scales empty
  int detrend_order = 1;
  std::vector<std::size_t> scales;                   ///< explicit scale grid (optional)
  std::optional<std::pair<double, double>> fit_range;  ///< restrict the log-log fit
};

struct DfaResult {
  std::vector<std::size_t> scales;
  std::vector<double> fluctuations;
  double alpha = 0.0;
  std::pair<double, double> fit_range{0.0, 0.0};
};

/// Detrended fluctuation analysis: integrate the mean-removed series,
/// remove a per-window polynomial trend at each scale (forward and backward
/// windows), and fit the log-log slope of the RMS fluctuation.
DfaResult dfa(std::span<const double> series, const DfaOptions& options = {});

struct BandError {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double target_mean = 0.0;
  double estimate_mean = 0.0;
  double rel_error = 0.0;
};

struct RoundtripReport {
  std::vector<BandError> bands;  ///< quartiles of the frequency axis
  double max_abs_rel_error = 0.0;
  std::size_t seeds_used = 0;
  /// Fraction of target power below the Welch resolution, excluded from the
  /// comparison.
  double unresolved_low_freq_fraction = 0.0;
};

/// Synthesizes noise for each seed, Welch re-estimates, averages the
/// estimates, and reports per-quartile-band relative error against the
/// target PSD (target binned integral-preservingly onto the Welch grid).
RoundtripReport psd_roundtrip_report(const PsdSpec& psd, std::size_t n_samples,
                                     std::span<const std::uint64_t> seeds,
                                     const WelchOptions& welch = {});

}  // namespace biosynth

#endif
