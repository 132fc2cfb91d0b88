#ifndef BIOSYNTH_ASSEMBLY_HPP
#define BIOSYNTH_ASSEMBLY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biosynth/noise.hpp"
#include "biosynth/waveform.hpp"

namespace biosynth {

/// Per-sample segmentation classes. ECG uses none/p/qrs/t, PPG uses
/// none/systole/diastole.
enum class SegLabel : std::uint8_t {
  none = 0,
  p = 1,
  qrs = 2,
  t = 3,
  systole = 4,
  diastole = 5,
};

std::string to_string(SegLabel label);

struct QualityOptions {
  double window_s = 2.0;
  /// Quality thresholds as mean |noise| per sample; a window is level 1
  /// below t1, level 2 below t2, level 3 otherwise. The defaults put
  /// noise amplitude 0.1 at level 1 and amplitude 1.0 at level 3.
  double t1_per_sample = 0.2;
  double t2_per_sample = 0.6;
};

/// Final composed signal with all labels and everything needed to replay it.
struct LabeledBiosignal {
  std::vector<double> samples;  ///< [0,1]-normalized plus any artifact
  double fs = 0.0;
  Modality modality = Modality::ecg;
  std::vector<std::uint8_t> seg_labels;       // one per sample
  std::vector<double> noise_level;            // per window, sum of |noise|
  std::vector<std::uint8_t> quality;          // per window, 1..3
  std::size_t window_samples = 0;
  std::vector<ArtifactSpan> artifact_spans;
  std::vector<double> beat_times;             // beat start times (seconds)
  std::vector<std::string> wave_names;
  std::vector<BeatEvents> events;             // per beat, clipped to duration
  std::vector<std::string> warnings;
};

/// Crossfades consecutive segments over `overlap` samples with linear
/// weights, so two constant segments merge into the same constant. Output
/// length is the total length minus (segments-1)*overlap.
std::vector<double> taper_concat(const std::vector<std::vector<double>>& segments,
                                 std::size_t overlap);

/// Artifact injection request for compose().
struct ArtifactRequest {
  const ArtifactSource* source = nullptr;
  std::uint64_t seed = 0;
  ArtifactOptions options;
};

/// clean + noise, min-max normalized to [0,1], then the optional artifact is
/// added on top. Emits per-window noise level (sum of |noise|), quality
/// levels (artifact windows forced to 3), segmentation labels, beat times,
/// and event times.
LabeledBiosignal compose(const CleanSignal& clean, std::span<const double> noise,
                         const std::optional<ArtifactRequest>& artifact = std::nullopt,
                         const QualityOptions& quality = {}, bool strict = false);

/// Per-sample labels from the wave label windows. Overlaps resolve by
/// priority QRS > T > P for ECG and systole > diastole for PPG.
std::vector<std::uint8_t> segmentation_labels(const CleanSignal& clean);

}  // namespace biosynth

#endif
