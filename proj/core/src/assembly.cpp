#include "biosynth/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biosynth/errors.hpp"

namespace biosynth {

std::string to_string(SegLabel label) {
  switch (label) {
    case SegLabel::none: return "none";
    case SegLabel::p: return "P";
    case SegLabel::qrs: return "QRS";
    case SegLabel::t: return "T";
    case SegLabel::systole: return "systole";
    case SegLabel::diastole: return "diastole";
  }
  return "?";
}

std::vector<double> taper_concat(const std::vector<std::vector<double>>& segments,
                                 std::size_t overlap) {
  if (segments.empty()) throw std::invalid_argument("taper_concat: no segments");
  for (const auto& s : segments)
    if (s.size() <= overlap)
      throw std::invalid_argument("taper_concat: overlap must be shorter than every segment");

  std::vector<double> out = segments.front();
  for (std::size_t s = 1; s < segments.size(); ++s) {
    const auto& next = segments[s];
    const std::size_t junction = out.size() - overlap;
    for (std::size_t j = 0; j < overlap; ++j) {
      // outgoing + w_in * (incoming - outgoing): equal inputs pass through
      // unchanged
      const double w_in = static_cast<double>(j + 1) / static_cast<double>(overlap + 1);
      out[junction + j] += w_in * (next[j] - out[junction + j]);
    }
    out.insert(out.end(), next.begin() + static_cast<std::ptrdiff_t>(overlap), next.end());
  }
  return out;
}

std::vector<std::uint8_t> segmentation_labels(const CleanSignal& clean) {
  const std::size_t n = clean.samples.size();
  std::vector<std::uint8_t> labels(n, static_cast<std::uint8_t>(SegLabel::none));
  if (n == 0) return labels;

  // paint in ascending priority so later passes win overlaps:
  // ECG P < T < QRS, PPG diastole < systole
  std::vector<std::pair<std::string, SegLabel>> passes;
  if (clean.modality == Modality::ecg) {
    passes = {{"P", SegLabel::p}, {"T", SegLabel::t}, {"Q", SegLabel::qrs},
              {"R", SegLabel::qrs}, {"S", SegLabel::qrs}};
  } else {
    passes = {{"Dias", SegLabel::diastole}, {"Sys", SegLabel::systole}};
  }

  for (const auto& [wave_name, label] : passes) {
    std::size_t wave_idx = clean.wave_names.size();
    for (std::size_t i = 0; i < clean.wave_names.size(); ++i)
      if (clean.wave_names[i] == wave_name) wave_idx = i;
    if (wave_idx == clean.wave_names.size()) continue;

    for (const auto& beat : clean.events) {
      const WaveEvent& ev = beat.waves[wave_idx];
      const long long lo = std::max(0LL, static_cast<long long>(std::ceil(ev.window_start * clean.fs - 1e-9)));
      const long long hi = std::min(static_cast<long long>(n) - 1,
                                    static_cast<long long>(std::floor(ev.window_end * clean.fs + 1e-9)));
      for (long long i = lo; i <= hi; ++i) labels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(label);
    }
  }
  return labels;
}

LabeledBiosignal compose(const CleanSignal& clean, std::span<const double> noise,
                         const std::optional<ArtifactRequest>& artifact,
                         const QualityOptions& quality, bool strict) {
  const std::size_t n = clean.samples.size();
  if (n == 0) throw std::invalid_argument("compose: empty clean signal");
  if (!(quality.window_s > 0.0)) throw std::invalid_argument("compose: window must be > 0");
  if (quality.t1_per_sample > quality.t2_per_sample)
    throw std::invalid_argument("compose: t1 must be <= t2");

  LabeledBiosignal out;
  out.fs = clean.fs;
  out.modality = clean.modality;
  out.wave_names = clean.wave_names;
  out.events = clean.events;
  out.beat_times = clean.beat_start_times;
  out.warnings = clean.warnings;

  if (!noise.empty() && noise.size() != n) {
    if (strict) throw GenerationError("compose: noise length does not match the clean signal");
    out.warnings.push_back("compose: noise length adjusted to match the clean signal");
  }
  auto noise_at = [&](std::size_t i) { return i < noise.size() ? noise[i] : 0.0; };

  // clean + noise, then min-max normalization to [0, 1]
  out.samples.resize(n);
  double mn = clean.samples[0] + noise_at(0), mx = mn;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = clean.samples[i] + noise_at(i);
    mn = std::min(mn, out.samples[i]);
    mx = std::max(mx, out.samples[i]);
  }
  if (mx > mn) {
    for (auto& v : out.samples) v = (v - mn) / (mx - mn);
  } else {
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    out.warnings.push_back("compose: constant signal normalized to zeros");
  }

  // artifact lands on the normalized signal
  if (artifact) {
    if (!artifact->source) throw std::invalid_argument("compose: artifact request without source");
    out.artifact_spans.push_back(
        add_artifact(out.samples, *artifact->source, clean.fs, artifact->seed, artifact->options));
  }

  out.seg_labels = segmentation_labels(clean);

  // windowed noise level and quality
  std::size_t window = static_cast<std::size_t>(std::llround(quality.window_s * clean.fs));
  if (window < 1) window = 1;
  out.window_samples = window;
  const std::size_t n_windows = (n + window - 1) / window;
  out.noise_level.resize(n_windows);
  out.quality.resize(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    const std::size_t lo = w * window;
    const std::size_t hi = std::min(n, lo + window);
    double level = 0.0;
    for (std::size_t i = lo; i < hi; ++i) level += std::abs(noise_at(i));
    out.noise_level[w] = level;

    const double len = static_cast<double>(hi - lo);
    std::uint8_t q = 3;
    if (level < quality.t1_per_sample * len)
      q = 1;
    else if (level < quality.t2_per_sample * len)
      q = 2;
    for (const auto& span : out.artifact_spans)
      if (span.start < hi && span.end > lo) q = 3;  // any artifact overlap
    out.quality[w] = q;
  }

  return out;
}

}  // namespace biosynth
