#ifndef BIOSYNTH_FILES_HPP
#define BIOSYNTH_FILES_HPP

#include <filesystem>
#include <span>

#include "biosynth/beat_intervals.hpp"
#include "biosynth/noise.hpp"

namespace biosynth {

/// Single-channel recording file: first line "fs=<hz>", then one sample per
/// line. The source name is the file stem.
ArtifactSource load_noise_recording(const std::filesystem::path& path);
void save_noise_recording(const ArtifactSource& source, const std::filesystem::path& path);

/// Two-column CSV (freq_hz,power) with a header line. On import the
/// sampling rate is taken as twice the highest frequency.
PsdSpec load_psd_csv(const std::filesystem::path& path);
void save_psd_csv(const PsdSpec& psd, const std::filesystem::path& path);

void save_intervals_csv(const BeatIntervalSeries& series, const std::filesystem::path& path);
void save_samples_csv(std::span<const double> samples, const std::filesystem::path& path);

}  // namespace biosynth

#endif
