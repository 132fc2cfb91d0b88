#ifndef BIOSYNTH_CONFIG_HPP
#define BIOSYNTH_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biosynth/assembly.hpp"
#include "biosynth/randomization.hpp"

namespace biosynth {

/// Declarative noise segment. Unset fields are randomized within the
/// configured limits when the recipe is built.
struct NoiseSegmentConfig {
  std::string type = "random";  ///< "random", "model", or a recording name
  double duration_s = 0.0;      ///< 0 = split the remaining duration evenly
  std::optional<double> amplitude;
  std::optional<NoiseModelParams> model;
  std::optional<double> point_frequency_hz;
  double point_power = 0.0;
};

struct OutputConfig {
  std::string dataset = "dataset.ndjson";
  std::string manifest = "manifest.json";
  std::string csv;  ///< empty = no CSV export
};

/// Full declarative recipe for dataset generation.
struct GeneratorConfig {
  Modality modality = Modality::ecg;
  double duration_s = 30.0;
  double fs = kDefaultEcgFs;  ///< defaults to 250 (ECG) or 125 (PPG)
  std::uint64_t seed = 0;
  bool strict = false;
  bool randomize = true;
  bool detrend = false;

  BeatModel beat;
  std::optional<StepChangeSpec> step;        ///< fixed step change (overrides randomization)
  std::optional<WaveParameterSet> waves;     ///< fixed wave parameters (overrides randomization)
  RandomizationLimits limits;

  std::vector<NoiseSegmentConfig> noise_plan;  ///< empty = one randomized segment
  bool noise_enabled = true;
  double taper_overlap_s = 1.0;
  QualityOptions quality;

  std::vector<std::string> noise_recordings;  ///< measured-noise files to register
  std::vector<std::string> artifact_files;    ///< artifact source files

  std::optional<PairSpec> pair;
  OutputConfig output;

  void validate() const;
};

/// Parses and validates a JSON config file; missing keys take defaults,
/// unknown keys are rejected in strict mode.
GeneratorConfig parse_config(const std::filesystem::path& path);
GeneratorConfig parse_config_json(const nlohmann::json& j);

nlohmann::json config_to_json(const GeneratorConfig& config);

/// Stable FNV-1a hash of the canonical serialized config.
std::string config_hash(const GeneratorConfig& config);

}  // namespace biosynth

#endif
