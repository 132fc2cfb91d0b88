#ifndef BIOSYNTH_DATASET_HPP
#define BIOSYNTH_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "biosynth/pipeline.hpp"

namespace biosynth {

nlohmann::json recipe_to_json(const SignalRecipe& recipe);
SignalRecipe recipe_from_json(const nlohmann::json& j);

/// Everything needed to replay any signal of a batch: the full config, the
/// resolved recipes, and the byte offset of each dataset record.
struct DatasetManifest {
  std::string version;
  std::string config_hash;
  nlohmann::json config;
  std::vector<SignalRecipe> recipes;
  std::vector<std::uint64_t> offsets;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

struct BatchOptions {
  std::size_t workers = 1;
  bool quiet = false;
};

struct BatchResult {
  std::filesystem::path dataset_path;
  std::filesystem::path manifest_path;
  std::size_t written = 0;
  std::vector<std::string> failures;  ///< "index: message" per failed signal
};

/// Generates `count` signals into an NDJSON dataset plus a manifest.
/// Deterministic for a fixed config seed, regardless of worker count.
/// Per-signal failures are isolated and reported unless config.strict.
BatchResult generate_batch(const GeneratorConfig& config, std::size_t count,
                           const std::filesystem::path& out_dir, const BatchOptions& options = {});

/// One dataset record as a single NDJSON line (no trailing newline).
std::string record_to_ndjson(const LabeledBiosignal& signal, const SignalRecipe& recipe,
                             const std::string& role = "");
LabeledBiosignal record_from_ndjson(const std::string& line);

DatasetManifest read_manifest(const std::filesystem::path& path);

/// Re-renders signal `index` from the manifest alone (sources are reloaded
/// from the paths recorded in the embedded config).
LabeledBiosignal replay_signal(const DatasetManifest& manifest, std::size_t index);

/// The exact NDJSON line(s) signal `index` produces; byte-identical to the
/// original dataset record(s).
std::vector<std::string> replay_record_lines(const DatasetManifest& manifest, std::size_t index);

/// Flat CSV export: time, value, seg_label, noise_level, quality,
/// artifact_flag; one row per sample.
void export_csv(const LabeledBiosignal& signal, const std::filesystem::path& path);

}  // namespace biosynth

#endif
