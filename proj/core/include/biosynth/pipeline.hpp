#ifndef BIOSYNTH_PIPELINE_HPP
#define BIOSYNTH_PIPELINE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "biosynth/assembly.hpp"
#include "biosynth/config.hpp"
#include "biosynth/randomization.hpp"

namespace biosynth {

/// Measured-noise recordings and artifact sources, keyed by name.
struct SourceRegistry {
  std::map<std::string, ArtifactSource> noise_recordings;
  std::map<std::string, ArtifactSource> artifact_sources;

  std::vector<std::string> noise_names() const;
  std::vector<std::string> artifact_names() const;
};

/// Loads every recording referenced by the config.
SourceRegistry load_sources(const GeneratorConfig& config);

/// Resolves all randomized fields of signal `index` into a replayable
/// recipe. Pure function of (config, registry names, index).
SignalRecipe build_recipe(const GeneratorConfig& config, const SourceRegistry& registry,
                          std::uint64_t index);

/// Renders one recipe end to end: intervals, clean waveform, noise
/// segments with tapered concatenation, composition, labels.
LabeledBiosignal render_recipe(const SignalRecipe& recipe, const SourceRegistry& registry,
                               const QualityOptions& quality = {}, bool strict = false,
                               bool detrend = false);

/// Renders a time-synchronized signal pair from one beat sequence. Noise is
/// drawn independently per signal.
std::pair<LabeledBiosignal, LabeledBiosignal> generate_pair(
    const SignalRecipe& recipe, const PairSpec& pair, const SourceRegistry& registry,
    const QualityOptions& quality = {}, bool strict = false, bool detrend = false);

}  // namespace biosynth

#endif
