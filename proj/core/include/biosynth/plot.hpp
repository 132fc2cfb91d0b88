#ifndef BIOSYNTH_PLOT_HPP
#define BIOSYNTH_PLOT_HPP

#include <filesystem>
#include <string>

#include "biosynth/assembly.hpp"

namespace biosynth {

/// Renders the signal trace, segmentation band, noise-level track, artifact
/// spans and beat markers as an SVG. Output bytes are deterministic for a
/// given input.
std::string render_plot_svg(const LabeledBiosignal& signal);
void emit_plot(const LabeledBiosignal& signal, const std::filesystem::path& path);

}  // namespace biosynth

#endif
