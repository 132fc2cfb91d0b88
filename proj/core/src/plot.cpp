#include "biosynth/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "biosynth/errors.hpp"

namespace biosynth {

namespace {

constexpr int kWidth = 1000;
constexpr int kTraceTop = 20;
constexpr int kTraceHeight = 200;
constexpr int kLabelTop = 240;
constexpr int kLabelHeight = 26;
constexpr int kNoiseTop = 282;
constexpr int kNoiseHeight = 58;
constexpr int kHeight = 360;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* label_color(SegLabel label) {
  switch (label) {
    case SegLabel::p: return "#f2c14e";
    case SegLabel::qrs: return "#d1495b";
    case SegLabel::t: return "#5387c2";
    case SegLabel::systole: return "#d1495b";
    case SegLabel::diastole: return "#5387c2";
    default: return "#e8e8e8";
  }
}

}  // namespace

std::string render_plot_svg(const LabeledBiosignal& signal) {
  const std::size_t n = signal.samples.size();
  if (n == 0) throw std::invalid_argument("plot: empty signal");

  std::string svg;
  svg.reserve(1 << 16);
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
         " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double x_of = static_cast<double>(kWidth) / static_cast<double>(n);

  // artifact spans behind the trace
  for (const auto& span : signal.artifact_spans) {
    svg += "<rect class=\"artifact\" data-start=\"" + std::to_string(span.start) + "\" data-end=\"" +
           std::to_string(span.end) + "\" x=\"" + fmt(span.start * x_of) + "\" y=\"" +
           std::to_string(kTraceTop) + "\" width=\"" + fmt((span.end - span.start) * x_of) +
           "\" height=\"" + std::to_string(kTraceHeight) +
           "\" fill=\"#e07a5f\" fill-opacity=\"0.25\"/>\n";
  }

  // signal trace
  double mn = signal.samples[0], mx = signal.samples[0];
  for (double v : signal.samples) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  const double span_v = mx > mn ? mx - mn : 1.0;
  const std::size_t stride = std::max<std::size_t>(1, n / 4000);
  svg += "<polyline fill=\"none\" stroke=\"#20303f\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < n; i += stride) {
    const double y = kTraceTop + kTraceHeight * (1.0 - (signal.samples[i] - mn) / span_v);
    svg += fmt(i * x_of) + "," + fmt(y) + " ";
  }
  svg += "\"/>\n";

  // beat markers
  for (double t : signal.beat_times) {
    const double x = t * signal.fs * x_of;
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + std::to_string(kTraceTop) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + std::to_string(kTraceTop + 8) + "\" stroke=\"#888888\"/>\n";
  }

  // segmentation band: contiguous runs of one label
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || signal.seg_labels[i] != signal.seg_labels[run_start]) {
      const SegLabel label = static_cast<SegLabel>(signal.seg_labels[run_start]);
      svg += "<rect class=\"seg\" data-label=\"" + to_string(label) + "\" x=\"" +
             fmt(run_start * x_of) + "\" y=\"" + std::to_string(kLabelTop) + "\" width=\"" +
             fmt((i - run_start) * x_of) + "\" height=\"" + std::to_string(kLabelHeight) +
             "\" fill=\"" + label_color(label) + "\"/>\n";
      run_start = i;
    }
  }

  // noise-level track with quality shading
  double level_max = 0.0;
  for (double v : signal.noise_level) level_max = std::max(level_max, v);
  const std::size_t n_windows = signal.noise_level.size();
  for (std::size_t w = 0; w < n_windows; ++w) {
    const double x0 = static_cast<double>(w * signal.window_samples) * x_of;
    const double x1 = std::min<double>(kWidth, static_cast<double>((w + 1) * signal.window_samples) * x_of);
    const double h = level_max > 0.0 ? kNoiseHeight * signal.noise_level[w] / level_max : 0.0;
    const char* color = w < signal.quality.size() && signal.quality[w] == 3   ? "#d1495b"
                        : w < signal.quality.size() && signal.quality[w] == 2 ? "#f2c14e"
                                                                              : "#7fb069";
    svg += "<rect class=\"noise\" data-quality=\"" +
           std::to_string(w < signal.quality.size() ? signal.quality[w] : 1) + "\" x=\"" + fmt(x0) +
           "\" y=\"" + fmt(kNoiseTop + kNoiseHeight - h) + "\" width=\"" + fmt(x1 - x0) +
           "\" height=\"" + fmt(h) + "\" fill=\"" + color + "\"/>\n";
  }

  svg += "<text x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"11\">" +
         to_string(signal.modality) + " fs=" + fmt(signal.fs) + "Hz n=" + std::to_string(n) +
         "</text>\n";
  svg += "<text x=\"4\" y=\"" + std::to_string(kLabelTop - 4) +
         "\" font-family=\"monospace\" font-size=\"10\">labels</text>\n";
  svg += "<text x=\"4\" y=\"" + std::to_string(kNoiseTop - 4) +
         "\" font-family=\"monospace\" font-size=\"10\">noise level / quality</text>\n";
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const LabeledBiosignal& signal, const std::filesystem::path& path) {
  const std::string svg = render_plot_svg(signal);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write plot: " + path.string());
  out << svg;
  out.close();
  if (!out) throw IoError("failed writing plot: " + path.string());
}

}  // namespace biosynth
