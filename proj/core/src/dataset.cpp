#include "biosynth/dataset.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "biosynth/errors.hpp"
#include "biosynth/version.hpp"

namespace biosynth {

namespace {

using nlohmann::json;

const char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out.push_back(kB64Chars[(v >> 6) & 63]);
    out.push_back(kB64Chars[v & 63]);
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const unsigned v = data[i] << 16;
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kB64Chars[(v >> 18) & 63]);
    out.push_back(kB64Chars[(v >> 12) & 63]);
    out.push_back(kB64Chars[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  static int lut[256];
  static bool init = false;
  if (!init) {
    std::fill(std::begin(lut), std::end(lut), -1);
    for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kB64Chars[i])] = i;
    init = true;
  }
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  unsigned buffer = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = lut[static_cast<unsigned char>(c)];
    if (v < 0) throw IoError("base64: invalid character");
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xff));
    }
  }
  return out;
}

std::string deflate_b64(const unsigned char* data, std::size_t size) {
  uLongf bound = compressBound(static_cast<uLong>(size));
  std::vector<unsigned char> compressed(bound);
  if (compress2(compressed.data(), &bound, data, static_cast<uLong>(size), 6) != Z_OK)
    throw IoError("zlib: compression failed");
  compressed.resize(bound);
  return base64_encode(compressed);
}

std::vector<unsigned char> inflate_b64(const std::string& text, std::size_t expected_size) {
  const std::vector<unsigned char> compressed = base64_decode(text);
  std::vector<unsigned char> out(expected_size);
  uLongf size = static_cast<uLongf>(expected_size);
  if (uncompress(out.data(), &size, compressed.data(), static_cast<uLong>(compressed.size())) != Z_OK ||
      size != expected_size)
    throw IoError("zlib: decompression failed");
  return out;
}

std::string samples_to_b64(const std::vector<double>& samples) {
  std::vector<unsigned char> bytes(samples.size() * sizeof(float));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const float f = static_cast<float>(samples[i]);
    std::memcpy(&bytes[i * sizeof(float)], &f, sizeof(float));
  }
  return deflate_b64(bytes.data(), bytes.size());
}

std::vector<double> samples_from_b64(const std::string& text, std::size_t count) {
  const auto bytes = inflate_b64(text, count * sizeof(float));
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    float f;
    std::memcpy(&f, &bytes[i * sizeof(float)], sizeof(float));
    out[i] = static_cast<double>(f);
  }
  return out;
}

json wave_set_to_json(const WaveParameterSet& set) {
  json waves = json::array();
  for (const auto& wv : set.waves) {
    waves.push_back({{"name", wv.name},
                     {"d", wv.params.d},
                     {"a", wv.params.a},
                     {"w", wv.params.w},
                     {"m", wv.params.m}});
  }
  return json{{"modality", to_string(set.modality)}, {"waves", waves}};
}

WaveParameterSet wave_set_from_json(const json& j) {
  WaveParameterSet set;
  set.modality = modality_from_string(j.at("modality").get<std::string>());
  for (const json& wv : j.at("waves")) {
    WaveParams p;
    p.d = wv.at("d").get<double>();
    p.a = wv.at("a").get<double>();
    p.w = wv.at("w").get<double>();
    p.m = wv.at("m").get<double>();
    set.waves.push_back({wv.at("name").get<std::string>(), p});
  }
  set.validate();
  return set;
}

json noise_plan_to_json(const NoisePlan& plan) {
  json segments = json::array();
  for (const auto& seg : plan.segments) {
    json sj;
    sj["type"] = seg.type;
    sj["duration_s"] = seg.duration_s;
    sj["amplitude"] = seg.amplitude;
    if (seg.model)
      sj["model"] = {{"alpha", seg.model->alpha}, {"c", seg.model->c}, {"sigma2", seg.model->sigma2}};
    if (seg.point_frequency_hz) {
      sj["point_frequency_hz"] = *seg.point_frequency_hz;
      sj["point_power"] = seg.point_power;
    }
    sj["seed"] = seg.seed;
    segments.push_back(sj);
  }
  json j;
  j["segments"] = segments;
  if (plan.artifact) j["artifact"] = {{"source", plan.artifact->source}, {"seed", plan.artifact->seed}};
  if (!plan.warnings.empty()) j["warnings"] = plan.warnings;
  return j;
}

NoisePlan noise_plan_from_json(const json& j) {
  NoisePlan plan;
  for (const json& sj : j.at("segments")) {
    NoiseSegmentPlan seg;
    seg.type = sj.at("type").get<std::string>();
    seg.duration_s = sj.at("duration_s").get<double>();
    seg.amplitude = sj.at("amplitude").get<double>();
    if (sj.contains("model")) {
      NoiseModelParams mp;
      mp.alpha = sj.at("model").at("alpha").get<double>();
      mp.c = sj.at("model").at("c").get<double>();
      mp.sigma2 = sj.at("model").at("sigma2").get<double>();
      seg.model = mp;
    }
    if (sj.contains("point_frequency_hz")) {
      seg.point_frequency_hz = sj.at("point_frequency_hz").get<double>();
      seg.point_power = sj.at("point_power").get<double>();
    }
    seg.seed = sj.at("seed").get<std::uint64_t>();
    plan.segments.push_back(seg);
  }
  if (j.contains("artifact")) {
    ArtifactPlan art;
    art.source = j.at("artifact").at("source").get<std::string>();
    art.seed = j.at("artifact").at("seed").get<std::uint64_t>();
    plan.artifact = art;
  }
  if (j.contains("warnings"))
    for (const json& w : j.at("warnings")) plan.warnings.push_back(w.get<std::string>());
  return plan;
}

}  // namespace

json recipe_to_json(const SignalRecipe& recipe) {
  json j;
  j["index"] = recipe.index;
  j["modality"] = to_string(recipe.modality);
  j["fs"] = recipe.fs;
  j["duration_s"] = recipe.duration_s;
  j["waves"] = wave_set_to_json(recipe.waves);
  json beat;
  beat["mu"] = recipe.beat.mu;
  beat["beta"] = recipe.beat.beta;
  beat["breathing_hz"] = recipe.beat.breathing_hz;
  if (recipe.beat.gamma) {
    beat["gamma"] = {{"a", recipe.beat.gamma->a},
                     {"b", recipe.beat.gamma->b},
                     {"sigma", recipe.beat.gamma->sigma},
                     {"scale", recipe.beat.gamma->scale}};
  }
  j["beat"] = beat;
  j["interval_seed"] = recipe.interval_seed;
  if (recipe.step)
    j["step"] = {{"mu_prime", recipe.step->mu_prime}, {"l", recipe.step->l}, {"tau", recipe.step->tau_input}};
  j["noise"] = noise_plan_to_json(recipe.noise);
  j["taper_overlap_samples"] = recipe.taper_overlap_samples;
  if (recipe.pair) {
    json p;
    p["first"] = to_string(recipe.pair->first);
    p["second"] = to_string(recipe.pair->second);
    p["delay_s"] = recipe.pair->delay_s;
    if (recipe.pair->delay_step) {
      p["delay_step"] = {{"delay2_s", recipe.pair->delay_step->delay2_s},
                         {"l", recipe.pair->delay_step->l},
                         {"tau", recipe.pair->delay_step->tau}};
    }
    j["pair"] = p;
  }
  if (recipe.second_waves) j["second_waves"] = wave_set_to_json(*recipe.second_waves);
  if (recipe.second_noise) j["second_noise"] = noise_plan_to_json(*recipe.second_noise);
  return j;
}

SignalRecipe recipe_from_json(const json& j) {
  SignalRecipe recipe;
  recipe.index = j.at("index").get<std::uint64_t>();
  recipe.modality = modality_from_string(j.at("modality").get<std::string>());
  recipe.fs = j.at("fs").get<double>();
  recipe.duration_s = j.at("duration_s").get<double>();
  recipe.waves = wave_set_from_json(j.at("waves"));
  const json& beat = j.at("beat");
  recipe.beat.mu = beat.at("mu").get<double>();
  recipe.beat.beta = beat.at("beta").get<double>();
  recipe.beat.breathing_hz = beat.at("breathing_hz").get<double>();
  if (beat.contains("gamma")) {
    GammaParams gp;
    gp.a = beat.at("gamma").at("a").get<double>();
    gp.b = beat.at("gamma").at("b").get<double>();
    gp.sigma = beat.at("gamma").at("sigma").get<double>();
    gp.scale = beat.at("gamma").at("scale").get<double>();
    recipe.beat.gamma = gp;
  } else {
    recipe.beat.gamma.reset();
  }
  recipe.interval_seed = j.at("interval_seed").get<std::uint64_t>();
  if (j.contains("step")) {
    StepChangeSpec step;
    step.mu_prime = j.at("step").at("mu_prime").get<double>();
    step.l = j.at("step").at("l").get<double>();
    step.tau_input = j.at("step").at("tau").get<double>();
    recipe.step = step;
  }
  recipe.noise = noise_plan_from_json(j.at("noise"));
  recipe.taper_overlap_samples = j.at("taper_overlap_samples").get<std::size_t>();
  if (j.contains("pair")) {
    PairSpec pair;
    pair.first = modality_from_string(j.at("pair").at("first").get<std::string>());
    pair.second = modality_from_string(j.at("pair").at("second").get<std::string>());
    pair.delay_s = j.at("pair").at("delay_s").get<double>();
    if (j.at("pair").contains("delay_step")) {
      DelayStepSpec step;
      step.delay2_s = j.at("pair").at("delay_step").at("delay2_s").get<double>();
      step.l = j.at("pair").at("delay_step").at("l").get<double>();
      step.tau = j.at("pair").at("delay_step").at("tau").get<double>();
      pair.delay_step = step;
    }
    recipe.pair = pair;
  }
  if (j.contains("second_waves")) recipe.second_waves = wave_set_from_json(j.at("second_waves"));
  if (j.contains("second_noise")) recipe.second_noise = noise_plan_from_json(j.at("second_noise"));
  return recipe;
}

std::string record_to_ndjson(const LabeledBiosignal& signal, const SignalRecipe& recipe,
                             const std::string& role) {
  json j;
  j["index"] = recipe.index;
  if (!role.empty()) j["role"] = role;
  j["modality"] = to_string(signal.modality);
  j["fs"] = signal.fs;
  j["n_samples"] = signal.samples.size();
  j["samples_b64z"] = samples_to_b64(signal.samples);
  j["seg_labels_b64z"] = deflate_b64(signal.seg_labels.data(), signal.seg_labels.size());
  j["window_samples"] = signal.window_samples;
  j["noise_level"] = signal.noise_level;
  j["quality"] = signal.quality;
  json spans = json::array();
  for (const auto& span : signal.artifact_spans)
    spans.push_back({{"start", span.start}, {"end", span.end}, {"strength", span.strength}, {"source", span.source}});
  j["artifact_spans"] = spans;
  j["beat_times"] = signal.beat_times;
  j["wave_names"] = signal.wave_names;
  json peaks = json::array();
  json windows = json::array();
  for (const auto& beat : signal.events) {
    json bp = json::array();
    json bw = json::array();
    for (const auto& wv : beat.waves) {
      bp.push_back(wv.peak_time);
      bw.push_back(json::array({wv.window_start, wv.window_end}));
    }
    peaks.push_back(bp);
    windows.push_back(bw);
  }
  j["event_peaks"] = peaks;
  j["event_windows"] = windows;
  if (!signal.warnings.empty()) j["warnings"] = signal.warnings;
  j["recipe"] = recipe_to_json(recipe);
  return j.dump();
}

LabeledBiosignal record_from_ndjson(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("dataset record: ") + e.what());
  }
  LabeledBiosignal out;
  out.modality = modality_from_string(j.at("modality").get<std::string>());
  out.fs = j.at("fs").get<double>();
  const std::size_t n = j.at("n_samples").get<std::size_t>();
  out.samples = samples_from_b64(j.at("samples_b64z").get<std::string>(), n);
  const auto labels = inflate_b64(j.at("seg_labels_b64z").get<std::string>(), n);
  out.seg_labels.assign(labels.begin(), labels.end());
  out.window_samples = j.at("window_samples").get<std::size_t>();
  out.noise_level = j.at("noise_level").get<std::vector<double>>();
  out.quality = j.at("quality").get<std::vector<std::uint8_t>>();
  for (const json& span : j.at("artifact_spans")) {
    ArtifactSpan s;
    s.start = span.at("start").get<std::size_t>();
    s.end = span.at("end").get<std::size_t>();
    s.strength = span.at("strength").get<double>();
    s.source = span.at("source").get<std::string>();
    out.artifact_spans.push_back(s);
  }
  out.beat_times = j.at("beat_times").get<std::vector<double>>();
  out.wave_names = j.at("wave_names").get<std::vector<std::string>>();
  const json& peaks = j.at("event_peaks");
  const json& windows = j.at("event_windows");
  for (std::size_t b = 0; b < peaks.size(); ++b) {
    BeatEvents ev;
    for (std::size_t w = 0; w < peaks[b].size(); ++w) {
      WaveEvent e;
      e.peak_time = peaks[b][w].get<double>();
      e.window_start = windows[b][w][0].get<double>();
      e.window_end = windows[b][w][1].get<double>();
      ev.waves.push_back(e);
    }
    out.events.push_back(std::move(ev));
  }
  if (j.contains("warnings")) out.warnings = j.at("warnings").get<std::vector<std::string>>();
  return out;
}

json DatasetManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config_hash"] = config_hash;
  j["config"] = config;
  json rj = json::array();
  for (const auto& r : recipes) rj.push_back(recipe_to_json(r));
  j["recipes"] = rj;
  j["offsets"] = offsets;
  return j;
}

DatasetManifest DatasetManifest::from_json(const json& j) {
  DatasetManifest m;
  m.version = j.at("version").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config = j.at("config");
  for (const json& r : j.at("recipes")) m.recipes.push_back(recipe_from_json(r));
  m.offsets = j.at("offsets").get<std::vector<std::uint64_t>>();
  return m;
}

namespace {

std::vector<std::string> render_lines(const SignalRecipe& recipe, const SourceRegistry& registry,
                                      const GeneratorConfig& config) {
  std::vector<std::string> lines;
  if (recipe.pair) {
    auto [a, b] = generate_pair(recipe, *recipe.pair, registry, config.quality, config.strict,
                                config.detrend);
    lines.push_back(record_to_ndjson(a, recipe, "a"));
    lines.push_back(record_to_ndjson(b, recipe, "b"));
  } else {
    lines.push_back(record_to_ndjson(
        render_recipe(recipe, registry, config.quality, config.strict, config.detrend), recipe));
  }
  return lines;
}

}  // namespace

BatchResult generate_batch(const GeneratorConfig& config, std::size_t count,
                           const std::filesystem::path& out_dir, const BatchOptions& options) {
  if (count == 0) throw std::invalid_argument("generate_batch: count must be >= 1");
  config.validate();
  const SourceRegistry registry = load_sources(config);

  std::vector<SignalRecipe> recipes(count);
  for (std::size_t i = 0; i < count; ++i) recipes[i] = build_recipe(config, registry, i);

  // render in parallel; output depends only on the per-signal recipe, so the
  // worker count never changes the bytes
  std::vector<std::vector<std::string>> lines(count);
  std::vector<std::string> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  std::mutex progress_mutex;
  std::size_t done = 0;

  auto work = [&](std::size_t worker_id) {
    for (std::size_t i = worker_id; i < count; i += workers) {
      try {
        lines[i] = render_lines(recipes[i], registry, config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      if (!options.quiet) {
        std::lock_guard lock(progress_mutex);
        ++done;
        if (done % 25 == 0 || done == count)
          std::cerr << "generated " << done << "/" << count << " signals\n";
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  BatchResult result;
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i].empty()) {
      if (config.strict) throw GenerationError("signal " + std::to_string(i) + ": " + errors[i]);
      result.failures.push_back(std::to_string(i) + ": " + errors[i]);
    }
  }

  std::filesystem::create_directories(out_dir);
  result.dataset_path = out_dir / config.output.dataset;
  result.manifest_path = out_dir / config.output.manifest;

  DatasetManifest manifest;
  manifest.version = kVersion;
  manifest.config = config_to_json(config);
  manifest.config_hash = config_hash(config);
  manifest.recipes = recipes;

  std::ofstream dataset(result.dataset_path, std::ios::binary);
  if (!dataset) throw IoError("cannot write dataset: " + result.dataset_path.string());
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (lines[i].empty()) {
      manifest.offsets.push_back(std::numeric_limits<std::uint64_t>::max());
      continue;
    }
    manifest.offsets.push_back(offset);
    for (const auto& line : lines[i]) {
      dataset << line << '\n';
      offset += line.size() + 1;
      ++result.written;
    }
  }
  dataset.close();
  if (!dataset) throw IoError("failed writing dataset: " + result.dataset_path.string());

  std::ofstream mf(result.manifest_path, std::ios::binary);
  if (!mf) throw IoError("cannot write manifest: " + result.manifest_path.string());
  mf << manifest.to_json().dump(2) << '\n';
  mf.close();
  if (!mf) throw IoError("failed writing manifest: " + result.manifest_path.string());

  if (!config.output.csv.empty()) {
    for (std::size_t i = 0; i < count; ++i) {
      if (lines[i].empty()) continue;
      const LabeledBiosignal sig = record_from_ndjson(lines[i].front());
      std::filesystem::path csv = out_dir / config.output.csv;
      csv.replace_filename(csv.stem().string() + "_" + std::to_string(i) +
                           csv.extension().string());
      export_csv(sig, csv);
    }
  }
  return result;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return DatasetManifest::from_json(j);
}

std::vector<std::string> replay_record_lines(const DatasetManifest& manifest, std::size_t index) {
  if (index >= manifest.recipes.size())
    throw std::invalid_argument("replay: index out of range");
  const GeneratorConfig config = parse_config_json(manifest.config);
  const SourceRegistry registry = load_sources(config);
  return render_lines(manifest.recipes[index], registry, config);
}

LabeledBiosignal replay_signal(const DatasetManifest& manifest, std::size_t index) {
  const auto lines = replay_record_lines(manifest, index);
  return record_from_ndjson(lines.front());
}

void export_csv(const LabeledBiosignal& signal, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV: " + path.string());
  out << "time,value,seg_label,noise_level,quality,artifact_flag\n";
  char buf[160];
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const std::size_t w = signal.window_samples > 0 ? i / signal.window_samples : 0;
    const double level = w < signal.noise_level.size() ? signal.noise_level[w] : 0.0;
    const int quality = w < signal.quality.size() ? signal.quality[w] : 1;
    int artifact = 0;
    for (const auto& span : signal.artifact_spans)
      if (i >= span.start && i < span.end) artifact = 1;
    std::snprintf(buf, sizeof(buf), "%.6f,%.9g,%s,%.9g,%d,%d\n",
                  static_cast<double>(i) / signal.fs, signal.samples[i],
                  to_string(static_cast<SegLabel>(signal.seg_labels[i])).c_str(), level, quality,
                  artifact);
    out << buf;
  }
  out.close();
  if (!out) throw IoError("failed writing CSV: " + path.string());
}

}  // namespace biosynth
