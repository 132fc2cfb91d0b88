#include "biosynth/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "biosynth/errors.hpp"
#include "biosynth/files.hpp"

namespace biosynth {

namespace {

// Keeps only the first n_total samples and the beats that start inside them.
void trim_clean(CleanSignal& clean, std::size_t n_total) {
  if (clean.samples.size() <= n_total) return;
  clean.samples.resize(n_total);
  std::size_t beats = 0;
  while (beats < clean.events.size() && clean.beat_boundaries[beats] < n_total) ++beats;
  clean.events.resize(beats);
  clean.beat_start_times.resize(beats);
  clean.beat_boundaries.resize(beats);
  clean.beat_boundaries.push_back(n_total);
}

PsdSpec retarget_psd(PsdSpec psd, double new_fs) {
  const double nyq = new_fs / 2.0 * (1.0 + 1e-9);
  std::size_t keep = 0;
  while (keep < psd.freqs.size() && psd.freqs[keep] <= nyq) ++keep;
  if (keep == 0) throw GenerationError("measured PSD has no content below the target Nyquist");
  psd.freqs.resize(keep);
  psd.powers.resize(keep);
  psd.fs = new_fs;
  psd.validate();
  return psd;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::vector<std::string> SourceRegistry::noise_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : noise_recordings) names.push_back(name);
  return names;
}

std::vector<std::string> SourceRegistry::artifact_names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : artifact_sources) names.push_back(name);
  return names;
}

SourceRegistry load_sources(const GeneratorConfig& config) {
  SourceRegistry registry;
  for (const auto& path : config.noise_recordings) {
    ArtifactSource src = load_noise_recording(path);
    registry.noise_recordings.emplace(src.name, std::move(src));
  }
  for (const auto& path : config.artifact_files) {
    ArtifactSource src = load_noise_recording(path);
    registry.artifact_sources.emplace(src.name, std::move(src));
  }
  return registry;
}

namespace {

NoisePlan resolve_noise_plan(const GeneratorConfig& config, const SourceRegistry& registry,
                             double fs, double duration_s, std::uint64_t seed) {
  if (!config.noise_enabled) return {};

  if (config.noise_plan.empty()) {
    return sample_noise_config(config.limits, registry.noise_names(), registry.artifact_names(),
                               fs, duration_s, seed, config.strict);
  }

  Rng rng(seed);
  NoisePlan plan;

  // durations: explicit values are kept, zero entries split the remainder
  double fixed = 0.0;
  std::size_t open = 0;
  for (const auto& seg : config.noise_plan) {
    if (seg.duration_s > 0.0)
      fixed += seg.duration_s;
    else
      ++open;
  }
  const double remaining = std::max(0.0, duration_s - fixed);
  const double open_share = open > 0 ? remaining / static_cast<double>(open) : 0.0;

  std::vector<std::string> random_pool = registry.noise_names();
  random_pool.push_back("model");

  for (const auto& seg_cfg : config.noise_plan) {
    NoiseSegmentPlan seg;
    seg.duration_s = seg_cfg.duration_s > 0.0 ? seg_cfg.duration_s : open_share;

    std::string type = seg_cfg.type;
    if (type == "random") type = random_pool[rng.index(random_pool.size())];
    if (type != "model" && !registry.noise_recordings.count(type)) {
      const std::string msg = "noise type '" + type + "' has no registered recording";
      if (config.strict) throw GenerationError(msg);
      plan.warnings.push_back(msg + "; falling back to the model PSD");
      type = "model";
    }
    seg.type = type;

    seg.amplitude = seg_cfg.amplitude ? *seg_cfg.amplitude : config.limits.noise_amplitude.sample(rng);
    if (type == "model") {
      if (seg_cfg.model) {
        seg.model = *seg_cfg.model;
      } else {
        NoiseModelParams mp;
        mp.alpha = config.limits.noise_alpha.sample(rng);
        mp.c = config.limits.noise_c.sample(rng);
        mp.sigma2 = config.limits.noise_sigma2.sample(rng);
        seg.model = mp;
      }
    }
    if (seg_cfg.point_frequency_hz) {
      seg.point_frequency_hz = *seg_cfg.point_frequency_hz;
      seg.point_power = seg_cfg.point_power;
    } else if (rng.bernoulli(config.limits.point_frequency_probability)) {
      double f0 = rng.uniform01() * fs / 2.0;
      const double floor = fs / 2.0 * 1e-6;
      f0 = std::max(floor, std::min(f0, fs / 2.0 - floor));
      seg.point_frequency_hz = f0;
      seg.point_power = config.limits.point_power.sample(rng);
    }
    seg.seed = rng.next_u64();
    plan.segments.push_back(seg);
  }

  if (rng.bernoulli(config.limits.artifact_probability)) {
    const auto names = registry.artifact_names();
    if (names.empty()) {
      const char* msg = "artifact drawn but no artifact source registered";
      if (config.strict) throw GenerationError(msg);
      plan.warnings.push_back(msg);
    } else {
      ArtifactPlan art;
      art.source = names[rng.index(names.size())];
      art.seed = rng.next_u64();
      plan.artifact = art;
    }
  }
  return plan;
}

std::vector<double> render_noise(const NoisePlan& plan, const SourceRegistry& registry,
                                 double fs, std::size_t n_total, std::size_t overlap,
                                 std::vector<std::string>& warnings, bool strict) {
  if (plan.segments.empty()) return {};

  const std::size_t n_segments = plan.segments.size();
  std::vector<std::size_t> lengths(n_segments);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n_segments; ++i) {
    lengths[i] = static_cast<std::size_t>(
        std::max<long long>(2, std::llround(plan.segments[i].duration_s * fs)));
    total += lengths[i];
  }

  std::size_t ov = overlap;
  const std::size_t shortest = *std::min_element(lengths.begin(), lengths.end());
  if (n_segments > 1 && ov >= shortest) {
    if (strict) throw GenerationError("taper overlap is not shorter than the shortest noise segment");
    warnings.push_back("taper overlap clipped to the shortest noise segment");
    ov = shortest - 1;
  }
  // the concatenation must cover the signal after the overlaps are merged
  const std::size_t needed = n_total + (n_segments - 1) * ov;
  if (total < needed) lengths.back() += needed - total;

  std::vector<std::vector<double>> rendered;
  rendered.reserve(n_segments);
  for (std::size_t i = 0; i < n_segments; ++i) {
    const NoiseSegmentPlan& seg = plan.segments[i];
    const std::size_t len = lengths[i];

    PsdSpec psd;
    if (seg.type == "model") {
      std::vector<double> grid;
      grid.reserve(len / 2);
      for (std::size_t k = 1; k <= len / 2; ++k)
        grid.push_back(static_cast<double>(k) * fs / static_cast<double>(len));
      psd = model_psd(grid, seg.model.value_or(NoiseModelParams{}), fs);
    } else {
      const auto it = registry.noise_recordings.find(seg.type);
      if (it == registry.noise_recordings.end())
        throw GenerationError("noise recording '" + seg.type + "' is not registered");
      psd = retarget_psd(welch_psd(it->second.samples, it->second.fs), fs);
    }

    if (seg.point_frequency_hz) {
      const double mean_power =
          std::accumulate(psd.powers.begin(), psd.powers.end(), 0.0) /
          static_cast<double>(psd.powers.size());
      psd = add_point_frequency(psd, *seg.point_frequency_hz, seg.point_power * mean_power);
    }

    std::vector<double> x = synthesize_noise(psd, len, seg.seed);
    bool constant = true;
    for (double v : x)
      if (v != x[0]) {
        constant = false;
        break;
      }
    if (!constant) {
      x = scale_noise(x, seg.amplitude);
    } else if (seg.amplitude != 0.0) {
      warnings.push_back("noise segment produced a constant series; amplitude scaling skipped");
    }
    rendered.push_back(std::move(x));
  }

  std::vector<double> noise = n_segments == 1 ? std::move(rendered.front())
                                              : taper_concat(rendered, ov);
  noise.resize(n_total, 0.0);
  return noise;
}

BeatIntervalSeries build_series(const SignalRecipe& recipe) {
  if (recipe.step)
    return apply_step_change(recipe.beat, *recipe.step, recipe.duration_s, recipe.interval_seed);
  return generate_intervals(recipe.beat, GenerationSpan::duration(recipe.duration_s),
                            recipe.interval_seed);
}

LabeledBiosignal compose_one(const CleanSignal& clean, const NoisePlan& plan,
                             const SourceRegistry& registry, const SignalRecipe& recipe,
                             const QualityOptions& quality, bool strict) {
  const std::size_t n_total = clean.samples.size();
  std::vector<std::string> warnings = plan.warnings;
  std::vector<double> noise =
      render_noise(plan, registry, recipe.fs, n_total, recipe.taper_overlap_samples, warnings, strict);

  std::optional<ArtifactRequest> artifact;
  if (plan.artifact) {
    const auto it = registry.artifact_sources.find(plan.artifact->source);
    if (it == registry.artifact_sources.end())
      throw GenerationError("artifact source '" + plan.artifact->source + "' is not registered");
    ArtifactRequest req;
    req.source = &it->second;
    req.seed = plan.artifact->seed;
    artifact = req;
  }

  LabeledBiosignal out = compose(clean, noise, artifact, quality, strict);
  out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
  return out;
}

}  // namespace

SignalRecipe build_recipe(const GeneratorConfig& config, const SourceRegistry& registry,
                          std::uint64_t index) {
  config.validate();
  const std::uint64_t root = config.seed;

  SignalRecipe recipe;
  recipe.index = index;
  recipe.modality = config.pair ? config.pair->first : config.modality;
  recipe.fs = config.fs;
  recipe.duration_s = config.duration_s;
  recipe.taper_overlap_samples =
      static_cast<std::size_t>(std::llround(config.taper_overlap_s * config.fs));

  Rng rng(child_seed(root, index, Stream::recipe));

  recipe.beat = config.beat;
  if (config.randomize) {
    recipe.beat.mu = config.limits.mu.sample(rng);
    if (recipe.beat.gamma) recipe.beat.gamma->sigma = config.limits.gamma_sigma.sample(rng);
  }
  recipe.interval_seed = child_seed(root, index, Stream::intervals);

  if (config.step) {
    recipe.step = *config.step;
  } else if (config.randomize && rng.bernoulli(config.limits.step_probability)) {
    StepChangeSpec step;
    step.mu_prime = config.limits.step_mu_prime.sample(rng);
    step.l = config.limits.step_l.sample(rng);
    step.tau_input = config.limits.step_tau.sample(rng);
    recipe.step = step;
  }

  const std::uint64_t wave_seed = child_seed(root, index, Stream::waveform);
  if (config.waves) {
    recipe.waves = *config.waves;
  } else if (config.randomize) {
    recipe.waves = recipe.modality == Modality::ecg ? sample_ecg_params(config.limits, wave_seed)
                                                    : sample_ppg_params(config.limits, wave_seed);
  } else {
    recipe.waves = recipe.modality == Modality::ecg ? WaveParameterSet::ecg_defaults()
                                                    : WaveParameterSet::ppg_defaults();
  }

  recipe.noise = resolve_noise_plan(config, registry, config.fs, config.duration_s,
                                    child_seed(root, index, Stream::noise));

  if (config.pair) {
    recipe.pair = *config.pair;
    const std::uint64_t pair_seed = child_seed(root, index, Stream::pair);
    if (config.randomize) {
      recipe.second_waves = config.pair->second == Modality::ecg
                                ? sample_ecg_params(config.limits, splitmix64(pair_seed + 1))
                                : sample_ppg_params(config.limits, splitmix64(pair_seed + 1));
    } else {
      recipe.second_waves = config.pair->second == Modality::ecg
                                ? WaveParameterSet::ecg_defaults()
                                : WaveParameterSet::ppg_defaults();
    }
    recipe.second_noise =
        resolve_noise_plan(config, registry, config.fs, config.duration_s, splitmix64(pair_seed + 2));
  }
  return recipe;
}

LabeledBiosignal render_recipe(const SignalRecipe& recipe, const SourceRegistry& registry,
                               const QualityOptions& quality, bool strict, bool detrend) {
  const BeatIntervalSeries series = build_series(recipe);

  SynthOptions synth_options;
  synth_options.strict_resolution = strict;
  synth_options.detrend = detrend;
  CleanSignal clean = synthesize_clean(series, recipe.waves, recipe.fs, synth_options);

  const std::size_t n_total = std::min<std::size_t>(
      clean.samples.size(), static_cast<std::size_t>(std::llround(recipe.duration_s * recipe.fs)));
  trim_clean(clean, n_total);

  return compose_one(clean, recipe.noise, registry, recipe, quality, strict);
}

std::pair<LabeledBiosignal, LabeledBiosignal> generate_pair(
    const SignalRecipe& recipe, const PairSpec& pair, const SourceRegistry& registry,
    const QualityOptions& quality, bool strict, bool detrend) {
  pair.validate();
  const BeatIntervalSeries series = build_series(recipe);

  const double min_interval = *std::min_element(series.intervals.begin(), series.intervals.end());
  const double max_delay =
      pair.delay_step ? std::max(pair.delay_s, pair.delay_step->delay2_s) : pair.delay_s;
  if (max_delay >= min_interval)
    throw GenerationError("pair delay must stay below the shortest beat interval");

  SynthOptions synth_options;
  synth_options.strict_resolution = strict;
  synth_options.detrend = detrend;

  const std::size_t n_total = static_cast<std::size_t>(std::llround(recipe.duration_s * recipe.fs));

  const WaveParameterSet& waves_first =
      recipe.waves.modality == pair.first
          ? recipe.waves
          : (pair.first == Modality::ecg ? WaveParameterSet::ecg_defaults()
                                         : WaveParameterSet::ppg_defaults());
  WaveParameterSet waves_second;
  if (recipe.second_waves && recipe.second_waves->modality == pair.second)
    waves_second = *recipe.second_waves;
  else
    waves_second = pair.second == Modality::ecg ? WaveParameterSet::ecg_defaults()
                                                : WaveParameterSet::ppg_defaults();

  // first signal: straight render
  CleanSignal clean_a = synthesize_clean(series, waves_first, recipe.fs, synth_options);
  trim_clean(clean_a, std::min<std::size_t>(n_total, clean_a.samples.size()));
  LabeledBiosignal a = compose_one(clean_a, recipe.noise, registry, recipe, quality, strict);

  // per-beat delay of the second signal
  const std::size_t n_beats = series.size();
  std::vector<double> delay(n_beats + 2, pair.delay_s);
  if (pair.delay_step) {
    const double d_center = pair.delay_step->l * recipe.duration_s / recipe.beat.mu;
    const double tau = effective_tau(pair.delay_step->tau);
    for (std::size_t k = 1; k < delay.size(); ++k)
      delay[k] = pair.delay_s + (pair.delay_step->delay2_s - pair.delay_s) *
                                    sigmoid((static_cast<double>(k) - d_center) / tau);
  }
  const bool zero_delay = std::all_of(delay.begin(), delay.end(), [](double d) { return d == 0.0; });

  CleanSignal clean_b;
  if (zero_delay) {
    clean_b = synthesize_clean(series, waves_second, recipe.fs, synth_options);
    trim_clean(clean_b, std::min<std::size_t>(n_total, clean_b.samples.size()));
  } else {
    // prepend one beat, shift each boundary by its delay, then drop the
    // leading (theta_1 - delay_1) so the delayed phase continues seamlessly
    std::vector<double> ext;
    ext.reserve(n_beats + 1);
    ext.push_back(series.intervals.front());
    for (std::size_t k = 1; k <= n_beats; ++k) {
      const double theta = series.intervals[k - 1] + delay[k + 1] - delay[k];
      if (!(theta > 0.0)) throw GenerationError("pair delay transition too steep for the beat grid");
      ext.push_back(theta);
    }
    const BeatIntervalSeries ext_series = BeatIntervalSeries::from_intervals(std::move(ext));
    CleanSignal ext_clean = synthesize_clean(ext_series, waves_second, recipe.fs, synth_options);

    const std::size_t pre_samples = ext_clean.beat_boundaries[1];
    const long long delay_samples = std::llround(delay[1] * recipe.fs);
    const std::size_t drop = pre_samples > static_cast<std::size_t>(delay_samples)
                                 ? pre_samples - static_cast<std::size_t>(delay_samples)
                                 : 0;
    const double time_shift = ext_series.intervals.front() - delay[1];

    clean_b.fs = ext_clean.fs;
    clean_b.modality = ext_clean.modality;
    clean_b.wave_names = ext_clean.wave_names;
    clean_b.warnings = ext_clean.warnings;
    clean_b.samples.assign(ext_clean.samples.begin() + static_cast<std::ptrdiff_t>(drop),
                           ext_clean.samples.end());
    for (std::size_t k = 1; k < ext_clean.events.size(); ++k) {
      BeatEvents ev = ext_clean.events[k];
      for (auto& wv : ev.waves) {
        wv.peak_time -= time_shift;
        wv.window_start = std::max(0.0, wv.window_start - time_shift);
        wv.window_end = std::max(0.0, wv.window_end - time_shift);
      }
      clean_b.events.push_back(std::move(ev));
      clean_b.beat_start_times.push_back(ext_clean.beat_start_times[k] - time_shift);
      clean_b.beat_boundaries.push_back(ext_clean.beat_boundaries[k] - drop);
    }
    clean_b.beat_boundaries.push_back(clean_b.samples.size());
    trim_clean(clean_b, std::min<std::size_t>(n_total, clean_b.samples.size()));
  }

  const NoisePlan empty_plan;
  const NoisePlan& plan_b = recipe.second_noise ? *recipe.second_noise : empty_plan;
  LabeledBiosignal b = compose_one(clean_b, plan_b, registry, recipe, quality, strict);
  return {std::move(a), std::move(b)};
}

}  // namespace biosynth
