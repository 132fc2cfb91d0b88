#include "biosynth/randomization.hpp"

#include <stdexcept>

#include "biosynth/errors.hpp"

namespace biosynth {

void Range::validate(const std::string& name) const {
  if (lo > hi)
    throw ConfigError("range '" + name + "': low " + std::to_string(lo) + " > high " +
                      std::to_string(hi));
}

namespace {

void validate_wave_ranges(const WaveRanges& wr, const std::string& name) {
  wr.d.validate(name + ".d");
  wr.a.validate(name + ".a");
  wr.w.validate(name + ".w");
  if (wr.m) wr.m->validate(name + ".m");
}

double checked_sample(const Range& r, Rng& rng, const char* what) {
  const double v = r.sample(rng);
  if (!r.contains(v)) throw GenerationError(std::string("sampled value escaped its range: ") + what);
  return v;
}

}  // namespace

void RandomizationLimits::validate() const {
  validate_wave_ranges(ecg_p, "P");
  validate_wave_ranges(ecg_q, "Q");
  validate_wave_ranges(ecg_r, "R");
  validate_wave_ranges(ecg_s, "S");
  validate_wave_ranges(ecg_t, "T");
  validate_wave_ranges(ppg_sys, "Sys");
  validate_wave_ranges(ppg_dias, "Dias");
  mu.validate("mu");
  gamma_sigma.validate("gamma_sigma");
  noise_alpha.validate("noise_alpha");
  noise_c.validate("noise_c");
  noise_sigma2.validate("noise_sigma2");
  noise_amplitude.validate("noise_amplitude");
  point_power.validate("point_power");
  step_mu_prime.validate("step_mu_prime");
  step_l.validate("step_l");
  step_tau.validate("step_tau");
  if (step_probability < 0.0 || step_probability > 1.0)
    throw ConfigError("step_probability must be in [0, 1]");
  if (artifact_probability < 0.0 || artifact_probability > 1.0)
    throw ConfigError("artifact_probability must be in [0, 1]");
  if (point_frequency_probability < 0.0 || point_frequency_probability > 1.0)
    throw ConfigError("point_frequency_probability must be in [0, 1]");
  if (!(mu.lo > 0.0)) throw ConfigError("mu range must be positive");
  if (!(step_mu_prime.lo > 0.0)) throw ConfigError("step_mu_prime range must be positive");
}

void PairSpec::validate() const {
  if (delay_s < 0.0) throw std::invalid_argument("pair: delay must be >= 0");
  if (delay_step && delay_step->delay2_s < 0.0)
    throw std::invalid_argument("pair: delay_step target must be >= 0");
  if (delay_step && !(delay_step->tau > 0.0))
    throw std::invalid_argument("pair: delay_step tau must be > 0");
}

WaveParameterSet sample_ecg_params(const RandomizationLimits& limits, std::uint64_t seed) {
  limits.validate();
  Rng rng(seed);
  WaveParameterSet set;
  set.modality = Modality::ecg;

  auto draw = [&](const std::string& name, const WaveRanges& wr, bool fixed_location) {
    WaveParams p;
    p.d = fixed_location ? wr.d.lo : checked_sample(wr.d, rng, name.c_str());
    p.a = checked_sample(wr.a, rng, name.c_str());
    p.w = checked_sample(wr.w, rng, name.c_str());
    if (wr.m) {
      if (limits.randomize_t_asymmetry)
        p.m = checked_sample(*wr.m, rng, name.c_str());
      else
        p.m = 0.5 * (wr.m->lo + wr.m->hi);
    }
    set.waves.push_back({name, p});
  };

  draw("P", limits.ecg_p, false);
  draw("Q", limits.ecg_q, false);
  draw("R", limits.ecg_r, true);
  draw("S", limits.ecg_s, false);
  draw("T", limits.ecg_t, false);
  set.validate();
  return set;
}

WaveParameterSet sample_ppg_params(const RandomizationLimits& limits, std::uint64_t seed) {
  limits.validate();
  Rng rng(seed);
  const double u = rng.uniform01();

  WaveParameterSet set;
  set.modality = Modality::ppg;
  auto place = [&](const std::string& name, const WaveRanges& wr) {
    WaveParams p;
    p.d = wr.d.at(u);
    p.a = wr.a.at(u);
    p.w = wr.w.at(u);
    set.waves.push_back({name, p});
  };
  place("Sys", limits.ppg_sys);
  place("Dias", limits.ppg_dias);
  set.validate();
  return set;
}

NoisePlan sample_noise_config(const RandomizationLimits& limits,
                              const std::vector<std::string>& measured_types,
                              const std::vector<std::string>& artifact_sources, double fs,
                              double duration_s, std::uint64_t seed, bool strict) {
  limits.validate();
  if (!(fs > 0.0) || !(duration_s > 0.0))
    throw std::invalid_argument("sample_noise_config: fs and duration must be > 0");

  Rng rng(seed);
  NoisePlan plan;

  std::vector<std::string> types = measured_types;
  types.push_back("model");

  NoiseSegmentPlan seg;
  seg.type = types[rng.index(types.size())];
  seg.duration_s = duration_s;
  seg.amplitude = checked_sample(limits.noise_amplitude, rng, "noise_amplitude");
  if (seg.type == "model") {
    NoiseModelParams mp;
    mp.alpha = checked_sample(limits.noise_alpha, rng, "noise_alpha");
    mp.c = checked_sample(limits.noise_c, rng, "noise_c");
    mp.sigma2 = checked_sample(limits.noise_sigma2, rng, "noise_sigma2");
    seg.model = mp;
  }
  if (rng.bernoulli(limits.point_frequency_probability)) {
    double f0 = rng.uniform01() * fs / 2.0;
    const double df_floor = fs / 2.0 * 1e-6;
    f0 = std::max(df_floor, std::min(f0, fs / 2.0 - df_floor));
    seg.point_frequency_hz = f0;
    seg.point_power = checked_sample(limits.point_power, rng, "point_power");
  }
  seg.seed = rng.next_u64();
  plan.segments.push_back(seg);

  if (rng.bernoulli(limits.artifact_probability)) {
    if (artifact_sources.empty()) {
      const char* msg = "artifact drawn but no artifact source registered";
      if (strict) throw GenerationError(msg);
      plan.warnings.push_back(msg);
    } else {
      ArtifactPlan art;
      art.source = artifact_sources[rng.index(artifact_sources.size())];
      art.seed = rng.next_u64();
      plan.artifact = art;
    }
  }
  return plan;
}

}  // namespace biosynth
