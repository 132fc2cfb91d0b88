#include "biosynth/config.hpp"

#include <fstream>
#include <set>

#include "biosynth/errors.hpp"

namespace biosynth {

namespace {

using nlohmann::json;

// Strict parsing rejects keys outside the schema so typos do not silently
// fall back to defaults.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where,
                bool strict) {
  if (!strict || !j.is_object()) return;
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + (where.empty() ? "config" : where));
  }
}

double get_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.at(key).get<double>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

Range get_range(const json& j, const std::string& key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    throw ConfigError("'" + key + "' must be a [low, high] pair");
  Range out{r[0].get<double>(), r[1].get<double>()};
  out.validate(key);
  return out;
}

json range_to_json(const Range& r) { return json::array({r.lo, r.hi}); }

WaveRanges parse_wave_ranges(const json& j, const std::string& name, WaveRanges fallback,
                             bool strict) {
  check_keys(j, {"d", "a", "w", "m"}, "limits.waves." + name, strict);
  WaveRanges out = fallback;
  out.d = get_range(j, "d", fallback.d);
  out.a = get_range(j, "a", fallback.a);
  out.w = get_range(j, "w", fallback.w);
  if (j.contains("m")) out.m = get_range(j, "m", fallback.m.value_or(Range{1.0, 1.0}));
  return out;
}

json wave_ranges_to_json(const WaveRanges& wr) {
  json j;
  j["d"] = range_to_json(wr.d);
  j["a"] = range_to_json(wr.a);
  j["w"] = range_to_json(wr.w);
  if (wr.m) j["m"] = range_to_json(*wr.m);
  return j;
}

WaveParams parse_wave_params(const json& j, const std::string& where, bool strict) {
  check_keys(j, {"d", "a", "w", "m"}, where, strict);
  WaveParams p;
  p.d = get_num(j, "d", 0.0);
  p.a = get_num(j, "a", 0.0);
  p.w = get_num(j, "w", 0.1);
  p.m = get_num(j, "m", 1.0);
  return p;
}

NoiseModelParams parse_model_params(const json& j, const std::string& where, bool strict) {
  check_keys(j, {"alpha", "c", "sigma2"}, where, strict);
  NoiseModelParams mp;
  mp.alpha = get_num(j, "alpha", mp.alpha);
  mp.c = get_num(j, "c", mp.c);
  mp.sigma2 = get_num(j, "sigma2", mp.sigma2);
  return mp;
}

json model_params_to_json(const NoiseModelParams& mp) {
  return json{{"alpha", mp.alpha}, {"c", mp.c}, {"sigma2", mp.sigma2}};
}

}  // namespace

void GeneratorConfig::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
  if (fs < 50.0) throw ConfigError("fs must be >= 50 Hz");
  if (taper_overlap_s < 0.0) throw ConfigError("taper_overlap_s must be >= 0");
  if (!(quality.window_s > 0.0)) throw ConfigError("quality.window_s must be > 0");
  if (quality.t1_per_sample > quality.t2_per_sample) throw ConfigError("quality: t1 > t2");
  try {
    beat.validate();
    if (step) step->validate();
    if (waves) {
      waves->validate();
      if (waves->modality != modality) throw ConfigError("waves do not match the modality");
    }
    limits.validate();
    if (pair) pair->validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  for (const auto& seg : noise_plan) {
    if (seg.duration_s < 0.0) throw ConfigError("noise segment duration must be >= 0");
    if (seg.amplitude && *seg.amplitude < 0.0) throw ConfigError("noise amplitude must be >= 0");
    if (seg.model) {
      try {
        seg.model->validate();
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (seg.point_frequency_hz &&
        (!(*seg.point_frequency_hz > 0.0) || !(*seg.point_frequency_hz < fs / 2.0)))
      throw ConfigError("noise segment point frequency must be in (0, fs/2)");
    if (seg.point_power < 0.0) throw ConfigError("point_power must be >= 0");
  }
}

GeneratorConfig parse_config_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  GeneratorConfig cfg;
  // strictness is read first so it can govern unknown-key checking
  cfg.strict = get_bool(j, "strict", false);

  check_keys(j,
             {"modality", "duration_s", "fs", "seed", "strict", "randomize", "detrend", "beat",
              "step", "waves", "limits", "noise", "quality", "pair", "output"},
             "", cfg.strict);

  if (j.contains("modality")) {
    if (!j.at("modality").is_string()) throw ConfigError("'modality' must be a string");
    try {
      cfg.modality = modality_from_string(j.at("modality").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  cfg.duration_s = get_num(j, "duration_s", 30.0);
  cfg.fs = get_num(j, "fs", cfg.modality == Modality::ecg ? kDefaultEcgFs : kDefaultPpgFs);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw ConfigError("'seed' must be an integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.randomize = get_bool(j, "randomize", true);
  cfg.detrend = get_bool(j, "detrend", false);

  if (j.contains("beat")) {
    const json& b = j.at("beat");
    check_keys(b, {"mu", "beta", "breathing_hz", "gamma"}, "beat", cfg.strict);
    cfg.beat.mu = get_num(b, "mu", cfg.beat.mu);
    cfg.beat.beta = get_num(b, "beta", cfg.beat.beta);
    cfg.beat.breathing_hz = get_num(b, "breathing_hz", cfg.beat.breathing_hz);
    if (b.contains("gamma")) {
      const json& g = b.at("gamma");
      check_keys(g, {"enabled", "a", "b", "sigma", "scale"}, "beat.gamma", cfg.strict);
      if (!get_bool(g, "enabled", true)) {
        cfg.beat.gamma.reset();
      } else {
        GammaParams gp;
        gp.a = get_num(g, "a", gp.a);
        gp.b = get_num(g, "b", gp.b);
        gp.sigma = get_num(g, "sigma", gp.sigma);
        gp.scale = get_num(g, "scale", gp.scale);
        cfg.beat.gamma = gp;
      }
    }
  }

  if (j.contains("step")) {
    const json& s = j.at("step");
    check_keys(s, {"mu_prime", "l", "tau"}, "step", cfg.strict);
    StepChangeSpec spec;
    spec.mu_prime = get_num(s, "mu_prime", spec.mu_prime);
    spec.l = get_num(s, "l", spec.l);
    spec.tau_input = get_num(s, "tau", spec.tau_input);
    cfg.step = spec;
  }

  if (j.contains("waves")) {
    const json& w = j.at("waves");
    WaveParameterSet set = cfg.modality == Modality::ecg ? WaveParameterSet::ecg_defaults()
                                                         : WaveParameterSet::ppg_defaults();
    std::set<std::string> allowed;
    for (const auto& wv : set.waves) allowed.insert(wv.name);
    check_keys(w, allowed, "waves", cfg.strict);
    for (auto& wv : set.waves)
      if (w.contains(wv.name))
        wv.params = parse_wave_params(w.at(wv.name), "waves." + wv.name, cfg.strict);
    cfg.waves = set;
  }

  if (j.contains("limits")) {
    const json& l = j.at("limits");
    check_keys(l,
               {"waves", "mu", "gamma_sigma", "noise_alpha", "noise_c", "noise_sigma2",
                "noise_amplitude", "point_power", "step_mu_prime", "step_l", "step_tau",
                "step_probability", "artifact_probability", "point_frequency_probability",
                "randomize_t_asymmetry"},
               "limits", cfg.strict);
    RandomizationLimits& lim = cfg.limits;
    if (l.contains("waves")) {
      const json& lw = l.at("waves");
      check_keys(lw, {"P", "Q", "R", "S", "T", "Sys", "Dias"}, "limits.waves", cfg.strict);
      if (lw.contains("P")) lim.ecg_p = parse_wave_ranges(lw.at("P"), "P", lim.ecg_p, cfg.strict);
      if (lw.contains("Q")) lim.ecg_q = parse_wave_ranges(lw.at("Q"), "Q", lim.ecg_q, cfg.strict);
      if (lw.contains("R")) lim.ecg_r = parse_wave_ranges(lw.at("R"), "R", lim.ecg_r, cfg.strict);
      if (lw.contains("S")) lim.ecg_s = parse_wave_ranges(lw.at("S"), "S", lim.ecg_s, cfg.strict);
      if (lw.contains("T")) lim.ecg_t = parse_wave_ranges(lw.at("T"), "T", lim.ecg_t, cfg.strict);
      if (lw.contains("Sys"))
        lim.ppg_sys = parse_wave_ranges(lw.at("Sys"), "Sys", lim.ppg_sys, cfg.strict);
      if (lw.contains("Dias"))
        lim.ppg_dias = parse_wave_ranges(lw.at("Dias"), "Dias", lim.ppg_dias, cfg.strict);
    }
    lim.mu = get_range(l, "mu", lim.mu);
    lim.gamma_sigma = get_range(l, "gamma_sigma", lim.gamma_sigma);
    lim.noise_alpha = get_range(l, "noise_alpha", lim.noise_alpha);
    lim.noise_c = get_range(l, "noise_c", lim.noise_c);
    lim.noise_sigma2 = get_range(l, "noise_sigma2", lim.noise_sigma2);
    lim.noise_amplitude = get_range(l, "noise_amplitude", lim.noise_amplitude);
    lim.point_power = get_range(l, "point_power", lim.point_power);
    lim.step_mu_prime = get_range(l, "step_mu_prime", lim.step_mu_prime);
    lim.step_l = get_range(l, "step_l", lim.step_l);
    lim.step_tau = get_range(l, "step_tau", lim.step_tau);
    lim.step_probability = get_num(l, "step_probability", lim.step_probability);
    lim.artifact_probability = get_num(l, "artifact_probability", lim.artifact_probability);
    lim.point_frequency_probability =
        get_num(l, "point_frequency_probability", lim.point_frequency_probability);
    lim.randomize_t_asymmetry = get_bool(l, "randomize_t_asymmetry", lim.randomize_t_asymmetry);
  }

  if (j.contains("noise")) {
    const json& nz = j.at("noise");
    check_keys(nz, {"enabled", "taper_overlap_s", "plan", "recordings", "artifacts"}, "noise",
               cfg.strict);
    cfg.noise_enabled = get_bool(nz, "enabled", true);
    cfg.taper_overlap_s = get_num(nz, "taper_overlap_s", cfg.taper_overlap_s);
    if (nz.contains("plan")) {
      if (!nz.at("plan").is_array()) throw ConfigError("noise.plan must be an array");
      for (const json& sj : nz.at("plan")) {
        check_keys(sj, {"type", "duration_s", "amplitude", "model", "point_frequency_hz", "point_power"},
                   "noise.plan[]", cfg.strict);
        NoiseSegmentConfig seg;
        if (sj.contains("type")) {
          if (!sj.at("type").is_string()) throw ConfigError("noise segment type must be a string");
          seg.type = sj.at("type").get<std::string>();
        }
        seg.duration_s = get_num(sj, "duration_s", 0.0);
        if (sj.contains("amplitude")) seg.amplitude = get_num(sj, "amplitude", 0.0);
        if (sj.contains("model"))
          seg.model = parse_model_params(sj.at("model"), "noise.plan[].model", cfg.strict);
        if (sj.contains("point_frequency_hz"))
          seg.point_frequency_hz = get_num(sj, "point_frequency_hz", 0.0);
        seg.point_power = get_num(sj, "point_power", 0.0);
        cfg.noise_plan.push_back(seg);
      }
    }
    auto read_paths = [&](const char* key, std::vector<std::string>& out) {
      if (!nz.contains(key)) return;
      if (!nz.at(key).is_array()) throw ConfigError(std::string("noise.") + key + " must be an array");
      for (const json& p : nz.at(key)) {
        if (!p.is_string()) throw ConfigError(std::string("noise.") + key + " entries must be strings");
        out.push_back(p.get<std::string>());
      }
    };
    read_paths("recordings", cfg.noise_recordings);
    read_paths("artifacts", cfg.artifact_files);
  }

  if (j.contains("quality")) {
    const json& q = j.at("quality");
    check_keys(q, {"window_s", "t1_per_sample", "t2_per_sample"}, "quality", cfg.strict);
    cfg.quality.window_s = get_num(q, "window_s", cfg.quality.window_s);
    cfg.quality.t1_per_sample = get_num(q, "t1_per_sample", cfg.quality.t1_per_sample);
    cfg.quality.t2_per_sample = get_num(q, "t2_per_sample", cfg.quality.t2_per_sample);
  }

  if (j.contains("pair")) {
    const json& p = j.at("pair");
    check_keys(p, {"first", "second", "delay_s", "delay_step"}, "pair", cfg.strict);
    PairSpec pair;
    try {
      if (p.contains("first")) pair.first = modality_from_string(p.at("first").get<std::string>());
      if (p.contains("second"))
        pair.second = modality_from_string(p.at("second").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    pair.delay_s = get_num(p, "delay_s", pair.delay_s);
    if (p.contains("delay_step")) {
      const json& ds = p.at("delay_step");
      check_keys(ds, {"delay2_s", "l", "tau"}, "pair.delay_step", cfg.strict);
      DelayStepSpec step;
      step.delay2_s = get_num(ds, "delay2_s", 0.0);
      step.l = get_num(ds, "l", step.l);
      step.tau = get_num(ds, "tau", step.tau);
      pair.delay_step = step;
    }
    cfg.pair = pair;
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dataset", "manifest", "csv"}, "output", cfg.strict);
    if (o.contains("dataset")) cfg.output.dataset = o.at("dataset").get<std::string>();
    if (o.contains("manifest")) cfg.output.manifest = o.at("manifest").get<std::string>();
    if (o.contains("csv")) cfg.output.csv = o.at("csv").get<std::string>();
  }

  cfg.validate();
  return cfg;
}

GeneratorConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config_json(j);
}

nlohmann::json config_to_json(const GeneratorConfig& config) {
  json j;
  j["modality"] = to_string(config.modality);
  j["duration_s"] = config.duration_s;
  j["fs"] = config.fs;
  j["seed"] = config.seed;
  j["strict"] = config.strict;
  j["randomize"] = config.randomize;
  j["detrend"] = config.detrend;

  json beat;
  beat["mu"] = config.beat.mu;
  beat["beta"] = config.beat.beta;
  beat["breathing_hz"] = config.beat.breathing_hz;
  json gamma;
  gamma["enabled"] = config.beat.gamma.has_value();
  if (config.beat.gamma) {
    gamma["a"] = config.beat.gamma->a;
    gamma["b"] = config.beat.gamma->b;
    gamma["sigma"] = config.beat.gamma->sigma;
    gamma["scale"] = config.beat.gamma->scale;
  }
  beat["gamma"] = gamma;
  j["beat"] = beat;

  if (config.step) {
    j["step"] = {{"mu_prime", config.step->mu_prime},
                 {"l", config.step->l},
                 {"tau", config.step->tau_input}};
  }
  if (config.waves) {
    json w;
    for (const auto& wv : config.waves->waves) {
      w[wv.name] = {{"d", wv.params.d}, {"a", wv.params.a}, {"w", wv.params.w}, {"m", wv.params.m}};
    }
    j["waves"] = w;
  }

  const RandomizationLimits& lim = config.limits;
  json limits;
  json lw;
  lw["P"] = wave_ranges_to_json(lim.ecg_p);
  lw["Q"] = wave_ranges_to_json(lim.ecg_q);
  lw["R"] = wave_ranges_to_json(lim.ecg_r);
  lw["S"] = wave_ranges_to_json(lim.ecg_s);
  lw["T"] = wave_ranges_to_json(lim.ecg_t);
  lw["Sys"] = wave_ranges_to_json(lim.ppg_sys);
  lw["Dias"] = wave_ranges_to_json(lim.ppg_dias);
  limits["waves"] = lw;
  limits["mu"] = range_to_json(lim.mu);
  limits["gamma_sigma"] = range_to_json(lim.gamma_sigma);
  limits["noise_alpha"] = range_to_json(lim.noise_alpha);
  limits["noise_c"] = range_to_json(lim.noise_c);
  limits["noise_sigma2"] = range_to_json(lim.noise_sigma2);
  limits["noise_amplitude"] = range_to_json(lim.noise_amplitude);
  limits["point_power"] = range_to_json(lim.point_power);
  limits["step_mu_prime"] = range_to_json(lim.step_mu_prime);
  limits["step_l"] = range_to_json(lim.step_l);
  limits["step_tau"] = range_to_json(lim.step_tau);
  limits["step_probability"] = lim.step_probability;
  limits["artifact_probability"] = lim.artifact_probability;
  limits["point_frequency_probability"] = lim.point_frequency_probability;
  limits["randomize_t_asymmetry"] = lim.randomize_t_asymmetry;
  j["limits"] = limits;

  json nz;
  nz["enabled"] = config.noise_enabled;
  nz["taper_overlap_s"] = config.taper_overlap_s;
  if (!config.noise_plan.empty()) {
    json plan = json::array();
    for (const auto& seg : config.noise_plan) {
      json sj;
      sj["type"] = seg.type;
      sj["duration_s"] = seg.duration_s;
      if (seg.amplitude) sj["amplitude"] = *seg.amplitude;
      if (seg.model) sj["model"] = model_params_to_json(*seg.model);
      if (seg.point_frequency_hz) sj["point_frequency_hz"] = *seg.point_frequency_hz;
      sj["point_power"] = seg.point_power;
      plan.push_back(sj);
    }
    nz["plan"] = plan;
  }
  if (!config.noise_recordings.empty()) nz["recordings"] = config.noise_recordings;
  if (!config.artifact_files.empty()) nz["artifacts"] = config.artifact_files;
  j["noise"] = nz;

  j["quality"] = {{"window_s", config.quality.window_s},
                  {"t1_per_sample", config.quality.t1_per_sample},
                  {"t2_per_sample", config.quality.t2_per_sample}};

  if (config.pair) {
    json p;
    p["first"] = to_string(config.pair->first);
    p["second"] = to_string(config.pair->second);
    p["delay_s"] = config.pair->delay_s;
    if (config.pair->delay_step) {
      p["delay_step"] = {{"delay2_s", config.pair->delay_step->delay2_s},
                         {"l", config.pair->delay_step->l},
                         {"tau", config.pair->delay_step->tau}};
    }
    j["pair"] = p;
  }

  j["output"] = {{"dataset", config.output.dataset},
                 {"manifest", config.output.manifest},
                 {"csv", config.output.csv}};
  return j;
}

std::string config_hash(const GeneratorConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace biosynth
