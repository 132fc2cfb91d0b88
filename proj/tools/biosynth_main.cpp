// biosynth: synthetic ECG/PPG generation and analysis CLI.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "biosynth/analysis.hpp"
#include "biosynth/config.hpp"
#include "biosynth/dataset.hpp"
#include "biosynth/errors.hpp"
#include "biosynth/files.hpp"
#include "biosynth/pipeline.hpp"
#include "biosynth/plot.hpp"
#include "biosynth/version.hpp"

namespace {

using namespace biosynth;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitGeneration = 2;
constexpr int kExitIo = 3;

struct GenerateArgs {
  std::string config_path;
  std::size_t count = 1;
  std::string out_dir = ".";
  std::size_t workers = 1;
  bool quiet = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> modality;
  std::optional<double> duration;
  std::optional<double> fs;
  std::optional<std::string> csv;
};

int run_generate(const GenerateArgs& args) {
  GeneratorConfig config;
  if (!args.config_path.empty()) {
    config = parse_config(args.config_path);
  }
  // flags override config keys
  if (args.modality) {
    config.modality = modality_from_string(*args.modality);
    if (args.config_path.empty() && !args.fs)
      config.fs = config.modality == Modality::ecg ? kDefaultEcgFs : kDefaultPpgFs;
  }
  if (args.seed) config.seed = *args.seed;
  if (args.duration) config.duration_s = *args.duration;
  if (args.fs) config.fs = *args.fs;
  if (args.csv) config.output.csv = *args.csv;
  config.validate();

  BatchOptions options;
  options.workers = args.workers;
  options.quiet = args.quiet;
  const BatchResult result = generate_batch(config, args.count, args.out_dir, options);

  std::cout << "dataset:  " << result.dataset_path.string() << "\n"
            << "manifest: " << result.manifest_path.string() << "\n"
            << "records:  " << result.written << "\n";
  for (const auto& failure : result.failures) std::cerr << "failed signal " << failure << "\n";
  return result.failures.empty() ? kExitOk : kExitGeneration;
}

struct IntervalsArgs {
  double mu = 0.8;
  double beta = 0.1;
  double fb = 0.28;
  bool no_gamma = false;
  double gamma_a = 1.02;
  double gamma_b = 0.075;
  double gamma_sigma = 0.5;
  std::size_t beats = 0;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> step;  // mu_prime, l, tau
  std::string from_file;
  bool annotation_times = false;
  bool strict = false;
  std::string out;
};

int run_intervals(const IntervalsArgs& args) {
  BeatIntervalSeries series;
  if (!args.from_file.empty()) {
    IntervalLoadReport report;
    series = load_intervals(args.from_file,
                            args.annotation_times ? IntervalFileKind::annotation_times
                                                  : IntervalFileKind::intervals,
                            args.strict, &report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  } else {
    BeatModel model;
    model.mu = args.mu;
    model.beta = args.beta;
    model.breathing_hz = args.fb;
    if (args.no_gamma) {
      model.gamma.reset();
    } else {
      GammaParams gp;
      gp.a = args.gamma_a;
      gp.b = args.gamma_b;
      gp.sigma = args.gamma_sigma;
      model.gamma = gp;
    }
    if (!args.step.empty()) {
      if (args.step.size() != 3) throw ConfigError("--step needs mu_prime,l,tau");
      StepChangeSpec spec;
      spec.mu_prime = args.step[0];
      spec.l = args.step[1];
      spec.tau_input = args.step[2];
      const double total = args.duration > 0.0 ? args.duration
                                               : static_cast<double>(args.beats) * model.mu;
      series = apply_step_change(model, spec, total, args.seed);
    } else if (args.beats > 0) {
      series = generate_intervals(model, GenerationSpan::beats(args.beats), args.seed);
    } else if (args.duration > 0.0) {
      series = generate_intervals(model, GenerationSpan::duration(args.duration), args.seed);
    } else {
      throw ConfigError("need --beats or --duration");
    }
  }
  if (args.out.empty()) {
    for (double v : series.intervals) std::printf("%.12g\n", v);
  } else {
    save_intervals_csv(series, args.out);
    std::cout << series.size() << " intervals -> " << args.out << "\n";
  }
  if (series.clamp_count > 0)
    std::cerr << "note: " << series.clamp_count << " intervals clamped at the 0.2 s floor\n";
  return kExitOk;
}

struct NoiseArgs {
  std::vector<double> model;  // alpha, c, sigma2
  std::string psd_file;
  std::string recording;
  double duration = 30.0;
  double fs = 250.0;
  double amplitude = 0.0;
  std::vector<double> point;  // f0, power
  std::uint64_t seed = 0;
  std::string out;
  std::string export_psd;
};

int run_noise(const NoiseArgs& args) {
  const std::size_t n = static_cast<std::size_t>(std::llround(args.duration * args.fs));
  PsdSpec psd;
  if (!args.psd_file.empty()) {
    psd = load_psd_csv(args.psd_file);
  } else if (!args.recording.empty()) {
    const ArtifactSource src = load_noise_recording(args.recording);
    psd = welch_psd(src.samples, src.fs);
  } else {
    NoiseModelParams params;
    if (!args.model.empty()) {
      if (args.model.size() != 3) throw ConfigError("--model needs alpha,c,sigma2");
      params.alpha = args.model[0];
      params.c = args.model[1];
      params.sigma2 = args.model[2];
    }
    std::vector<double> grid;
    for (std::size_t k = 1; k <= n / 2; ++k)
      grid.push_back(static_cast<double>(k) * args.fs / static_cast<double>(n));
    psd = model_psd(grid, params, args.fs);
  }
  if (!args.point.empty()) {
    if (args.point.size() != 2) throw ConfigError("--point needs f0,power");
    psd = add_point_frequency(psd, args.point[0], args.point[1]);
  }

  std::vector<double> noise = synthesize_noise(psd, n, args.seed);
  if (args.amplitude > 0.0) noise = scale_noise(noise, args.amplitude);

  if (!args.export_psd.empty()) save_psd_csv(psd, args.export_psd);
  if (args.out.empty()) {
    for (double v : noise) std::printf("%.9g\n", v);
  } else {
    save_samples_csv(noise, args.out);
    std::cout << noise.size() << " samples -> " << args.out << "\n";
  }
  return kExitOk;
}

struct DfaArgs {
  std::string input;
  bool annotation_times = false;
  int order = 1;
  std::size_t n_scales = 16;
  std::string out;
};

int run_dfa(const DfaArgs& args) {
  const BeatIntervalSeries series =
      load_intervals(args.input,
                     args.annotation_times ? IntervalFileKind::annotation_times
                                           : IntervalFileKind::intervals,
                     false);
  DfaOptions options;
  options.detrend_order = args.order;
  options.n_scales = args.n_scales;
  const DfaResult result = dfa(series.intervals, options);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::binary);
    if (!file) throw IoError("cannot write report: " + args.out);
    os = &file;
  }
  *os << "scale,fluctuation\n";
  char buf[64];
  for (std::size_t i = 0; i < result.scales.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", result.scales[i], result.fluctuations[i]);
    *os << buf;
  }
  std::snprintf(buf, sizeof(buf), "alpha,%.6f\n", result.alpha);
  *os << buf;
  if (os == &file) std::cout << "alpha = " << result.alpha << " -> " << args.out << "\n";
  return kExitOk;
}

struct RoundtripArgs {
  std::vector<double> model;
  std::string psd_file;
  double duration = 60.0;
  double fs = 250.0;
  std::size_t n_seeds = 10;
  std::uint64_t seed = 1;
  std::string out;
};

int run_roundtrip(const RoundtripArgs& args) {
  const std::size_t n = static_cast<std::size_t>(std::llround(args.duration * args.fs));
  PsdSpec psd;
  if (!args.psd_file.empty()) {
    psd = load_psd_csv(args.psd_file);
  } else {
    NoiseModelParams params;
    if (!args.model.empty()) {
      if (args.model.size() != 3) throw ConfigError("--model needs alpha,c,sigma2");
      params.alpha = args.model[0];
      params.c = args.model[1];
      params.sigma2 = args.model[2];
    }
    std::vector<double> grid;
    for (std::size_t k = 1; k <= n / 2; ++k)
      grid.push_back(static_cast<double>(k) * args.fs / static_cast<double>(n));
    psd = model_psd(grid, params, args.fs);
  }

  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < args.n_seeds; ++i) seeds.push_back(args.seed + i);
  const RoundtripReport report = psd_roundtrip_report(psd, n, seeds);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out, std::ios::binary);
    if (!file) throw IoError("cannot write report: " + args.out);
    os = &file;
  }
  *os << "f_lo,f_hi,target_mean,estimate_mean,rel_error\n";
  char buf[160];
  for (const auto& band : report.bands) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.9g,%.9g,%.6f\n", band.f_lo, band.f_hi,
                  band.target_mean, band.estimate_mean, band.rel_error);
    *os << buf;
  }
  std::snprintf(buf, sizeof(buf), "max_abs_rel_error,%.6f\n", report.max_abs_rel_error);
  *os << buf;
  if (os == &file)
    std::cout << "max |rel error| = " << report.max_abs_rel_error << " -> " << args.out << "\n";
  return kExitOk;
}

struct PlotArgs {
  std::string dataset;
  std::size_t index = 0;
  std::string out = "signal.svg";
};

int run_plot(const PlotArgs& args) {
  std::ifstream in(args.dataset);
  if (!in) throw IoError("cannot open dataset: " + args.dataset);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (i == args.index) {
      emit_plot(record_from_ndjson(line), args.out);
      std::cout << "plot -> " << args.out << "\n";
      return kExitOk;
    }
    ++i;
  }
  throw IoError("dataset has no record " + std::to_string(args.index));
}

struct ReplayArgs {
  std::string manifest;
  std::size_t index = 0;
  std::string out;
  std::string verify_dataset;
};

int run_replay(const ReplayArgs& args) {
  const DatasetManifest manifest = read_manifest(args.manifest);
  const auto lines = replay_record_lines(manifest, args.index);

  if (!args.verify_dataset.empty()) {
    std::ifstream in(args.verify_dataset, std::ios::binary);
    if (!in) throw IoError("cannot open dataset: " + args.verify_dataset);
    if (args.index >= manifest.offsets.size() ||
        manifest.offsets[args.index] == std::numeric_limits<std::uint64_t>::max())
      throw GenerationError("signal " + std::to_string(args.index) + " has no dataset record");
    in.seekg(static_cast<std::streamoff>(manifest.offsets[args.index]));
    for (const auto& expected : lines) {
      std::string actual;
      if (!std::getline(in, actual)) throw GenerationError("dataset record missing");
      if (actual != expected) {
        std::cerr << "MISMATCH: replayed record differs from the dataset\n";
        return kExitGeneration;
      }
    }
    std::cout << "verified: replay is byte-identical\n";
  }

  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw IoError("cannot write record: " + args.out);
    for (const auto& line : lines) out << line << '\n';
    std::cout << lines.size() << " record(s) -> " << args.out << "\n";
  } else if (args.verify_dataset.empty()) {
    for (const auto& line : lines) std::cout << line << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic ECG/PPG generator and analysis toolkit"};
  app.set_version_flag("--version", biosynth::kVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "generate a labeled dataset batch");
  cmd_gen->add_option("-c,--config", gen.config_path, "JSON config file");
  cmd_gen->add_option("-n,--count", gen.count, "number of signals");
  cmd_gen->add_option("-o,--out", gen.out_dir, "output directory");
  cmd_gen->add_option("-w,--workers", gen.workers, "parallel workers");
  cmd_gen->add_flag("-q,--quiet", gen.quiet, "suppress progress output");
  cmd_gen->add_option("--seed", [&gen](const std::vector<std::string>& v) {
    gen.seed = std::stoull(v[0]);
    return true;
  }, "root seed (overrides config)");
  cmd_gen->add_option("--modality", [&gen](const std::vector<std::string>& v) {
    gen.modality = v[0];
    return true;
  }, "ecg or ppg (overrides config)");
  cmd_gen->add_option("--duration", [&gen](const std::vector<std::string>& v) {
    gen.duration = std::stod(v[0]);
    return true;
  }, "signal duration in seconds (overrides config)");
  cmd_gen->add_option("--fs", [&gen](const std::vector<std::string>& v) {
    gen.fs = std::stod(v[0]);
    return true;
  }, "sampling rate in Hz (overrides config)");
  cmd_gen->add_option("--csv", [&gen](const std::vector<std::string>& v) {
    gen.csv = v[0];
    return true;
  }, "also export flat CSV files with this base name");

  IntervalsArgs iv;
  auto* cmd_iv = app.add_subcommand("intervals", "generate or ingest beat-interval series");
  cmd_iv->add_option("--mu", iv.mu, "mean beat interval (s)");
  cmd_iv->add_option("--beta", iv.beta, "breathing coefficient (s)");
  cmd_iv->add_option("--fb", iv.fb, "breathing frequency (Hz)");
  cmd_iv->add_flag("--no-gamma", iv.no_gamma, "disable the long-range component");
  cmd_iv->add_option("--gamma-a", iv.gamma_a, "gamma Pareto shape");
  cmd_iv->add_option("--gamma-b", iv.gamma_b, "gamma feedback coefficient");
  cmd_iv->add_option("--gamma-sigma", iv.gamma_sigma, "gamma innovation sigma (s)");
  cmd_iv->add_option("--beats", iv.beats, "number of beats");
  cmd_iv->add_option("--duration", iv.duration, "target duration (s)");
  cmd_iv->add_option("--seed", iv.seed, "seed");
  cmd_iv->add_option("--step", iv.step, "step change: mu_prime,l,tau")->delimiter(',');
  cmd_iv->add_option("--from", iv.from_file, "load intervals from a file instead");
  cmd_iv->add_flag("--annotation-times", iv.annotation_times,
                   "input file holds cumulative event times");
  cmd_iv->add_flag("--strict", iv.strict, "reject out-of-range intervals");
  cmd_iv->add_option("-o,--out", iv.out, "output CSV (default stdout)");

  NoiseArgs nz;
  auto* cmd_nz = app.add_subcommand("noise", "synthesize time-domain noise from a PSD");
  cmd_nz->add_option("--model", nz.model, "model PSD parameters: alpha,c,sigma2")->delimiter(',');
  cmd_nz->add_option("--psd", nz.psd_file, "PSD CSV file (freq_hz,power)");
  cmd_nz->add_option("--recording", nz.recording, "estimate the PSD from this recording");
  cmd_nz->add_option("--duration", nz.duration, "duration (s)");
  cmd_nz->add_option("--fs", nz.fs, "sampling rate (Hz)");
  cmd_nz->add_option("--amplitude", nz.amplitude, "scale output to this standard deviation");
  cmd_nz->add_option("--point", nz.point, "mains point frequency: f0,power")->delimiter(',');
  cmd_nz->add_option("--seed", nz.seed, "seed");
  cmd_nz->add_option("-o,--out", nz.out, "output CSV (default stdout)");
  cmd_nz->add_option("--export-psd", nz.export_psd, "also write the synthesis PSD");

  auto* cmd_an = app.add_subcommand("analyze", "statistical validation tools");
  cmd_an->require_subcommand(1);

  DfaArgs da;
  auto* cmd_dfa = cmd_an->add_subcommand("dfa", "detrended fluctuation analysis of intervals");
  cmd_dfa->add_option("-i,--input", da.input, "interval file")->required();
  cmd_dfa->add_flag("--annotation-times", da.annotation_times,
                    "input file holds cumulative event times");
  cmd_dfa->add_option("--order", da.order, "detrend polynomial order");
  cmd_dfa->add_option("--scales", da.n_scales, "number of log-spaced scales");
  cmd_dfa->add_option("-o,--out", da.out, "report CSV (default stdout)");

  RoundtripArgs rt;
  auto* cmd_rt = cmd_an->add_subcommand("roundtrip", "PSD -> noise -> Welch round-trip report");
  cmd_rt->add_option("--model", rt.model, "model PSD parameters: alpha,c,sigma2")->delimiter(',');
  cmd_rt->add_option("--psd", rt.psd_file, "PSD CSV file");
  cmd_rt->add_option("--duration", rt.duration, "synthesis duration (s)");
  cmd_rt->add_option("--fs", rt.fs, "sampling rate (Hz)");
  cmd_rt->add_option("--seeds", rt.n_seeds, "number of seeds to average");
  cmd_rt->add_option("--seed", rt.seed, "first seed");
  cmd_rt->add_option("-o,--out", rt.out, "report CSV (default stdout)");

  PlotArgs pl;
  auto* cmd_pl = app.add_subcommand("plot", "render one dataset record as SVG");
  cmd_pl->add_option("-d,--dataset", pl.dataset, "dataset NDJSON file")->required();
  cmd_pl->add_option("-i,--index", pl.index, "record index");
  cmd_pl->add_option("-o,--out", pl.out, "output SVG path");

  ReplayArgs rp;
  auto* cmd_rp = app.add_subcommand("replay", "re-render one signal from a manifest");
  cmd_rp->add_option("-m,--manifest", rp.manifest, "manifest file")->required();
  cmd_rp->add_option("-i,--index", rp.index, "signal index");
  cmd_rp->add_option("-o,--out", rp.out, "write the replayed record here");
  cmd_rp->add_option("--verify", rp.verify_dataset, "compare against this dataset file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_iv->parsed()) return run_intervals(iv);
    if (cmd_nz->parsed()) return run_noise(nz);
    if (cmd_an->parsed()) {
      if (cmd_dfa->parsed()) return run_dfa(da);
      if (cmd_rt->parsed()) return run_roundtrip(rt);
    }
    if (cmd_pl->parsed()) return run_plot(pl);
    if (cmd_rp->parsed()) return run_replay(rp);
  } catch (const biosynth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const biosynth::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const biosynth::GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }
  return kExitOk;
}
