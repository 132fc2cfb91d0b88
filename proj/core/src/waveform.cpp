#include "biosynth/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "biosynth/errors.hpp"

namespace biosynth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double skewed_gauss_derivative(double psi, double a, double w, double m) {
  const double m_eff = psi > 0.0 ? m : 1.0;
  return -(kTwoPi * m_eff * a * psi / (w * w)) * std::exp(-m_eff * psi * psi / (2.0 * w * w));
}

double skewed_gauss(double psi, double a, double w, double m) {
  const double m_eff = psi > 0.0 ? m : 1.0;
  return a * std::exp(-m_eff * psi * psi / (2.0 * w * w));
}

double wrap_to_pi(double psi) { return psi - kTwoPi * std::round(psi / kTwoPi); }

// Replica terms beyond this exponent are below 1e-26 and skipped.
constexpr double kReplicaExponentCutoff = 60.0;

}  // namespace

std::string to_string(Modality m) { return m == Modality::ecg ? "ecg" : "ppg"; }

Modality modality_from_string(const std::string& s) {
  if (s == "ecg" || s == "ECG") return Modality::ecg;
  if (s == "ppg" || s == "PPG") return Modality::ppg;
  throw std::invalid_argument("unknown modality: " + s);
}

void WaveParams::validate() const {
  if (!(w > 0.0)) throw std::invalid_argument("wave: width w must be > 0");
  if (m < 1.0) throw std::invalid_argument("wave: asymmetry m must be >= 1");
  if (!(std::abs(d) < 1.0)) throw std::invalid_argument("wave: |d| must be < 1");
}

WaveParameterSet WaveParameterSet::ecg_defaults() {
  WaveParameterSet set;
  set.modality = Modality::ecg;
  set.waves = {
      {"P", {-0.15, 0.125, 0.075, 1.0}},
      {"Q", {-0.04, -0.125, 0.055, 1.0}},
      {"R", {0.0, 1.0, 0.0725, 1.0}},
      {"S", {0.04, -0.125, 0.055, 1.0}},
      {"T", {0.225, 0.35, 0.1475, 2.0}},
  };
  return set;
}

WaveParameterSet WaveParameterSet::ppg_defaults() {
  WaveParameterSet set;
  set.modality = Modality::ppg;
  set.waves = {
      {"Sys", {-0.27, 0.75, 0.7, 1.0}},
      {"Dias", {0.11, 0.7, 1.9, 1.0}},
  };
  return set;
}

const WaveParams* WaveParameterSet::find(const std::string& name) const {
  for (const auto& wv : waves)
    if (wv.name == name) return &wv.params;
  return nullptr;
}

void WaveParameterSet::validate() const {
  const std::vector<std::string> expected =
      modality == Modality::ecg ? std::vector<std::string>{"P", "Q", "R", "S", "T"}
                                : std::vector<std::string>{"Sys", "Dias"};
  if (waves.size() != expected.size())
    throw std::invalid_argument("wave set: wrong number of waves for modality");
  for (std::size_t i = 0; i < waves.size(); ++i) {
    if (waves[i].name != expected[i])
      throw std::invalid_argument("wave set: expected wave '" + expected[i] + "', got '" +
                                  waves[i].name + "'");
    waves[i].params.validate();
  }
  if (modality == Modality::ecg && find("R")->d != 0.0)
    throw std::invalid_argument("wave set: R wave location must be 0");
}

double phase_ramp(double t, const BeatIntervalSeries& series) {
  series.validate();
  if (t < 0.0 || t > series.total_duration())
    throw std::invalid_argument("phase_ramp: t outside the series duration");
  if (t == 0.0) return 0.0;
  const auto& ct = series.cumulative_times;
  // beat k covers (T_{k-1}, T_k]
  const auto it = std::lower_bound(ct.begin() + 1, ct.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - ct.begin());
  return (t - ct[k - 1]) / series.intervals[k - 1];
}

double wave_derivative(double phi, const WaveParams& p) {
  return skewed_gauss_derivative(phi - p.d * kPi, p.a, p.w, p.m);
}

double wave_derivative_circular(double phi, const WaveParams& p) {
  const double psi = wrap_to_pi(phi - p.d * kPi);
  double g = skewed_gauss_derivative(psi, p.a, p.w, p.m);
  for (int r = 1; r <= 2; ++r) {
    const double lo = kTwoPi * r - kPi;  // min |psi + 2*pi*r| over the wrap range
    if (lo * lo / (2.0 * p.w * p.w) > kReplicaExponentCutoff) break;
    g += skewed_gauss_derivative(psi + kTwoPi * r, p.a, p.w, p.m);
    g += skewed_gauss_derivative(psi - kTwoPi * r, p.a, p.w, p.m);
  }
  return g;
}

namespace {

double wave_value_circular(double phi, const WaveParams& p) {
  const double psi = wrap_to_pi(phi - p.d * kPi);
  double f = skewed_gauss(psi, p.a, p.w, p.m);
  for (int r = 1; r <= 2; ++r) {
    const double lo = kTwoPi * r - kPi;
    if (lo * lo / (2.0 * p.w * p.w) > kReplicaExponentCutoff) break;
    f += skewed_gauss(psi + kTwoPi * r, p.a, p.w, p.m);
    f += skewed_gauss(psi - kTwoPi * r, p.a, p.w, p.m);
  }
  return f;
}

}  // namespace

CleanSignal synthesize_clean(const BeatIntervalSeries& series, const WaveParameterSet& params,
                             double fs, const SynthOptions& options) {
  series.validate();
  params.validate();
  if (fs < 50.0) throw std::invalid_argument("synthesize_clean: fs must be >= 50 Hz");

  CleanSignal out;
  out.fs = fs;
  out.modality = params.modality;
  for (const auto& wv : params.waves) out.wave_names.push_back(wv.name);

  // resolution guard: at least two samples per standard deviation of the
  // narrowest wave within the shortest beat
  const double theta_min = *std::min_element(series.intervals.begin(), series.intervals.end());
  double w_min = params.waves.front().params.w;
  std::string w_min_name = params.waves.front().name;
  for (const auto& wv : params.waves) {
    if (wv.params.w < w_min) {
      w_min = wv.params.w;
      w_min_name = wv.name;
    }
  }
  const double samples_per_sigma = w_min * theta_min * fs / kTwoPi;
  if (samples_per_sigma < 2.0) {
    std::ostringstream msg;
    msg << "fs=" << fs << " Hz resolves wave '" << w_min_name << "' (w=" << w_min
        << ") at only " << samples_per_sigma << " samples per sigma in the shortest beat ("
        << theta_min << " s); need >= 2";
    if (options.strict_resolution) throw GenerationError(msg.str());
    out.warnings.push_back(msg.str());
  }

  const std::size_t n_beats = series.size();
  out.samples.reserve(static_cast<std::size_t>(series.total_duration() * fs) + n_beats);
  out.events.reserve(n_beats);
  out.beat_boundaries.reserve(n_beats + 1);

  double carry = 0.0;
  double prev_g = 0.0;
  bool have_prev = false;
  double acc = 0.0;

  for (std::size_t k = 0; k < n_beats; ++k) {
    const double theta = series.intervals[k];
    const double beat_start_t = series.cumulative_times[k];

    const double exact = theta * fs + carry;
    long long nk = std::llround(exact);
    if (nk < 1) nk = 1;
    carry = exact - static_cast<double>(nk);

    out.beat_boundaries.push_back(out.samples.size());
    out.beat_start_times.push_back(beat_start_t);

    for (long long j = 0; j < nk; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(nk);
      const double phi = phase_angle(x);
      double g = 0.0;
      for (const auto& wv : params.waves) g += wave_derivative_circular(phi, wv.params);
      if (have_prev) acc += (prev_g + g) / (2.0 * fs);
      out.samples.push_back(acc);
      prev_g = g;
      have_prev = true;
    }

    BeatEvents ev;
    ev.waves.reserve(params.waves.size());
    for (const auto& wv : params.waves) {
      const WaveParams& p = wv.params;
      const double x_peak = (1.0 + p.d) / 2.0;
      // label window: +/- 3 standard deviations per side, the trailing side
      // compressed by the asymmetry
      const double x_lo = std::max(0.0, x_peak - 3.0 * p.w / kTwoPi);
      const double x_hi = std::min(1.0, x_peak + 3.0 * p.w / (std::sqrt(p.m) * kTwoPi));
      WaveEvent e;
      e.peak_time = beat_start_t + x_peak * theta;
      e.window_start = beat_start_t + x_lo * theta;
      e.window_end = beat_start_t + x_hi * theta;
      ev.waves.push_back(e);
    }
    out.events.push_back(std::move(ev));
  }
  out.beat_boundaries.push_back(out.samples.size());

  if (options.detrend && out.samples.size() > 1) {
    // least-squares line through the full signal
    const std::size_t n = out.samples.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = static_cast<double>(i);
      sx += xi;
      sy += out.samples[i];
      sxx += xi * xi;
      sxy += xi * out.samples[i];
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    const double slope = denom != 0.0 ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      out.samples[i] -= intercept + slope * static_cast<double>(i);
  }

  return out;
}

double gradient_check(const WaveParameterSet& params, std::span<const double> phi_grid,
                      double step) {
  params.validate();
  for (const auto& wv : params.waves)
    if (wv.params.m != 1.0)
      throw std::invalid_argument("gradient_check: requires m == 1 for every wave");
  if (phi_grid.empty()) throw std::invalid_argument("gradient_check: empty grid");
  if (!(step > 0.0)) throw std::invalid_argument("gradient_check: step must be > 0");

  double scale = 0.0;
  std::vector<double> g_vals(phi_grid.size());
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    double g = 0.0;
    for (const auto& wv : params.waves) g += wave_derivative_circular(phi_grid[i], wv.params);
    g_vals[i] = g;
    scale = std::max(scale, std::abs(g));
  }
  if (scale == 0.0) scale = 1.0;

  double max_err = 0.0;
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    const double x = (phi_grid[i] + kPi) / kTwoPi;
    double f_plus = 0.0, f_minus = 0.0;
    for (const auto& wv : params.waves) {
      f_plus += wave_value_circular(phase_angle(x + step), wv.params);
      f_minus += wave_value_circular(phase_angle(x - step), wv.params);
    }
    const double fd = (f_plus - f_minus) / (2.0 * step);
    max_err = std::max(max_err, std::abs(g_vals[i] - fd) / scale);
  }
  return max_err;
}

}  // namespace biosynth
