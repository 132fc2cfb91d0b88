#include "biosynth/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "biosynth/errors.hpp"
#include "biosynth/rng.hpp"
#include "fft.hpp"

namespace biosynth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double interp_psd(const PsdSpec& psd, double f, bool log_domain) {
  const auto& fr = psd.freqs;
  const auto& pw = psd.powers;
  if (f <= fr.front()) return pw.front();
  if (f >= fr.back()) return pw.back();
  const auto it = std::lower_bound(fr.begin(), fr.end(), f);
  const std::size_t hi = static_cast<std::size_t>(it - fr.begin());
  const std::size_t lo = hi - 1;
  const double t = (f - fr[lo]) / (fr[hi] - fr[lo]);
  if (log_domain && pw[lo] > 0.0 && pw[hi] > 0.0)
    return std::exp(std::log(pw[lo]) + t * (std::log(pw[hi]) - std::log(pw[lo])));
  return pw[lo] + t * (pw[hi] - pw[lo]);
}

}  // namespace

void PsdSpec::validate() const {
  if (freqs.empty() || freqs.size() != powers.size())
    throw std::invalid_argument("psd: frequency and power grids must be non-empty and equal length");
  if (!(fs > 0.0)) throw std::invalid_argument("psd: fs must be > 0");
  const double nyquist_tol = fs / 2.0 * (1.0 + 1e-9);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0.0)) throw std::invalid_argument("psd: frequencies must be > 0");
    if (freqs[i] > nyquist_tol) throw std::invalid_argument("psd: frequency above Nyquist");
    if (i > 0 && !(freqs[i] > freqs[i - 1]))
      throw std::invalid_argument("psd: frequencies must be strictly increasing");
    if (powers[i] < 0.0) throw std::invalid_argument("psd: powers must be >= 0");
  }
}

void NoiseModelParams::validate() const {
  if (alpha < 0.0 || alpha > 5.0) throw std::invalid_argument("noise model: alpha must be in [0, 5]");
  if (c < 0.0 || c > 2.0) throw std::invalid_argument("noise model: c must be in [0, 2]");
  if (sigma2 < 0.0 || sigma2 > 2.0)
    throw std::invalid_argument("noise model: sigma2 must be in [0, 2]");
}

PsdSpec model_psd(const std::vector<double>& freqs, const NoiseModelParams& params, double fs) {
  params.validate();
  if (freqs.empty()) throw std::invalid_argument("model_psd: empty frequency grid");
  for (double f : freqs)
    if (!(f > 0.0)) throw std::invalid_argument("model_psd: grid must not contain f <= 0");

  std::vector<double> inv(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) inv[i] = std::pow(freqs[i], -params.alpha);
  const double pbar = std::accumulate(inv.begin(), inv.end(), 0.0) / static_cast<double>(inv.size());

  PsdSpec psd;
  psd.freqs = freqs;
  psd.powers.resize(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i)
    psd.powers[i] = params.c * inv[i] / pbar + params.sigma2;
  psd.fs = fs;
  psd.provenance = PsdProvenance::model;
  psd.validate();
  return psd;
}

PsdSpec welch_psd(std::span<const double> signal, double fs, const WelchOptions& options) {
  const std::size_t nseg = options.segment_length;
  if (nseg < 8 || nseg % 2 != 0)
    throw std::invalid_argument("welch: segment_length must be even and >= 8");
  if (options.overlap_fraction < 0.0 || options.overlap_fraction >= 1.0)
    throw std::invalid_argument("welch: overlap_fraction must be in [0, 1)");
  if (signal.size() < 2 * nseg)
    throw std::invalid_argument("welch: signal shorter than two segments");
  if (!(fs > 0.0)) throw std::invalid_argument("welch: fs must be > 0");

  // periodic Hann window
  std::vector<double> window(nseg);
  double wsq = 0.0;
  for (std::size_t i = 0; i < nseg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(nseg));
    wsq += window[i] * window[i];
  }
  const double scale = 1.0 / (fs * wsq);  // density scaling

  std::size_t step = static_cast<std::size_t>(
      std::llround(static_cast<double>(nseg) * (1.0 - options.overlap_fraction)));
  if (step == 0) step = 1;

  const std::size_t nbins = nseg / 2 + 1;
  std::vector<double> acc(nbins, 0.0);
  std::vector<double> seg(nseg);
  std::size_t count = 0;
  for (std::size_t start = 0; start + nseg <= signal.size(); start += step) {
    double mean = 0.0;
    for (std::size_t i = 0; i < nseg; ++i) mean += signal[start + i];
    mean /= static_cast<double>(nseg);
    for (std::size_t i = 0; i < nseg; ++i) seg[i] = (signal[start + i] - mean) * window[i];
    const auto spec = detail::rfft(seg);
    for (std::size_t k = 0; k < nbins; ++k) {
      double p = std::norm(spec[k]) * scale;
      if (k != 0 && k != nseg / 2) p *= 2.0;  // one-sided
      acc[k] += p;
    }
    ++count;
  }

  PsdSpec psd;
  psd.fs = fs;
  psd.provenance = PsdProvenance::estimated;
  psd.freqs.reserve(nbins - 1);
  psd.powers.reserve(nbins - 1);
  for (std::size_t k = 1; k < nbins; ++k) {  // DC dropped
    psd.freqs.push_back(static_cast<double>(k) * fs / static_cast<double>(nseg));
    psd.powers.push_back(acc[k] / static_cast<double>(count));
  }
  psd.validate();
  return psd;
}

PsdSpec add_point_frequency(PsdSpec psd, double f0, double power) {
  psd.validate();
  if (!(f0 > 0.0) || !(f0 < psd.fs / 2.0))
    throw std::invalid_argument("add_point_frequency: f0 must be in (0, fs/2)");
  if (power < 0.0) throw std::invalid_argument("add_point_frequency: power must be >= 0");
  std::size_t best = 0;
  double best_dist = std::abs(psd.freqs[0] - f0);
  for (std::size_t i = 1; i < psd.freqs.size(); ++i) {
    const double dist = std::abs(psd.freqs[i] - f0);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  psd.powers[best] += power;
  return psd;
}

std::vector<std::complex<double>> build_noise_spectrum(const PsdSpec& psd, std::size_t n_samples,
                                                       std::uint64_t seed,
                                                       const NoiseSynthOptions& options) {
  psd.validate();
  if (n_samples < 2) throw std::invalid_argument("synthesize_noise: n_samples must be >= 2");

  const std::size_t n = n_samples;
  const double df = psd.fs / static_cast<double>(n);

  // exact-grid check: PSD bins laid out on this FFT grid need no resampling
  bool exact_grid = psd.freqs.size() == n / 2;
  if (exact_grid) {
    for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
      if (std::abs(psd.freqs[k] - static_cast<double>(k + 1) * df) > 1e-9 * psd.fs) {
        exact_grid = false;
        break;
      }
    }
  }
  if (!exact_grid && options.strict_grid)
    throw GenerationError("synthesize_noise: PSD grid does not match the FFT bin grid");

  auto power_at = [&](double f) {
    return exact_grid ? 0.0 : interp_psd(psd, f, options.log_interpolation);
  };

  Rng rng(seed);
  std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
  // amplitude scale: E|bin|^2 = n^2 * df * PSD / 2 per side, so the variance
  // of the normalized IFFT integrates the one-sided PSD
  const double amp = std::sqrt(psd.fs * static_cast<double>(n)) / 2.0;

  for (std::size_t k = 1; k <= (n - 1) / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    const double p = exact_grid ? psd.powers[k - 1] : power_at(f);
    const double a = rng.normal();
    const double b = rng.normal();
    const double mag = amp * std::sqrt(p);
    spectrum[k] = {mag * a, mag * b};
    spectrum[n - k] = std::conj(spectrum[k]);
  }
  if (n % 2 == 0) {
    // real Nyquist bin with its mirror power folded in
    const double f = psd.fs / 2.0;
    const double p = exact_grid ? psd.powers[n / 2 - 1] : power_at(f);
    spectrum[n / 2] = {amp * std::sqrt(2.0 * p) * rng.normal(), 0.0};
  }
  return spectrum;
}

std::vector<double> synthesize_noise(const PsdSpec& psd, std::size_t n_samples,
                                     std::uint64_t seed, const NoiseSynthOptions& options) {
  const auto spectrum = build_noise_spectrum(psd, n_samples, seed, options);
  const auto series = detail::ifft(spectrum);

  double max_real = 0.0, max_imag = 0.0;
  for (const auto& v : series) {
    max_real = std::max(max_real, std::abs(v.real()));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  if (max_imag > 1e-9 * std::max(max_real, 1e-300))
    throw GenerationError("synthesize_noise: residual imaginary part too large");

  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = series[i].real();
  return out;
}

std::vector<double> scale_noise(std::span<const double> noise, double amplitude) {
  if (noise.empty()) throw std::invalid_argument("scale_noise: empty input");
  double mean = 0.0;
  for (double v : noise) mean += v;
  mean /= static_cast<double>(noise.size());
  double var = 0.0;
  for (double v : noise) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noise.size());
  const double sd = std::sqrt(var);
  if (sd == 0.0) throw std::invalid_argument("scale_noise: zero-variance input");

  std::vector<double> out(noise.size());
  const double k = amplitude / sd;
  for (std::size_t i = 0; i < noise.size(); ++i) out[i] = noise[i] * k;
  return out;
}

ArtifactSpan add_artifact(std::vector<double>& signal01, const ArtifactSource& source, double fs,
                          std::uint64_t seed, const ArtifactOptions& options) {
  if (signal01.empty()) throw std::invalid_argument("add_artifact: empty signal");
  if (source.samples.empty()) throw std::invalid_argument("add_artifact: empty artifact source");
  if (!(fs > 0.0)) throw std::invalid_argument("add_artifact: fs must be > 0");

  Rng rng(seed);
  const double length_s = rng.uniform(options.min_length_s, options.max_length_s);
  std::size_t length = static_cast<std::size_t>(std::llround(length_s * fs));
  if (length < 1) length = 1;
  if (length > source.samples.size()) {
    std::ostringstream msg;
    msg << "add_artifact: source '" << source.name << "' (" << source.samples.size()
        << " samples) shorter than requested segment (" << length << ")";
    throw GenerationError(msg.str());
  }
  if (length > signal01.size()) length = signal01.size();

  const std::size_t src_start = rng.index(source.samples.size() - length + 1);
  double strength = rng.uniform(options.min_strength, options.max_strength);
  if (options.forced_strength) strength = *options.forced_strength;
  const std::size_t pos = rng.index(signal01.size() - length + 1);

  double mn = source.samples[src_start], mx = mn;
  for (std::size_t i = 0; i < length; ++i) {
    mn = std::min(mn, source.samples[src_start + i]);
    mx = std::max(mx, source.samples[src_start + i]);
  }
  const double span = mx - mn;
  for (std::size_t i = 0; i < length; ++i) {
    const double norm = span > 0.0 ? (source.samples[src_start + i] - mn) / span : 0.0;
    signal01[pos + i] += strength * norm;
  }

  ArtifactSpan out;
  out.start = pos;
  out.end = pos + length;
  out.strength = strength;
  out.source = source.name;
  return out;
}

}  // namespace biosynth
