#include "biosynth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "biosynth/errors.hpp"

namespace biosynth {

namespace {

// Least-squares polynomial fit over a window with a shared, precomputed
// normal matrix (the time grid is the same for every window of a scale).
struct WindowDetrender {
  std::size_t scale = 0;
  int order = 0;
  std::vector<double> t;       // centered time grid
  std::vector<double> inv;     // inverse normal matrix, (order+1)^2
  std::vector<double> powers;  // t^j per sample, (order+1) x scale

  WindowDetrender(std::size_t s, int ord) : scale(s), order(ord) {
    const int m = order + 1;
    t.resize(scale);
    for (std::size_t i = 0; i < scale; ++i)
      t[i] = static_cast<double>(i) - static_cast<double>(scale - 1) / 2.0;

    powers.resize(static_cast<std::size_t>(m) * scale);
    for (std::size_t i = 0; i < scale; ++i) {
      double p = 1.0;
      for (int j = 0; j < m; ++j) {
        powers[static_cast<std::size_t>(j) * scale + i] = p;
        p *= t[i];
      }
    }

    // normal matrix N_jk = sum_i t^(j+k), inverted by Gauss-Jordan
    std::vector<double> nmat(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (std::size_t i = 0; i < scale; ++i)
          nmat[static_cast<std::size_t>(j) * m + k] +=
              powers[static_cast<std::size_t>(j) * scale + i] *
              powers[static_cast<std::size_t>(k) * scale + i];

    inv.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < m; ++j) inv[static_cast<std::size_t>(j) * m + j] = 1.0;
    for (int col = 0; col < m; ++col) {
      int pivot = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(nmat[static_cast<std::size_t>(r) * m + col]) >
            std::abs(nmat[static_cast<std::size_t>(pivot) * m + col]))
          pivot = r;
      if (nmat[static_cast<std::size_t>(pivot) * m + col] == 0.0)
        throw GenerationError("dfa: singular detrending system");
      for (int c = 0; c < m; ++c) {
        std::swap(nmat[static_cast<std::size_t>(col) * m + c], nmat[static_cast<std::size_t>(pivot) * m + c]);
        std::swap(inv[static_cast<std::size_t>(col) * m + c], inv[static_cast<std::size_t>(pivot) * m + c]);
      }
      const double d = nmat[static_cast<std::size_t>(col) * m + col];
      for (int c = 0; c < m; ++c) {
        nmat[static_cast<std::size_t>(col) * m + c] /= d;
        inv[static_cast<std::size_t>(col) * m + c] /= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = nmat[static_cast<std::size_t>(r) * m + col];
        if (f == 0.0) continue;
        for (int c = 0; c < m; ++c) {
          nmat[static_cast<std::size_t>(r) * m + c] -= f * nmat[static_cast<std::size_t>(col) * m + c];
          inv[static_cast<std::size_t>(r) * m + c] -= f * inv[static_cast<std::size_t>(col) * m + c];
        }
      }
    }
  }

  /// Mean squared residual of the window after polynomial removal.
  double residual_ms(const double* y) const {
    const int m = order + 1;
    double rhs[4] = {0, 0, 0, 0};
    for (int j = 0; j < m; ++j) {
      const double* pj = &powers[static_cast<std::size_t>(j) * scale];
      double s = 0.0;
      for (std::size_t i = 0; i < scale; ++i) s += pj[i] * y[i];
      rhs[j] = s;
    }
    double coef[4] = {0, 0, 0, 0};
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) coef[j] += inv[static_cast<std::size_t>(j) * m + k] * rhs[k];

    double ssq = 0.0;
    for (std::size_t i = 0; i < scale; ++i) {
      double fit = 0.0;
      for (int j = 0; j < m; ++j) fit += coef[j] * powers[static_cast<std::size_t>(j) * scale + i];
      const double r = y[i] - fit;
      ssq += r * r;
    }
    return ssq / static_cast<double>(scale);
  }
};

}  // namespace

DfaResult dfa(std::span<const double> series, const DfaOptions& options) {
  const std::size_t n = series.size();
  if (options.detrend_order < 0 || options.detrend_order > 3)
    throw std::invalid_argument("dfa: detrend_order must be in [0, 3]");

  std::vector<std::size_t> scales = options.scales;
  if (scales.empty()) {
    if (n < 16) throw std::invalid_argument("dfa: series too short");
    const double lo = std::log(4.0);
    const double hi = std::log(static_cast<double>(n) / 4.0);
    for (std::size_t i = 0; i < options.n_scales; ++i) {
      const double f = options.n_scales == 1 ? 0.0
                                             : static_cast<double>(i) / static_cast<double>(options.n_scales - 1);
      scales.push_back(static_cast<std::size_t>(std::llround(std::exp(lo + f * (hi - lo)))));
    }
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  }
  for (std::size_t s : scales)
    if (s < 4) throw std::invalid_argument("dfa: scales must be >= 4");
  const std::size_t max_scale = *std::max_element(scales.begin(), scales.end());
  if (n < 4 * max_scale) throw std::invalid_argument("dfa: series shorter than 4 * max(scale)");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> profile(n);
  double acc = 0.0;
  bool constant = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (series[i] != series[0]) constant = false;
    acc += series[i] - mean;
    profile[i] = acc;
  }
  if (constant) throw GenerationError("dfa: degenerate constant series");

  DfaResult result;
  result.scales = scales;
  result.fluctuations.reserve(scales.size());

  for (std::size_t s : scales) {
    WindowDetrender det(s, options.detrend_order);
    const std::size_t n_windows = n / s;
    double total = 0.0;
    // forward and backward partitions use the full series
    for (std::size_t w = 0; w < n_windows; ++w) total += det.residual_ms(&profile[w * s]);
    const std::size_t tail_start = n - n_windows * s;
    for (std::size_t w = 0; w < n_windows; ++w)
      total += det.residual_ms(&profile[tail_start + w * s]);
    result.fluctuations.push_back(std::sqrt(total / static_cast<double>(2 * n_windows)));
  }

  // log-log slope over the fit range
  const double fit_lo = options.fit_range ? options.fit_range->first : static_cast<double>(scales.front());
  const double fit_hi = options.fit_range ? options.fit_range->second : static_cast<double>(scales.back());
  result.fit_range = {fit_lo, fit_hi};

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double sc = static_cast<double>(scales[i]);
    if (sc < fit_lo || sc > fit_hi) continue;
    if (!(result.fluctuations[i] > 0.0))
      throw GenerationError("dfa: zero fluctuation at scale " + std::to_string(scales[i]));
    const double lx = std::log(sc);
    const double ly = std::log(result.fluctuations[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("dfa: fewer than two scales in the fit range");
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  result.alpha = (static_cast<double>(count) * sxy - sx * sy) / denom;
  if (!std::isfinite(result.alpha)) throw GenerationError("dfa: non-finite exponent");
  return result;
}

RoundtripReport psd_roundtrip_report(const PsdSpec& psd, std::size_t n_samples,
                                     std::span<const std::uint64_t> seeds,
                                     const WelchOptions& welch) {
  psd.validate();
  if (seeds.size() < 3) throw std::invalid_argument("psd_roundtrip_report: need at least 3 seeds");

  std::vector<double> est;
  std::vector<double> est_freqs;
  for (std::uint64_t seed : seeds) {
    const auto noise = synthesize_noise(psd, n_samples, seed);
    const auto e = welch_psd(noise, psd.fs, welch);
    if (est.empty()) {
      est.assign(e.powers.begin(), e.powers.end());
      est_freqs = e.freqs;
    } else {
      for (std::size_t i = 0; i < est.size(); ++i) est[i] += e.powers[i];
    }
  }
  for (double& v : est) v /= static_cast<double>(seeds.size());

  // target binned integral-preservingly onto the welch grid
  const double dfw = est_freqs.size() > 1 ? est_freqs[1] - est_freqs[0] : psd.fs / 2.0;
  std::vector<double> target(est_freqs.size(), 0.0);
  for (std::size_t i = 0; i < est_freqs.size(); ++i) {
    const double lo = est_freqs[i] - dfw / 2.0;
    const double hi = est_freqs[i] + dfw / 2.0;
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
      if (psd.freqs[k] > lo && psd.freqs[k] <= hi) {
        sum += psd.powers[k];
        ++cnt;
      }
    }
    if (cnt > 0) {
      target[i] = sum / static_cast<double>(cnt);
    } else {
      // welch grid finer than the target grid: fall back to interpolation
      const auto it = std::lower_bound(psd.freqs.begin(), psd.freqs.end(), est_freqs[i]);
      if (it == psd.freqs.begin()) {
        target[i] = psd.powers.front();
      } else if (it == psd.freqs.end()) {
        target[i] = psd.powers.back();
      } else {
        const std::size_t hi_idx = static_cast<std::size_t>(it - psd.freqs.begin());
        const double t = (est_freqs[i] - psd.freqs[hi_idx - 1]) /
                         (psd.freqs[hi_idx] - psd.freqs[hi_idx - 1]);
        target[i] = psd.powers[hi_idx - 1] + t * (psd.powers[hi_idx] - psd.powers[hi_idx - 1]);
      }
    }
  }

  // target power below the welch resolution, excluded from the comparison
  double total_power = 0.0, unresolved = 0.0;
  const double resolve_floor = est_freqs.empty() ? 0.0 : est_freqs.front() - dfw / 2.0;
  for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
    total_power += psd.powers[k];
    if (psd.freqs[k] <= resolve_floor) unresolved += psd.powers[k];
  }

  RoundtripReport report;
  report.seeds_used = seeds.size();
  report.unresolved_low_freq_fraction = total_power > 0.0 ? unresolved / total_power : 0.0;

  const double nyq = psd.fs / 2.0;
  for (int b = 0; b < 4; ++b) {
    const double lo = nyq * static_cast<double>(b) / 4.0;
    const double hi = nyq * static_cast<double>(b + 1) / 4.0;
    double tsum = 0.0, esum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < est_freqs.size(); ++i) {
      if (est_freqs[i] > lo && est_freqs[i] <= hi) {
        tsum += target[i];
        esum += est[i];
        ++cnt;
      }
    }
    BandError band;
    band.f_lo = lo;
    band.f_hi = hi;
    if (cnt > 0) {
      band.target_mean = tsum / static_cast<double>(cnt);
      band.estimate_mean = esum / static_cast<double>(cnt);
    }
    if (band.target_mean == 0.0) {
      band.rel_error = band.estimate_mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      band.rel_error = (band.estimate_mean - band.target_mean) / band.target_mean;
    }
    report.bands.push_back(band);
    report.max_abs_rel_error = std::max(report.max_abs_rel_error, std::abs(band.rel_error));
  }
  return report;
}

}  // namespace biosynth
