#include "biosynth/beat_intervals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "biosynth/errors.hpp"
#include "biosynth/rng.hpp"

namespace biosynth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kParetoMinimum = 6.0;

// Plausibility bounds for externally supplied intervals (seconds).
constexpr double kLoadMin = 0.2;
constexpr double kLoadMax = 3.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void GammaParams::validate() const {
  if (!(a > 1.0)) throw std::invalid_argument("gamma: shape a must be > 1");
  if (b < 0.0) throw std::invalid_argument("gamma: feedback b must be >= 0");
  if (sigma < 0.0) throw std::invalid_argument("gamma: sigma must be >= 0");
  if (scale <= 0.0) throw std::invalid_argument("gamma: scale must be > 0");
}

void StepChangeSpec::validate() const {
  if (!(mu_prime > 0.0)) throw std::invalid_argument("step change: mu_prime must be > 0");
  if (l < 0.0 || l > 1.0) throw std::invalid_argument("step change: l must be in [0, 1]");
  if (!(tau_input > 0.0)) throw std::invalid_argument("step change: tau_input must be > 0");
}

void BeatModel::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("beat model: mu must be > 0");
  if (beta < 0.0) throw std::invalid_argument("beat model: beta must be >= 0");
  if (beta >= mu) throw std::invalid_argument("beat model: beta must be < mu");
  if (breathing_hz < 0.0) throw std::invalid_argument("beat model: breathing_hz must be >= 0");
  if (gamma) gamma->validate();
}

BeatIntervalSeries BeatIntervalSeries::from_intervals(std::vector<double> intervals) {
  BeatIntervalSeries s;
  s.intervals = std::move(intervals);
  s.cumulative_times.resize(s.intervals.size() + 1);
  s.cumulative_times[0] = 0.0;
  for (std::size_t i = 0; i < s.intervals.size(); ++i)
    s.cumulative_times[i + 1] = s.cumulative_times[i] + s.intervals[i];
  // snap each interval to the representable difference of its cumulative
  // times so the diff invariant holds bit-exactly
  for (std::size_t i = 0; i < s.intervals.size(); ++i)
    s.intervals[i] = s.cumulative_times[i + 1] - s.cumulative_times[i];
  s.validate();
  return s;
}

void BeatIntervalSeries::validate() const {
  if (intervals.empty()) throw std::invalid_argument("interval series is empty");
  if (cumulative_times.size() != intervals.size() + 1 || cumulative_times.front() != 0.0)
    throw std::invalid_argument("interval series: inconsistent cumulative times");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!(intervals[i] > 0.0)) throw std::invalid_argument("interval series: nonpositive interval");
    if (!(cumulative_times[i + 1] > cumulative_times[i]))
      throw std::invalid_argument("interval series: times not strictly increasing");
  }
}

double effective_tau(double tau_input) {
  // Five beats centered on the transition carry 99.5% of the change at
  // tau_input = 1: 2*S(2.5/tau_eff) - 1 = 0.995 gives tau_eff = 2.5/ln(399).
  return tau_input * 2.5 / std::log(399.0);
}

GenerationSpan GenerationSpan::beats(std::size_t n) {
  GenerationSpan s;
  s.beat_count = n;
  return s;
}

GenerationSpan GenerationSpan::duration(double seconds) {
  GenerationSpan s;
  s.seconds = seconds;
  return s;
}

std::vector<double> generate_gamma(std::size_t n, const GammaParams& params, std::uint64_t seed,
                                   std::vector<double>* y_out) {
  if (n == 0) throw std::invalid_argument("generate_gamma: n must be >= 1");
  params.validate();

  Rng rng(seed);
  std::vector<double> y(n + 1, 0.0);       // 1-based
  std::vector<double> prefix(n + 1, 0.0);  // prefix sums of y^2
  std::vector<double> expire(n + 2, 0.0);  // y mass leaving the active sum at index i
  std::vector<double> gamma(n);

  double active = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double k_real = std::floor(rng.pareto(kParetoMinimum, params.a));
    const double x = rng.normal(0.0, params.sigma);

    // sum of y_m^2 over the previous k beats (m in [i-k, i-1]); terms before
    // the series start contribute zero
    const std::size_t lo =
        k_real >= static_cast<double>(i) ? 1 : i - static_cast<std::size_t>(k_real);
    const double ssq = prefix[i - 1] - prefix[lo - 1];
    const double yi = x * std::sqrt(1.0 + params.b / k_real * ssq);

    y[i] = yi;
    prefix[i] = prefix[i - 1] + yi * yi;

    // y_i stays in the moving sum for k_i beats
    active += yi;
    if (k_real < static_cast<double>(n + 1 - i)) expire[i + static_cast<std::size_t>(k_real)] += yi;

    gamma[i - 1] = params.scale * active;
    active -= expire[i + 1];
  }
  if (y_out) y_out->assign(y.begin() + 1, y.end());
  return gamma;
}

namespace {

BeatIntervalSeries generate_core(const BeatModel& model, const GenerationSpan& span,
                                 const StepChangeSpec* step, double total_duration,
                                 std::uint64_t seed) {
  model.validate();
  if (span.beat_count == 0 && !(span.seconds > 0.0))
    throw std::invalid_argument("generate_intervals: need a beat count or a positive duration");

  // Upper bound on the number of beats we may need; duration-driven
  // generation stops as soon as the cumulative time passes the target.
  const double max_mu = step ? std::max(model.mu, step->mu_prime) : model.mu;
  (void)max_mu;
  std::size_t n_hint = span.beat_count;
  if (n_hint == 0) {
    const double min_mean = step ? std::min(model.mu, step->mu_prime) : model.mu;
    n_hint = static_cast<std::size_t>(std::ceil(span.seconds / std::max(kIntervalFloor, min_mean - model.beta))) + 2;
  }

  std::vector<double> gam;
  if (model.gamma) gam = generate_gamma(n_hint, *model.gamma, splitmix64(seed + 1));

  const double d = step ? step->l * total_duration / model.mu : 0.0;
  const double tau = step ? effective_tau(step->tau_input) : 1.0;
  const double delta = step ? step->mu_prime - model.mu : 0.0;

  BeatIntervalSeries series;
  series.intervals.reserve(n_hint);
  series.cumulative_times.reserve(n_hint + 1);
  series.cumulative_times.push_back(0.0);

  double t = 0.0;
  for (std::size_t i = 1;; ++i) {
    if (span.beat_count != 0 && i > span.beat_count) break;
    if (span.beat_count == 0 && t >= span.seconds) break;

    if (i > gam.size() && model.gamma) {
      // duration-driven generation ran past the hint; extend the gamma
      // stream deterministically by regenerating a longer one
      gam = generate_gamma(gam.size() * 2, *model.gamma, splitmix64(seed + 1));
    }

    double theta = model.mu + model.beta * std::sin(2.0 * kPi * model.breathing_hz * t);
    if (model.gamma) theta += gam[i - 1];
    if (step) theta += delta * sigmoid((static_cast<double>(i) - d) / tau);
    if (theta < kIntervalFloor) {
      theta = kIntervalFloor;
      ++series.clamp_count;
    }
    series.intervals.push_back(theta);
    t += theta;
    series.cumulative_times.push_back(t);
  }
  for (std::size_t i = 0; i < series.intervals.size(); ++i)
    series.intervals[i] = series.cumulative_times[i + 1] - series.cumulative_times[i];
  series.validate();
  return series;
}

}  // namespace

BeatIntervalSeries generate_intervals(const BeatModel& model, const GenerationSpan& span,
                                      std::uint64_t seed) {
  return generate_core(model, span, nullptr, 0.0, seed);
}

BeatIntervalSeries apply_step_change(const BeatModel& model, const StepChangeSpec& spec,
                                     double total_duration, std::uint64_t seed) {
  spec.validate();
  if (!(total_duration > 0.0))
    throw std::invalid_argument("apply_step_change: total_duration must be > 0");
  return generate_core(model, GenerationSpan::duration(total_duration), &spec, total_duration,
                       seed);
}

BeatIntervalSeries load_intervals(const std::filesystem::path& path, IntervalFileKind kind,
                                  bool strict, IntervalLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open interval file: " + path.string());

  IntervalLoadReport local;
  IntervalLoadReport& rep = report ? *report : local;

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    // tolerate CSV rows; the value is the first field
    if (auto comma = line.find(','); comma != std::string::npos) line = line.substr(0, comma);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line.empty() || line[0] == '#') continue;

    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || (end && *end != '\0')) {
      if (first_content_line) {  // header row
        first_content_line = false;
        continue;
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed value '" + line + "'");
    }
    first_content_line = false;
    values.push_back(v);
  }

  std::vector<double> intervals;
  if (kind == IntervalFileKind::annotation_times) {
    if (values.size() < 2) throw GenerationError("annotation-time file needs at least two events");
    intervals.reserve(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) intervals.push_back(values[i] - values[i - 1]);
  } else {
    intervals = std::move(values);
  }

  std::vector<double> kept;
  kept.reserve(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const double v = intervals[i];
    if (v < kLoadMin || v > kLoadMax) {
      std::ostringstream msg;
      msg << "interval " << i << " = " << v << " s outside [" << kLoadMin << ", " << kLoadMax << "]";
      if (strict) throw GenerationError(path.string() + ": " + msg.str());
      rep.warnings.push_back(msg.str());
      ++rep.dropped;
      continue;
    }
    kept.push_back(v);
  }
  if (kept.empty()) throw GenerationError(path.string() + ": no usable intervals");
  return BeatIntervalSeries::from_intervals(std::move(kept));
}

}  // namespace biosynth
