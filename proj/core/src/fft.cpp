#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace biosynth::detail {

namespace {

// The FFTW planner is not thread-safe; plans are cached per size and
// executed concurrently through the execute_dft interface.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_c2c_backward(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> tmp_in(n), tmp_out(n);
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(tmp_in.data()),
      reinterpret_cast<fftw_complex*>(tmp_out.data()), FFTW_BACKWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw: plan creation failed");
  cache.emplace(n, plan);
  return plan;
}

fftw_plan cached_r2c(std::size_t n) {
  static std::map<std::size_t, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> tmp_in(n);
  std::vector<std::complex<double>> tmp_out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), tmp_in.data(),
                                        reinterpret_cast<fftw_complex*>(tmp_out.data()),
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw: plan creation failed");
  cache.emplace(n, plan);
  return plan;
}

}  // namespace

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> spectrum) {
  const std::size_t n = spectrum.size();
  if (n == 0) throw std::invalid_argument("ifft: empty spectrum");
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  std::vector<std::complex<double>> out(n);
  fftw_plan plan = cached_c2c_backward(n);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv_n;
  return out;
}

std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("rfft: empty input");
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = cached_r2c(n);
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace biosynth::detail
