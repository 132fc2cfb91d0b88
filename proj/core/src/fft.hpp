#ifndef BIOSYNTH_SRC_FFT_HPP
#define BIOSYNTH_SRC_FFT_HPP

#include <complex>
#include <span>
#include <vector>

namespace biosynth::detail {

/// Normalized inverse DFT (includes the 1/n factor).
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> spectrum);

/// Forward real-to-complex DFT; returns bins 0..n/2.
std::vector<std::complex<double>> rfft(std::span<const double> x);

}  // namespace biosynth::detail

#endif
