#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ofdr {

/// Thin FFTW3 wrapper with a mutex-guarded plan cache. Plans use
/// FFTW_ESTIMATE so the algorithm choice (and thus the bit pattern of the
/// output) is reproducible run to run; execution on caller buffers is
/// thread-safe.
namespace fft {

/// Real-to-complex transform; returns n/2+1 bins (unnormalized).
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// In-place complex transform (unnormalized; inverse is not scaled by 1/n).
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

/// Circular convolution of equal-length complex sequences via FFT.
std::vector<std::complex<double>> circular_convolve(
    std::span<const std::complex<double>> a,
    std::span<const std::complex<double>> b);

}  // namespace fft
}  // namespace ofdr
