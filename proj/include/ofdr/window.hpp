#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ofdr/common.hpp"

namespace ofdr {

enum class Window { rectangular, hanning };

Window window_from_string(const std::string& s);
std::string to_string(Window w);

/// Periodic window samples w[t], t = 0..n-1 (DFT-consistent Hann).
std::vector<double> window_samples(Window w, std::size_t n);

/// Sum of window samples.
double window_sum(Window w, std::size_t n);

/// Noise-equivalent bandwidth in bins: n * sum(w^2) / sum(w)^2.
double window_enbw(Window w);

/// Dirichlet kernel D(x) = sum_{t=0}^{n-1} exp(-2i pi x t / n), the DFT of
/// an all-ones window at fractional bin offset x.
std::complex<double> dirichlet_kernel(double x, std::size_t n);

/// DFT of the periodic window at fractional bin offset x.
/// hanning: 0.5 D(x) - 0.25 D(x-1) - 0.25 D(x+1).
std::complex<double> window_kernel(Window w, double x, std::size_t n);

/// Continuous (large-n) amplitude response normalized to 1 at x = 0;
/// used for spectral-peak scalloping correction.
double window_amplitude_response(Window w, double x);

}  // namespace ofdr
