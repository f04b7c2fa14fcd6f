#pragma once

#include <span>
#include <vector>

#include "ofdr/engine.hpp"
#include "ofdr/types.hpp"

namespace ofdr {

/// Windowed range compression: window, DFT, keep the positive-frequency
/// half. Bin b maps to z = b * c / (2 n dF_eff); the normalization makes a
/// unit-amplitude on-bin tone compress to |bin| = 1.
ComplexTrace to_complex_trace(const BeatRecord& beat, Window window,
                              double fiber_index_n);

/// Plain per-bin aggregation of the scatterer field (no window, no
/// synthesis chain). Bins are exactly independent circular-Gaussian
/// samples; used for Monte Carlo fading statistics and field invariants.
std::vector<std::complex<double>> binned_field(const MultiCoreFiber& fiber, int core,
                                               double bin_spacing_m);

enum class AverageMode { intensity, amplitude };

/// Per-bin arithmetic mean of |C|^2 across cores (or of |C| with
/// AverageMode::amplitude, squared back to an intensity scale).
std::vector<double> intensity_average(std::span<const ComplexTrace> traces,
                                      AverageMode mode = AverageMode::intensity);

/// Amplitude-weighted vector-sum differential phase over a gauge:
/// V(z) = sum_cores C_i(z+g) conj(C_i(z)), dphi = arg V in (-pi, pi].
/// Each core contributes a vector of magnitude |C_i(z+g)||C_i(z)|, so faded
/// bins carry negligible weight.
DifferentialPhaseTrace rvs_differential_phase(std::span<const ComplexTrace> traces,
                                              int gauge_bins);

/// Rotated variant: each core's gauge vector is first rotated by the
/// conjugate phase of the same vector in a reference sweep, aligning the
/// cores' arbitrary speckle phases so the amplitude-weighted sum is
/// coherent. dphi then measures the common phase change since the
/// reference, which is the quantity slow-time demodulation consumes.
DifferentialPhaseTrace rvs_differential_phase(std::span<const ComplexTrace> traces,
                                              std::span<const ComplexTrace> reference,
                                              int gauge_bins);

/// Count of full-scale phase flips: adjacent-bin raw differences of the
/// wrapped series whose magnitude exceeds pi (the points where 1-D
/// unwrapping would insert a 2 pi correction).
std::size_t count_phase_jumps(std::span<const double> dphi);
std::size_t count_phase_jumps(const DifferentialPhaseTrace& trace);

/// Standard 1-D unwrapping: successive differences mapped into (-pi, pi]
/// and cumulatively summed; the first element is preserved.
std::vector<double> unwrap_slow_time(std::span<const double> phases);

}  // namespace ofdr
