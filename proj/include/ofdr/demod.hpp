#pragma once

#include <span>
#include <vector>

#include "ofdr/fiber.hpp"
#include "ofdr/types.hpp"

namespace ofdr {

/// Waterfall of differential phase: one row per sweep.
struct TimeDistanceMap {
    std::size_t n_sweeps = 0;
    std::size_t n_bins = 0;
    std::vector<double> values;  // row-major [sweep][bin]
    std::vector<double> t_slow_s;
    double bin_spacing_m = 0.0;
    int gauge_bins = 0;

    std::span<const double> row(std::size_t s) const {
        return {values.data() + s * n_bins, n_bins};
    }
    double distance_at(std::size_t bin) const {
        return (static_cast<double>(bin) + 0.5 * gauge_bins) * bin_spacing_m;
    }
};

TimeDistanceMap time_distance_map(std::span<const DifferentialPhaseTrace> per_sweep);

struct EventDetection {
    double location_m = 0.0;
    double strength_sigma = 0.0;  // peak column std over the noise scale
    std::size_t first_bin = 0;
    std::size_t last_bin = 0;
};

/// Flags distance bins whose slow-time standard deviation exceeds
/// threshold_sigma times the median column noise; contiguous runs of at
/// least min_cluster_bins form one detection (events closer than a gauge
/// merge). Returns an empty list when nothing is detected.
std::vector<EventDetection> locate_events(const TimeDistanceMap& map,
                                          double threshold_sigma,
                                          int min_cluster_bins = 2);

struct DemodulationResult {
    double location_m = 0.0;
    std::vector<double> time_s;
    std::vector<double> waveform_rad;   // unwrapped slow-time phase
    std::vector<double> frequency_hz;
    std::vector<double> power;          // one-sided amplitude^2 spectrum
    double peak_frequency_hz = 0.0;
    double amplitude_rad = 0.0;
    double snr_db = 0.0;
    double sensitivity_m = 0.0;         // dL floor from the off-peak phase floor
};

/// Slow-time demodulation at the gauge interval nearest location_m.
/// per_sweep_traces holds the per-core complex traces of every sweep; the
/// first sweep serves as the rotation reference. The spectrum uses a
/// Hanning slow-time window with parabolic peak interpolation and
/// scalloping correction; snr is peak power over the median off-peak power
/// (excluding +/-2 bins around the peak); the sensitivity converts the
/// median off-peak amplitude through dL = lambda dphi / (4 pi (n + Ce)).
DemodulationResult demodulate(
    std::span<const std::vector<ComplexTrace>> per_sweep_traces, double location_m,
    int gauge_bins, const FiberParams& params);

}  // namespace ofdr
