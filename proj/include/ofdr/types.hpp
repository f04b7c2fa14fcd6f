#pragma once

#include <complex>
#include <vector>

#include "ofdr/window.hpp"

namespace ofdr {

/// Complex RBS amplitude vs. distance bin after windowed range compression.
/// Bin b maps to distance z = b * bin_spacing_m.
struct ComplexTrace {
    int core = 0;
    int sweep_index = 0;
    std::vector<std::complex<double>> bins;
    double bin_spacing_m = 0.0;
    Window window = Window::hanning;
    double t_slow_s = 0.0;
};

/// Wrapped differential phase over a gauge of `gauge_bins` bins.
/// Sample i is the phase of the gauge interval [i, i + gauge_bins]; its
/// physical location is the interval center (i + gauge_bins/2) * spacing.
struct DifferentialPhaseTrace {
    std::vector<double> dphi;  // values in (-pi, pi]
    int gauge_bins = 0;
    double bin_spacing_m = 0.0;
    std::vector<int> source_cores;
    int sweep_index = 0;
    double t_slow_s = 0.0;

    double distance_at(std::size_t i) const {
        return (static_cast<double>(i) + 0.5 * gauge_bins) * bin_spacing_m;
    }
};

}  // namespace ofdr
