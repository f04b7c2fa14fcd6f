#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ofdr/common.hpp"

namespace ofdr {

struct FiberParams {
    double length_m = 500.0;
    double scatterer_density_per_m = 2000.0;
    double group_index_n = 1.468;
    double strain_coeff_ce = 0.78;
    double wavelength_m = 1550e-9;

    void validate() const;
};

/// Localized axial vibration: a sinusoidal length change dL(t) applied at
/// position_m. The extent (piezo stack length) is far below one range bin,
/// so the event acts as a pure common phase step on everything beyond it.
struct VibrationEvent {
    double position_m = 0.0;
    double extent_m = 0.009;
    double amplitude_m = 0.0;   // peak dL
    double frequency_hz = 0.0;
    double phase_rad = 0.0;

    double displacement_at(double t_slow_s) const;
};

/// Per-core random scatterer realizations sharing one geometry.
/// Positions are a jittered regular grid (strictly increasing, mean spacing
/// 1/density); reflectivities are i.i.d. circular complex Gaussian with
/// E|r|^2 = 1, which makes bin-aggregated fields exactly complex Gaussian
/// and bin intensities exactly exponential.
struct MultiCoreFiber {
    FiberParams params;
    int n_cores = 0;
    std::vector<std::vector<double>> position_m;                  // [core][k]
    std::vector<std::vector<std::complex<double>>> reflectivity;  // [core][k]

    std::size_t scatterers_per_core() const {
        return position_m.empty() ? 0 : position_m.front().size();
    }
};

struct DelayEntry {
    double delay_s;          // round-trip group delay 2 n z / c
    double phase_offset_rad; // vibration-induced common phase
};

/// Range-bin spacing c / (2 n dF) for a sweep span dF.
inline double range_bin_spacing_m(double group_index_n, double sweep_range_hz) {
    return kSpeedOfLight / (2.0 * group_index_n * sweep_range_hz);
}

/// Minimum scatterer density keeping >= 10 scatterers per range bin.
inline double min_density_per_m(double bin_spacing_m) {
    return 10.0 / bin_spacing_m;
}

/// Generate per-core-independent scatterer realizations. Deterministic for
/// fixed (params, n_cores, seed); distinct cores use distinct substreams.
/// Density is checked against the bin spacing of the default 8 GHz sweep
/// unless a bin spacing is passed explicitly.
MultiCoreFiber generate_multicore_field(const FiberParams& params, int n_cores,
                                        std::uint64_t seed,
                                        double bin_spacing_m = 0.0);

/// dPhi = 4 pi (n + Ce) dL / lambda.
double vibration_phase_shift(double delta_l_m, const FiberParams& params);

/// Per-scatterer round-trip delays plus the vibration phase accumulated by
/// scatterers beyond each event position, evaluated at slow time t_slow.
/// The offset at equal z is identical across cores by construction.
std::vector<DelayEntry> effective_delays(const MultiCoreFiber& fiber, int core,
                                         std::span<const VibrationEvent> events,
                                         double t_slow_s);

}  // namespace ofdr
