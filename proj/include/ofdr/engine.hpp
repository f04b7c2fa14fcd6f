#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ofdr/fiber.hpp"
#include "ofdr/parallel.hpp"
#include "ofdr/types.hpp"

namespace ofdr {

struct SweepConfig {
    double start_freq_hz = 0.0;        // optical offset; absolute value irrelevant to the beat
    double sweep_range_hz = 8e9;
    double sweep_rate_hz_per_s = 160e9;
    double sample_rate_hz = 4e6;
    double repetition_period_s = 0.1;

    double duration_s() const { return sweep_range_hz / sweep_rate_hz_per_s; }
    std::size_t sample_count() const {
        return static_cast<std::size_t>(duration_s() * sample_rate_hz);
    }
    /// Effective sweep span gamma * N / fs actually covered by the samples.
    double effective_range_hz() const {
        return sweep_rate_hz_per_s * static_cast<double>(sample_count()) / sample_rate_hz;
    }
    double bin_spacing_m(double group_index_n) const {
        return range_bin_spacing_m(group_index_n, effective_range_hz());
    }

    /// Validates invariants; max_delay_s is the largest round-trip delay the
    /// scenario can produce (Nyquist margin >= 1.25x on 2 x max beat).
    void validate(double max_delay_s) const;
};

struct LaserModel {
    double linewidth_hz = 5e3;
    bool enabled = true;

    double effective_linewidth_hz() const { return enabled ? linewidth_hz : 0.0; }
};

struct ReceiverModel {
    double noise_floor_dbm = -80.0;
    double signal_reference_dbm = -55.0;
    bool enabled = true;

    /// Range-compressed noise-floor intensity relative to the mean RBS level.
    double noise_to_signal() const {
        return enabled ? undb10(noise_floor_dbm - signal_reference_dbm) : 0.0;
    }
};

/// Sampled real-valued beat signal for one core and one sweep.
struct BeatRecord {
    int core = 0;
    int sweep_index = 0;
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    double t_slow_s = 0.0;
    // Acquisition parameters needed downstream for range mapping.
    double sweep_rate_hz_per_s = 0.0;
    double start_freq_hz = 0.0;
};

enum class SynthesisPath { time_domain, range_domain };
SynthesisPath synthesis_path_from_string(const std::string& s);
std::string to_string(SynthesisPath p);

/// Wiener laser phase path: phi(0) = 0, increment variance
/// 2 pi linewidth dt per step. Returns floor(duration * fs) samples.
std::vector<double> laser_phase_noise_path(double linewidth_hz, double duration_s,
                                           double sample_rate_hz, std::uint64_t seed);

/// Mean range-compressed trace intensity for a uniform scatterer field with
/// E|r|^2 = 1 (in-fiber bins): ENBW(window) * density * bin_spacing.
double mean_trace_intensity(const FiberParams& params, const SweepConfig& sweep,
                            Window window);

/// Trace intensity on the receiver's dBm scale.
double intensity_dbm(double intensity, const ReceiverModel& rx, double mean_intensity);

/// Time-domain (reference) beat synthesis for one core and one sweep:
/// s(t) = sum_k a_k cos(2 pi (gamma tau_k t + f0 tau_k - gamma tau_k^2 / 2)
///                      + theta_k + dphi_vib_k + phiL(t) - phiL(t - tau_k)) + w(t).
BeatRecord synthesize_beat(const MultiCoreFiber& fiber, int core,
                           std::span<const VibrationEvent> events,
                           const SweepConfig& sweep, const LaserModel& laser,
                           const ReceiverModel& rx, int sweep_index,
                           std::uint64_t seed, Exec exec = Exec::parallel);

/// Range-domain (fast) synthesis of the compressed trace for one core and
/// one sweep. Produces the same trace as synthesize_beat + to_complex_trace
/// up to a documented approximation: scatterers are spread with the exact
/// window kernel truncated at +/-8 bins, and laser phase noise enters as a
/// coherence attenuation exp(-pi linewidth tau) plus the first-order leak
/// field computed by chirped circular convolution. Hanning window only.
ComplexTrace synthesize_trace_direct(const MultiCoreFiber& fiber, int core,
                                     std::span<const VibrationEvent> events,
                                     const SweepConfig& sweep, const LaserModel& laser,
                                     const ReceiverModel& rx, Window window,
                                     int sweep_index, std::uint64_t seed,
                                     Exec exec = Exec::parallel);

/// Sweep series: per-sweep, per-core compressed traces with
/// t_slow = sweep_index * repetition_period. Vibrations advance in slow
/// time; laser/receiver noise substreams are independent per sweep (the
/// laser path is shared by all cores of a sweep); the scatterer field is
/// constant.
std::vector<std::vector<ComplexTrace>> synthesize_sweep_series(
    const MultiCoreFiber& fiber, std::span<const VibrationEvent> events,
    const SweepConfig& sweep, const LaserModel& laser, const ReceiverModel& rx,
    int n_sweeps, std::uint64_t seed, SynthesisPath path, Window window,
    Exec exec = Exec::parallel);

namespace detail {
/// Serial/OpenMP twins of the hot kernels; outputs are bit-identical for
/// any thread count (fixed per-element accumulation order).
void beat_kernel(std::span<const double> amplitude, std::span<const double> phase0,
                 std::span<const double> omega, std::span<const double> delay_samples,
                 std::span<const double> laser_path, std::size_t laser_offset,
                 double dt, std::span<double> out, Exec exec);

void spread_kernel(std::span<const double> nu, std::span<const std::complex<double>> value,
                   std::size_t n_fft, int half_width,
                   std::span<std::complex<double>> out, Exec exec);
}  // namespace detail

}  // namespace ofdr
