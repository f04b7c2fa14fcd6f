#include "ofdr/demod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ofdr/fft.hpp"
#include "ofdr/trace.hpp"

namespace ofdr {

TimeDistanceMap time_distance_map(std::span<const DifferentialPhaseTrace> per_sweep) {
    if (per_sweep.size() < 2) throw ConfigError("time_distance_map: needs >= 2 sweeps");
    const std::size_t n_bins = per_sweep.front().dphi.size();
    TimeDistanceMap map;
    map.n_sweeps = per_sweep.size();
    map.n_bins = n_bins;
    map.bin_spacing_m = per_sweep.front().bin_spacing_m;
    map.gauge_bins = per_sweep.front().gauge_bins;
    map.values.reserve(map.n_sweeps * n_bins);
    for (const auto& t : per_sweep) {
        if (t.dphi.size() != n_bins)
            throw ConfigError("time_distance_map: ragged dphi traces");
        map.values.insert(map.values.end(), t.dphi.begin(), t.dphi.end());
        map.t_slow_s.push_back(t.t_slow_s);
    }
    return map;
}

std::vector<EventDetection> locate_events(const TimeDistanceMap& map,
                                          double threshold_sigma,
                                          int min_cluster_bins) {
    if (!(threshold_sigma > 0.0))
        throw ConfigError("locate_events: threshold must be > 0");

    // Column slow-time std. Columns are unwrapped first so a large steady
    // oscillation is not clipped by the wrap.
    std::vector<double> col_std(map.n_bins, 0.0);
    std::vector<double> col(map.n_sweeps);
    const double inv_s = 1.0 / static_cast<double>(map.n_sweeps);
    for (std::size_t b = 0; b < map.n_bins; ++b) {
        for (std::size_t s = 0; s < map.n_sweeps; ++s) col[s] = map.row(s)[b];
        auto un = unwrap_slow_time(col);
        double mean = 0.0;
        for (double v : un) mean += v;
        mean *= inv_s;
        double var = 0.0;
        for (double v : un) var += (v - mean) * (v - mean);
        col_std[b] = std::sqrt(var * inv_s);
    }

    std::vector<double> sorted(col_std);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double noise = std::max(sorted[sorted.size() / 2], 1e-12);
    const double gate = threshold_sigma * noise;

    std::vector<EventDetection> events;
    std::size_t run_start = 0;
    std::size_t run_len = 0;
    auto flush = [&](std::size_t end) {
        if (run_len >= static_cast<std::size_t>(min_cluster_bins)) {
            EventDetection ev;
            ev.first_bin = run_start;
            ev.last_bin = end - 1;
            double wsum = 0.0, zsum = 0.0, peak = 0.0;
            for (std::size_t b = run_start; b < end; ++b) {
                const double w = col_std[b] * col_std[b];
                wsum += w;
                zsum += w * static_cast<double>(b);
                peak = std::max(peak, col_std[b]);
            }
            const double center_bin = zsum / wsum + 0.5 * map.gauge_bins;
            ev.location_m = center_bin * map.bin_spacing_m;
            ev.strength_sigma = peak / noise;
            events.push_back(ev);
        }
        run_len = 0;
    };
    for (std::size_t b = 0; b < map.n_bins; ++b) {
        if (col_std[b] > gate) {
            if (run_len == 0) run_start = b;
            ++run_len;
        } else if (run_len > 0) {
            flush(b);
        }
    }
    if (run_len > 0) flush(map.n_bins);
    return events;
}

namespace {

/// Parabolic interpolation of a log-magnitude peak; returns bin offset in
/// [-0.5, 0.5].
double parabolic_offset(double l, double c, double r) {
    const double denom = l - 2.0 * c + r;
    if (std::abs(denom) < 1e-300) return 0.0;
    double d = 0.5 * (l - r) / denom;
    return std::clamp(d, -0.5, 0.5);
}

}  // namespace

DemodulationResult demodulate(
    std::span<const std::vector<ComplexTrace>> per_sweep_traces, double location_m,
    int gauge_bins, const FiberParams& params) {
    if (per_sweep_traces.size() < 8)
        throw ConfigError("demodulate: needs >= 8 sweeps for spectral estimates");
    const auto& ref_traces = per_sweep_traces.front();
    if (ref_traces.empty()) throw ConfigError("demodulate: no cores");
    const double spacing = ref_traces.front().bin_spacing_m;
    if (location_m < 0.0 || location_m > params.length_m)
        throw ConfigError("demodulate: location outside the fiber");

    const std::size_t n_sweeps = per_sweep_traces.size();

    // Gauge interval whose center is nearest the probed location.
    const double want = location_m / spacing - 0.5 * gauge_bins;
    const auto trace_len = ref_traces.front().bins.size();
    const auto max_idx = trace_len - static_cast<std::size_t>(gauge_bins) - 1;
    std::size_t probe = 0;
    if (want > 0.0)
        probe = std::min(static_cast<std::size_t>(std::llround(want)), max_idx);

    std::vector<double> series(n_sweeps);
    for (std::size_t s = 0; s < n_sweeps; ++s) {
        auto dphi = rvs_differential_phase(per_sweep_traces[s], ref_traces, gauge_bins);
        series[s] = dphi.dphi[probe];
    }

    DemodulationResult res;
    res.location_m = location_m;
    res.waveform_rad = unwrap_slow_time(series);
    res.time_s.resize(n_sweeps);
    const double dt = per_sweep_traces[1].front().t_slow_s - ref_traces.front().t_slow_s;
    for (std::size_t s = 0; s < n_sweeps; ++s)
        res.time_s[s] = ref_traces.front().t_slow_s + dt * static_cast<double>(s);

    // Slow-time spectrum: demeaned, Hanning-windowed, amplitude-normalized.
    const auto w = window_samples(Window::hanning, n_sweeps);
    const double wsum = window_sum(Window::hanning, n_sweeps);
    double mean = 0.0;
    for (double v : res.waveform_rad) mean += v;
    mean /= static_cast<double>(n_sweeps);
    std::vector<double> buf(n_sweeps);
    for (std::size_t s = 0; s < n_sweeps; ++s) buf[s] = w[s] * (res.waveform_rad[s] - mean);
    auto spec = fft::rfft(buf);

    const double fs_slow = 1.0 / dt;
    const std::size_t n_freq = spec.size();
    res.frequency_hz.resize(n_freq);
    res.power.resize(n_freq);
    const double scale = 2.0 / wsum;
    for (std::size_t k = 0; k < n_freq; ++k) {
        res.frequency_hz[k] = fs_slow * static_cast<double>(k) / static_cast<double>(n_sweeps);
        const double amp = std::abs(spec[k]) * scale;
        res.power[k] = amp * amp;
    }

    // Peak search above DC.
    std::size_t k_hat = 1;
    for (std::size_t k = 2; k + 1 < n_freq; ++k)
        if (res.power[k] > res.power[k_hat]) k_hat = k;

    double offset = 0.0;
    if (k_hat > 1 && k_hat + 1 < n_freq) {
        const double l = std::log(std::max(res.power[k_hat - 1], 1e-300));
        const double c = std::log(std::max(res.power[k_hat], 1e-300));
        const double r = std::log(std::max(res.power[k_hat + 1], 1e-300));
        offset = parabolic_offset(l, c, r);
    }
    res.peak_frequency_hz =
        fs_slow * (static_cast<double>(k_hat) + offset) / static_cast<double>(n_sweeps);
    const double corr = window_amplitude_response(Window::hanning, offset);
    res.amplitude_rad = std::sqrt(res.power[k_hat]) / std::max(corr, 1e-6);

    // Off-peak floor: median power/amplitude excluding +/-2 bins and DC.
    std::vector<double> off;
    off.reserve(n_freq);
    for (std::size_t k = 1; k < n_freq; ++k) {
        if (k + 2 >= k_hat && k <= k_hat + 2) continue;
        off.push_back(res.power[k]);
    }
    if (off.empty()) throw ConfigError("demodulate: spectrum too short for an SNR floor");
    std::nth_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2),
                     off.end());
    const double floor_power = std::max(off[off.size() / 2], 1e-300);
    res.snr_db = db10(res.power[k_hat] / floor_power);

    const double phase_floor = std::sqrt(floor_power);
    res.sensitivity_m = params.wavelength_m * phase_floor /
                        (4.0 * kPi * (params.group_index_n + params.strain_coeff_ce));
    return res;
}

}  // namespace ofdr
