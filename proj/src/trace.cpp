#include "ofdr/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ofdr/fft.hpp"

namespace ofdr {

ComplexTrace to_complex_trace(const BeatRecord& beat, Window window,
                              double fiber_index_n) {
    if (beat.samples.empty()) throw ConfigError("to_complex_trace: empty beat record");
    const std::size_t n = beat.samples.size();

    const auto w = window_samples(window, n);
    std::vector<double> buf(n);
    for (std::size_t t = 0; t < n; ++t) buf[t] = w[t] * beat.samples[t];
    auto spectrum = fft::rfft(buf);

    const double scale = 2.0 / window_sum(window, n);
    const double effective_range =
        beat.sweep_rate_hz_per_s * static_cast<double>(n) / beat.sample_rate_hz;

    ComplexTrace trace;
    trace.core = beat.core;
    trace.sweep_index = beat.sweep_index;
    trace.t_slow_s = beat.t_slow_s;
    trace.window = window;
    trace.bin_spacing_m = range_bin_spacing_m(fiber_index_n, effective_range);
    trace.bins.resize(n / 2);
    for (std::size_t b = 0; b < n / 2; ++b) trace.bins[b] = spectrum[b] * scale;
    return trace;
}

std::vector<std::complex<double>> binned_field(const MultiCoreFiber& fiber, int core,
                                               double bin_spacing_m) {
    if (core < 0 || core >= fiber.n_cores)
        throw std::out_of_range("binned_field: core index out of range");
    if (!(bin_spacing_m > 0.0)) throw ConfigError("binned_field: bin spacing must be > 0");
    const auto n_bins =
        static_cast<std::size_t>(fiber.params.length_m / bin_spacing_m);
    std::vector<std::complex<double>> bins(n_bins, {0.0, 0.0});
    const auto& pos = fiber.position_m[core];
    const auto& refl = fiber.reflectivity[core];
    for (std::size_t k = 0; k < pos.size(); ++k) {
        const auto b = static_cast<std::size_t>(pos[k] / bin_spacing_m);
        if (b < n_bins) bins[b] += refl[k];
    }
    return bins;
}

std::vector<double> intensity_average(std::span<const ComplexTrace> traces,
                                      AverageMode mode) {
    if (traces.empty()) throw ConfigError("intensity_average: no traces");
    const std::size_t len = traces.front().bins.size();
    for (const auto& t : traces) {
        if (t.bins.size() != len)
            throw ConfigError("intensity_average: traces have mismatched lengths");
        if (t.sweep_index != traces.front().sweep_index)
            throw ConfigError("intensity_average: traces belong to different sweeps");
    }
    std::vector<double> out(len, 0.0);
    const double inv = 1.0 / static_cast<double>(traces.size());
    for (const auto& t : traces) {
        if (mode == AverageMode::intensity) {
            for (std::size_t b = 0; b < len; ++b) out[b] += std::norm(t.bins[b]) * inv;
        } else {
            for (std::size_t b = 0; b < len; ++b) out[b] += std::abs(t.bins[b]) * inv;
        }
    }
    if (mode == AverageMode::amplitude)
        for (auto& v : out) v = v * v;
    return out;
}

namespace {

DifferentialPhaseTrace rvs_impl(std::span<const ComplexTrace> traces,
                                const ComplexTrace* reference, int gauge_bins) {
    if (traces.empty()) throw ConfigError("rvs_differential_phase: no traces");
    if (gauge_bins < 1) throw ConfigError("rvs_differential_phase: gauge_bins must be >= 1");
    const std::size_t len = traces.front().bins.size();
    if (static_cast<std::size_t>(gauge_bins) >= len)
        throw ConfigError("rvs_differential_phase: gauge >= trace length");

    const auto g = static_cast<std::size_t>(gauge_bins);
    const std::size_t out_len = len - g;
    std::vector<std::complex<double>> v(out_len, {0.0, 0.0});
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& bins = traces[i].bins;
        if (bins.size() != len)
            throw ConfigError("rvs_differential_phase: traces have mismatched lengths");
        if (reference) {
            const auto& ref = reference[i].bins;
            if (ref.size() != len)
                throw ConfigError("rvs_differential_phase: reference length mismatch");
            for (std::size_t z = 0; z < out_len; ++z) {
                const auto vec = bins[z + g] * std::conj(bins[z]);
                const auto rvec = ref[z + g] * std::conj(ref[z]);
                const double mag = std::abs(rvec);
                // Unit rotation only; a zero reference vector contributes its
                // measurement unrotated rather than poisoning the sum.
                v[z] += mag > 0.0 ? vec * (std::conj(rvec) / mag) : vec;
            }
        } else {
            for (std::size_t z = 0; z < out_len; ++z)
                v[z] += bins[z + g] * std::conj(bins[z]);
        }
    }

    DifferentialPhaseTrace out;
    out.gauge_bins = gauge_bins;
    out.bin_spacing_m = traces.front().bin_spacing_m;
    out.sweep_index = traces.front().sweep_index;
    out.t_slow_s = traces.front().t_slow_s;
    out.source_cores.reserve(traces.size());
    for (const auto& t : traces) out.source_cores.push_back(t.core);
    out.dphi.resize(out_len);
    for (std::size_t z = 0; z < out_len; ++z) {
        double a = std::arg(v[z]);  // [-pi, pi]
        if (a <= -kPi) a += kTwoPi;
        out.dphi[z] = a;
    }
    return out;
}

}  // namespace

DifferentialPhaseTrace rvs_differential_phase(std::span<const ComplexTrace> traces,
                                              int gauge_bins) {
    return rvs_impl(traces, nullptr, gauge_bins);
}

DifferentialPhaseTrace rvs_differential_phase(std::span<const ComplexTrace> traces,
                                              std::span<const ComplexTrace> reference,
                                              int gauge_bins) {
    if (reference.size() != traces.size())
        throw ConfigError("rvs_differential_phase: reference core count mismatch");
    return rvs_impl(traces, reference.data(), gauge_bins);
}

std::size_t count_phase_jumps(std::span<const double> dphi) {
    if (dphi.size() < 2) return 0;
    // Raw adjacent differences of the wrapped series exceed pi exactly where
    // the phase flips full scale across +/-pi (a "2 pi jump-over" in the
    // plotted differential phase). The epsilon keeps exact +/-pi
    // alternations, e.g. +pi/2 -> -pi/2, below threshold.
    constexpr double threshold = kPi * (1.0 + 1e-6);
    std::size_t count = 0;
    for (std::size_t i = 1; i < dphi.size(); ++i)
        if (std::abs(dphi[i] - dphi[i - 1]) > threshold) ++count;
    return count;
}

std::size_t count_phase_jumps(const DifferentialPhaseTrace& trace) {
    return count_phase_jumps(std::span<const double>(trace.dphi));
}

std::vector<double> unwrap_slow_time(std::span<const double> phases) {
    std::vector<double> out(phases.begin(), phases.end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double step = wrap_pi(phases[i] - phases[i - 1]);
        out[i] = out[i - 1] + step;
    }
    return out;
}

}  // namespace ofdr
