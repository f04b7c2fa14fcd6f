#include "ofdr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ofdr/fft.hpp"
#include "ofdr/rng.hpp"
#include "ofdr/trace.hpp"

namespace ofdr {

SynthesisPath synthesis_path_from_string(const std::string& s) {
    if (s == "time_domain") return SynthesisPath::time_domain;
    if (s == "range_domain") return SynthesisPath::range_domain;
    throw ConfigError("unknown synthesis path '" + s +
                      "' (expected time_domain|range_domain)");
}

std::string to_string(SynthesisPath p) {
    return p == SynthesisPath::time_domain ? "time_domain" : "range_domain";
}

void SweepConfig::validate(double max_delay_s) const {
    if (!(sweep_range_hz > 0.0)) throw ConfigError("sweep.sweep_range_hz must be > 0");
    if (!(sweep_rate_hz_per_s > 0.0))
        throw ConfigError("sweep.sweep_rate_hz_per_s must be > 0");
    if (!(sample_rate_hz > 0.0)) throw ConfigError("sweep.sample_rate_hz must be > 0");
    if (!(repetition_period_s > 0.0))
        throw ConfigError("sweep.repetition_period_s must be > 0");
    if (duration_s() > repetition_period_s)
        throw ConfigError("sweep duration " + std::to_string(duration_s()) +
                          " s exceeds repetition_period_s");
    if (sample_count() < 16) throw ConfigError("sweep produces fewer than 16 samples");
    const double f_beat_max = sweep_rate_hz_per_s * max_delay_s;
    const double required = 2.5 * f_beat_max;  // 2x Nyquist with 1.25x margin
    if (sample_rate_hz < required)
        throw ConfigError("sample_rate_hz=" + std::to_string(sample_rate_hz) +
                          " below the required " + std::to_string(required) +
                          " Hz (2.5x the " + std::to_string(f_beat_max) +
                          " Hz maximum beat)");
}

std::vector<double> laser_phase_noise_path(double linewidth_hz, double duration_s,
                                           double sample_rate_hz, std::uint64_t seed) {
    if (!(duration_s > 0.0)) throw ConfigError("laser path duration must be > 0");
    if (!(sample_rate_hz > 0.0)) throw ConfigError("laser path sample rate must be > 0");
    if (linewidth_hz < 0.0) throw ConfigError("linewidth_hz must be >= 0");
    const auto n = static_cast<std::size_t>(duration_s * sample_rate_hz);
    std::vector<double> path(n, 0.0);
    if (linewidth_hz == 0.0 || n == 0) return path;
    Rng rng(seed);
    const double sigma = std::sqrt(kTwoPi * linewidth_hz / sample_rate_hz);
    for (std::size_t i = 1; i < n; ++i) path[i] = path[i - 1] + sigma * rng.normal();
    return path;
}

double mean_trace_intensity(const FiberParams& params, const SweepConfig& sweep,
                            Window window) {
    return window_enbw(window) * params.scatterer_density_per_m *
           sweep.bin_spacing_m(params.group_index_n);
}

double intensity_dbm(double intensity, const ReceiverModel& rx, double mean_intensity) {
    const double rel = std::max(intensity / mean_intensity, 1e-30);
    return rx.signal_reference_dbm + db10(rel);
}

namespace {

/// Wiener path over [-m_back, n) samples with phi(0) = 0 pinned at index m_back.
std::vector<double> wiener_path_extended(double linewidth_hz, std::size_t n,
                                         std::size_t m_back, double sample_rate_hz,
                                         Rng& rng) {
    std::vector<double> path(m_back + n, 0.0);
    const double sigma = std::sqrt(kTwoPi * linewidth_hz / sample_rate_hz);
    for (std::size_t i = 1; i < path.size(); ++i)
        path[i] = path[i - 1] + sigma * rng.normal();
    const double ref = path[m_back];
    for (auto& v : path) v -= ref;
    return path;
}

double receiver_beat_sigma(const FiberParams& params, const SweepConfig& sweep,
                           const ReceiverModel& rx) {
    // White beat-domain noise whose range-compressed floor sits
    // noise_floor_dbm - signal_reference_dbm below the mean trace level
    // (window-independent; see mean_trace_intensity).
    const double rho_bin =
        params.scatterer_density_per_m * sweep.bin_spacing_m(params.group_index_n);
    const double n = static_cast<double>(sweep.sample_count());
    return 0.5 * std::sqrt(rx.noise_to_signal() * rho_bin * n);
}

struct ScattererTones {
    std::vector<double> amplitude;
    std::vector<double> phase0;         // 2pi(f0 tau - gamma tau^2/2) + theta + dphi_vib
    std::vector<double> omega;          // 2pi gamma tau
    std::vector<double> delay_samples;  // tau * fs
    std::vector<double> nu;             // fractional bin gamma tau N / fs
    double max_delay_s = 0.0;
};

ScattererTones build_tones(const MultiCoreFiber& fiber, int core,
                           std::span<const VibrationEvent> events,
                           const SweepConfig& sweep, double t_slow_s) {
    const auto delays = effective_delays(fiber, core, events, t_slow_s);
    const auto& refl = fiber.reflectivity[core];
    const double gamma = sweep.sweep_rate_hz_per_s;
    const double f0 = sweep.start_freq_hz;
    const double fs = sweep.sample_rate_hz;
    const double n_over_fs = static_cast<double>(sweep.sample_count()) / fs;

    ScattererTones t;
    const std::size_t k_count = delays.size();
    t.amplitude.resize(k_count);
    t.phase0.resize(k_count);
    t.omega.resize(k_count);
    t.delay_samples.resize(k_count);
    t.nu.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double tau = delays[k].delay_s;
        t.amplitude[k] = std::abs(refl[k]);
        t.phase0[k] = kTwoPi * (f0 * tau - 0.5 * gamma * tau * tau) +
                      std::arg(refl[k]) + delays[k].phase_offset_rad;
        t.omega[k] = kTwoPi * gamma * tau;
        t.delay_samples[k] = tau * fs;
        t.nu[k] = gamma * tau * n_over_fs;
    }
    t.max_delay_s = 2.0 * fiber.params.group_index_n * fiber.params.length_m / kSpeedOfLight;
    return t;
}

/// Per-sweep laser context for the range-domain path.
struct LaserSweepContext {
    bool active = false;
    double linewidth_hz = 0.0;
    std::vector<std::complex<double>> fft_p;         // FFT of P
    std::vector<std::complex<double>> fft_p_chirped; // FFT of P * chirp(centered)
};

LaserSweepContext build_laser_context(double linewidth_hz, const SweepConfig& sweep,
                                      Window window, std::uint64_t seed, int sweep_index) {
    LaserSweepContext ctx;
    if (linewidth_hz <= 0.0) return ctx;
    ctx.active = true;
    ctx.linewidth_hz = linewidth_hz;

    const std::size_t n = sweep.sample_count();
    auto rng = Rng::substream(seed, RngDomain::laser_path,
                              static_cast<std::uint64_t>(sweep_index));
    auto phi = wiener_path_extended(linewidth_hz, n, 0, sweep.sample_rate_hz, rng);
    const auto w = window_samples(window, n);
    std::vector<double> wphi(n);
    for (std::size_t t = 0; t < n; ++t) wphi[t] = w[t] * phi[t];

    // P(m) on the full circle from the real transform.
    auto half = fft::rfft(wphi);
    std::vector<std::complex<double>> p(n);
    for (std::size_t m = 0; m <= n / 2; ++m) p[m] = half[m];
    for (std::size_t m = n / 2 + 1; m < n; ++m) p[m] = std::conj(half[n - m]);

    const double kappa = 1.0 / (sweep.sweep_rate_hz_per_s *
                                (static_cast<double>(n) / sweep.sample_rate_hz) *
                                (static_cast<double>(n) / sweep.sample_rate_hz));
    ctx.fft_p = p;
    ctx.fft_p_chirped.resize(n);
    const auto half_n = static_cast<double>(n) / 2.0;
    for (std::size_t m = 0; m < n; ++m) {
        // Kernel-side chirp uses the centered circular offset.
        double c = static_cast<double>(m);
        if (c >= half_n) c -= static_cast<double>(n);
        ctx.fft_p_chirped[m] = p[m] * std::polar(1.0, kPi * kappa * c * c);
    }
    fft::fft_inplace(ctx.fft_p, false);
    fft::fft_inplace(ctx.fft_p_chirped, false);
    return ctx;
}

/// First-order laser phase-noise leak field on the full circle:
/// j [ (F (*) P)(m) - e^{-i pi k m^2} ((F chirp) (*) (P chirp_c))(m) ].
std::vector<std::complex<double>> leak_field(const std::vector<std::complex<double>>& f_binned,
                                             const LaserSweepContext& ctx,
                                             const SweepConfig& sweep) {
    const std::size_t n = f_binned.size();
    const double kappa = 1.0 / (sweep.sweep_rate_hz_per_s *
                                (static_cast<double>(n) / sweep.sample_rate_hz) *
                                (static_cast<double>(n) / sweep.sample_rate_hz));

    std::vector<std::complex<double>> conv1(f_binned);
    fft::fft_inplace(conv1, false);
    std::vector<std::complex<double>> conv2(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double qq = static_cast<double>(q);
        conv2[q] = f_binned[q] * std::polar(1.0, kPi * kappa * qq * qq);
    }
    fft::fft_inplace(conv2, false);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        conv1[m] *= ctx.fft_p[m] * scale;
        conv2[m] *= ctx.fft_p_chirped[m] * scale;
    }
    fft::fft_inplace(conv1, true);
    fft::fft_inplace(conv2, true);

    std::vector<std::complex<double>> leak(n);
    const std::complex<double> j{0.0, 1.0};
    for (std::size_t m = 0; m < n; ++m) {
        const double mm = static_cast<double>(m);
        leak[m] = j * (conv1[m] - std::polar(1.0, -kPi * kappa * mm * mm) * conv2[m]);
    }
    return leak;
}

ComplexTrace synthesize_trace_direct_impl(const MultiCoreFiber& fiber, int core,
                                          std::span<const VibrationEvent> events,
                                          const SweepConfig& sweep,
                                          const LaserSweepContext& laser_ctx,
                                          const ReceiverModel& rx, Window window,
                                          int sweep_index, std::uint64_t seed, Exec exec) {
    if (window != Window::hanning)
        throw ConfigError("range_domain synthesis supports the hanning window only; "
                          "use time_domain for rectangular processing");
    const std::size_t n = sweep.sample_count();
    const std::size_t bins = n / 2;
    const double t_slow = sweep.repetition_period_s * sweep_index;

    auto tones = build_tones(fiber, core, events, sweep, t_slow);
    sweep.validate(tones.max_delay_s);

    const double wsum = window_sum(window, n);
    const double atten_rate = laser_ctx.active ? kPi * laser_ctx.linewidth_hz : 0.0;
    const double fs = sweep.sample_rate_hz;

    const std::size_t k_count = tones.nu.size();
    std::vector<std::complex<double>> value(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double tau = tones.delay_samples[k] / fs;
        const double amp = tones.amplitude[k] * std::exp(-atten_rate * tau) / wsum;
        value[k] = std::polar(amp, tones.phase0[k]);
    }

    std::vector<std::complex<double>> full(n, {0.0, 0.0});
    detail::spread_kernel(tones.nu, value, n, 8, full, exec);

    if (laser_ctx.active) {
        std::vector<std::complex<double>> f_binned(n, {0.0, 0.0});
        for (std::size_t k = 0; k < k_count; ++k) {
            auto b = static_cast<std::size_t>(std::llround(tones.nu[k]));
            if (b < n) f_binned[b] += value[k];
        }
        const auto leak = leak_field(f_binned, laser_ctx, sweep);
        for (std::size_t m = 0; m < n; ++m) full[m] += leak[m];
    }

    ComplexTrace trace;
    trace.core = core;
    trace.sweep_index = sweep_index;
    trace.t_slow_s = t_slow;
    trace.window = window;
    trace.bin_spacing_m = sweep.bin_spacing_m(fiber.params.group_index_n);
    trace.bins.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(bins));

    if (rx.enabled && rx.noise_to_signal() > 0.0) {
        auto rng = Rng::substream(seed, RngDomain::receiver_noise,
                                  static_cast<std::uint64_t>(core),
                                  static_cast<std::uint64_t>(sweep_index));
        const double sigma =
            std::sqrt(0.5 * rx.noise_to_signal() * mean_trace_intensity(fiber.params, sweep, window));
        for (auto& b : trace.bins) b += std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
    }
    return trace;
}

}  // namespace

namespace detail {

void beat_kernel(std::span<const double> amplitude, std::span<const double> phase0,
                 std::span<const double> omega, std::span<const double> delay_samples,
                 std::span<const double> laser_path, std::size_t laser_offset,
                 double dt, std::span<double> out, Exec exec) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const std::size_t k_count = amplitude.size();
    const bool with_laser = !laser_path.empty();

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        double acc = 0.0;
        if (with_laser) {
            const double phi_t = laser_path[static_cast<std::size_t>(i) + laser_offset];
            for (std::size_t k = 0; k < k_count; ++k) {
                const double x = static_cast<double>(i) - delay_samples[k];
                const auto j = static_cast<std::ptrdiff_t>(std::floor(x));
                const double frac = x - static_cast<double>(j);
                const std::size_t idx = static_cast<std::size_t>(j) + laser_offset;
                const double phi_del =
                    laser_path[idx] * (1.0 - frac) + laser_path[idx + 1] * frac;
                acc += amplitude[k] *
                       std::cos(omega[k] * t + phase0[k] + phi_t - phi_del);
            }
        } else {
            for (std::size_t k = 0; k < k_count; ++k)
                acc += amplitude[k] * std::cos(omega[k] * t + phase0[k]);
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

void spread_kernel(std::span<const double> nu, std::span<const std::complex<double>> value,
                   std::size_t n_fft, int half_width,
                   std::span<std::complex<double>> out, Exec exec) {
    // Gather form: each output bin sums its contributing scatterers in
    // ascending index order, so results are bit-identical for any thread
    // count. nu must be ascending (scatterer positions are).
    const auto n_out = static_cast<std::ptrdiff_t>(out.size());
    const std::size_t k_count = nu.size();
    const double nn = static_cast<double>(n_fft);
    const std::complex<double> rot = std::polar(1.0, -kPi * (nn - 1.0) / nn);
    const std::complex<double> rot_conj = std::conj(rot);
    const double reach = static_cast<double>(half_width) + 0.5;

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t m = 0; m < n_out; ++m) {
        const double mm = static_cast<double>(m);
        // First scatterer with nu >= m - reach.
        auto lo = static_cast<std::size_t>(
            std::lower_bound(nu.begin(), nu.end(), mm - reach) - nu.begin());
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = lo; k < k_count && nu[k] <= mm + reach; ++k) {
            const double x = mm - nu[k];
            const double r = std::round(x);
            if (std::abs(x - r) < 1e-9) {
                // On-bin scatterer: W(0)=0.5N, W(+/-1)=-0.25N, zero elsewhere.
                const auto d = static_cast<long>(r);
                if (d == 0)
                    acc += value[k] * (0.5 * nn);
                else if (d == 1 || d == -1)
                    acc -= value[k] * (0.25 * nn);
                continue;
            }
            const double s = std::sin(kPi * x);
            const std::complex<double> e = std::polar(1.0, -kPi * x * (nn - 1.0) / nn);
            // Periodic-Hann kernel: the three Dirichlet terms share sin(pi x).
            const std::complex<double> combo =
                0.5 / std::sin(kPi * x / nn) + 0.25 * rot_conj / std::sin(kPi * (x - 1.0) / nn) +
                0.25 * rot / std::sin(kPi * (x + 1.0) / nn);
            acc += value[k] * (e * (s * combo));
        }
        out[static_cast<std::size_t>(m)] = acc;
    }
}

}  // namespace detail

BeatRecord synthesize_beat(const MultiCoreFiber& fiber, int core,
                           std::span<const VibrationEvent> events,
                           const SweepConfig& sweep, const LaserModel& laser,
                           const ReceiverModel& rx, int sweep_index,
                           std::uint64_t seed, Exec exec) {
    const double t_slow = sweep.repetition_period_s * sweep_index;
    auto tones = build_tones(fiber, core, events, sweep, t_slow);
    sweep.validate(tones.max_delay_s);
    const std::size_t n = sweep.sample_count();

    BeatRecord rec;
    rec.core = core;
    rec.sweep_index = sweep_index;
    rec.t_slow_s = t_slow;
    rec.sample_rate_hz = sweep.sample_rate_hz;
    rec.sweep_rate_hz_per_s = sweep.sweep_rate_hz_per_s;
    rec.start_freq_hz = sweep.start_freq_hz;
    rec.samples.resize(n);

    std::vector<double> laser_path;
    std::size_t laser_offset = 0;
    const double lw = laser.effective_linewidth_hz();
    if (lw > 0.0) {
        laser_offset = static_cast<std::size_t>(
                           std::ceil(tones.max_delay_s * sweep.sample_rate_hz)) + 2;
        auto rng = Rng::substream(seed, RngDomain::laser_path,
                                  static_cast<std::uint64_t>(sweep_index));
        laser_path = wiener_path_extended(lw, n + 1, laser_offset, sweep.sample_rate_hz, rng);
    }

    detail::beat_kernel(tones.amplitude, tones.phase0, tones.omega, tones.delay_samples,
                        laser_path, laser_offset, 1.0 / sweep.sample_rate_hz,
                        rec.samples, exec);

    if (rx.enabled && rx.noise_to_signal() > 0.0) {
        auto rng = Rng::substream(seed, RngDomain::receiver_noise,
                                  static_cast<std::uint64_t>(core),
                                  static_cast<std::uint64_t>(sweep_index));
        const double sigma = receiver_beat_sigma(fiber.params, sweep, rx);
        for (auto& s : rec.samples) s += sigma * rng.normal();
    }
    return rec;
}

ComplexTrace synthesize_trace_direct(const MultiCoreFiber& fiber, int core,
                                     std::span<const VibrationEvent> events,
                                     const SweepConfig& sweep, const LaserModel& laser,
                                     const ReceiverModel& rx, Window window,
                                     int sweep_index, std::uint64_t seed, Exec exec) {
    const auto ctx = build_laser_context(laser.effective_linewidth_hz(), sweep, window,
                                         seed, sweep_index);
    return synthesize_trace_direct_impl(fiber, core, events, sweep, ctx, rx, window,
                                        sweep_index, seed, exec);
}

std::vector<std::vector<ComplexTrace>> synthesize_sweep_series(
    const MultiCoreFiber& fiber, std::span<const VibrationEvent> events,
    const SweepConfig& sweep, const LaserModel& laser, const ReceiverModel& rx,
    int n_sweeps, std::uint64_t seed, SynthesisPath path, Window window, Exec exec) {
    if (n_sweeps < 1) throw ConfigError("n_sweeps must be >= 1");

    std::vector<std::vector<ComplexTrace>> out(static_cast<std::size_t>(n_sweeps));
    for (int s = 0; s < n_sweeps; ++s) {
        auto& per_core = out[static_cast<std::size_t>(s)];
        per_core.resize(static_cast<std::size_t>(fiber.n_cores));
        if (path == SynthesisPath::range_domain) {
            const auto ctx = build_laser_context(laser.effective_linewidth_hz(), sweep,
                                                 window, seed, s);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel && fiber.n_cores > 1)
            for (int core = 0; core < fiber.n_cores; ++core)
                per_core[static_cast<std::size_t>(core)] = synthesize_trace_direct_impl(
                    fiber, core, events, sweep, ctx, rx, window, s, seed,
                    fiber.n_cores > 1 ? Exec::serial : exec);
        } else {
            for (int core = 0; core < fiber.n_cores; ++core) {
                auto beat = synthesize_beat(fiber, core, events, sweep, laser, rx, s, seed, exec);
                per_core[static_cast<std::size_t>(core)] =
                    to_complex_trace(beat, window, fiber.params.group_index_n);
            }
        }
    }
    return out;
}

}  // namespace ofdr
