#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "ofdr/engine.hpp"
#include "ofdr/rng.hpp"
#include "ofdr/stats.hpp"
#include "ofdr/trace.hpp"

using namespace ofdr;

namespace {

ComplexTrace synthetic_trace(std::vector<std::complex<double>> bins, int core = 0,
                             int sweep = 0) {
    ComplexTrace t;
    t.core = core;
    t.sweep_index = sweep;
    t.bins = std::move(bins);
    t.bin_spacing_m = 0.0127636434775;
    return t;
}

std::vector<std::complex<double>> speckle_bins(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::complex<double>> bins(n);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (auto& b : bins) b = {rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2};
    return bins;
}

}  // namespace

TEST_CASE("bin spacing equals c / (2 n dF) for the default sweep") {
    SweepConfig sweep;  // 8 GHz at 160 GHz/s, 4 MHz: N = 200000 exactly
    CHECK(sweep.sample_count() == 200000);
    CHECK(sweep.effective_range_hz() == doctest::Approx(8e9));
    // Independently derived: 299792458 / (2 * 1.468 * 8e9) m.
    CHECK(std::abs(sweep.bin_spacing_m(1.468) - 0.012763643477520436) < 1e-6);
    // The rounded figure is 1.276 cm at coarse precision.
    CHECK(sweep.bin_spacing_m(1.468) == doctest::Approx(0.01276).epsilon(4e-4));
}

TEST_CASE("to_complex_trace compresses a pure tone at the mapped distance") {
    // 783.5 kHz tone at 4 MHz: expect the peak at z = f c / (2 n gamma).
    BeatRecord beat;
    beat.sample_rate_hz = 4e6;
    beat.sweep_rate_hz_per_s = 160e9;
    const std::size_t n = 200000;
    beat.samples.resize(n);
    const double f = 783475.3468014195;
    for (std::size_t t = 0; t < n; ++t)
        beat.samples[t] = std::cos(kTwoPi * f * static_cast<double>(t) / 4e6);
    auto trace = to_complex_trace(beat, Window::hanning, 1.468);
    std::size_t peak = 1;
    for (std::size_t b = 2; b < trace.bins.size(); ++b)
        if (std::norm(trace.bins[b]) > std::norm(trace.bins[peak])) peak = b;
    CHECK(std::abs(static_cast<double>(peak) * trace.bin_spacing_m - 500.0) <=
          0.5 * trace.bin_spacing_m);
    CHECK_THROWS_AS(to_complex_trace(BeatRecord{}, Window::hanning, 1.468), ConfigError);
}

TEST_CASE("intensity_average basics") {
    auto bins = speckle_bins(20000, 5);
    auto t1 = synthetic_trace(bins);

    SUBCASE("single trace: exponential contrast near 1") {
        auto avg = intensity_average(std::vector<ComplexTrace>{t1});
        CHECK(contrast(avg) == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("idempotent on duplicate copies") {
        std::vector<ComplexTrace> dup{t1, t1, t1};
        auto avg1 = intensity_average(std::vector<ComplexTrace>{t1});
        auto avg3 = intensity_average(dup);
        for (std::size_t i = 0; i < avg1.size(); ++i)
            CHECK(avg3[i] == doctest::Approx(avg1[i]));
    }
    SUBCASE("six independent cores: contrast 1/sqrt(6)") {
        std::vector<ComplexTrace> six;
        for (int c = 0; c < 6; ++c)
            six.push_back(synthetic_trace(speckle_bins(20000, 50 + c), c));
        auto avg = intensity_average(six);
        CHECK(contrast(avg) == doctest::Approx(0.4082482905).epsilon(0.10));
    }
    SUBCASE("mismatched lengths rejected") {
        std::vector<ComplexTrace> bad{t1, synthetic_trace(speckle_bins(100, 1))};
        CHECK_THROWS_AS(intensity_average(bad), ConfigError);
    }
    SUBCASE("amplitude averaging mode is available") {
        auto avg = intensity_average(std::vector<ComplexTrace>{t1}, AverageMode::amplitude);
        CHECK(avg.size() == t1.bins.size());
    }
}

TEST_CASE("two-core averaging lifts the minimum intensity by >= 7 dB") {
    FiberParams p;
    p.length_m = 500.0;
    p.scatterer_density_per_m = 800.0;
    SweepConfig sweep;
    sweep.sample_rate_hz = 2e6;
    const LaserModel no_laser{0.0, false};
    const ReceiverModel no_noise{-80.0, -55.0, false};

    std::vector<double> gains;
    for (int r = 0; r < 20; ++r) {
        auto fiber = generate_multicore_field(p, 2, 900 + static_cast<std::uint64_t>(r));
        auto series = synthesize_sweep_series(fiber, {}, sweep, no_laser, no_noise, 1,
                                              900 + static_cast<std::uint64_t>(r),
                                              SynthesisPath::range_domain, Window::hanning);
        const auto n_fiber = static_cast<std::size_t>(500.0 / series[0][0].bin_spacing_m);
        auto min_norm = [&](std::span<const ComplexTrace> traces) {
            auto avg = intensity_average(traces);
            double mean = 0.0, mn = 1e300;
            for (std::size_t b = 16; b < n_fiber; ++b) mean += avg[b];
            mean /= static_cast<double>(n_fiber - 16);
            for (std::size_t b = 16; b < n_fiber; ++b) mn = std::min(mn, avg[b] / mean);
            return mn;
        };
        const double single = min_norm({series[0].data(), 1});
        const double dual = min_norm({series[0].data(), 2});
        gains.push_back(db10(dual / single));
    }
    std::nth_element(gains.begin(), gains.begin() + 10, gains.end());
    CHECK(gains[10] >= 7.0);
}

TEST_CASE("rvs differential phase") {
    SUBCASE("uniform phase ramp: dphi = wrap(delta * g)") {
        const double delta = 0.4;
        std::vector<std::complex<double>> bins(64);
        for (std::size_t b = 0; b < bins.size(); ++b)
            bins[b] = std::polar(1.0, delta * static_cast<double>(b));
        auto dphi = rvs_differential_phase(std::vector<ComplexTrace>{synthetic_trace(bins)}, 3);
        REQUIRE(dphi.dphi.size() == 61);
        for (double v : dphi.dphi) CHECK(v == doctest::Approx(wrap_pi(delta * 3)));
    }
    SUBCASE("zero-amplitude bins contribute zero weight") {
        auto bins_a = speckle_bins(32, 7);
        auto bins_b = bins_a;
        bins_b[10] = 0.0;  // faded bin in core b only
        std::vector<ComplexTrace> both{synthetic_trace(speckle_bins(32, 9), 0),
                                       synthetic_trace(bins_b, 1)};
        std::vector<ComplexTrace> only_first{both[0]};
        auto d_both = rvs_differential_phase(both, 1);
        auto d_first = rvs_differential_phase(only_first, 1);
        // At the faded bin the second core adds nothing.
        CHECK(d_both.dphi[10] != doctest::Approx(d_first.dphi[10]).epsilon(1e-12));
        bins_b[9] = 0.0;  // now both product factors vanish for bins 9 and 10
        std::vector<ComplexTrace> zeroed{both[0], synthetic_trace(bins_b, 1)};
        auto d_zero = rvs_differential_phase(zeroed, 1);
        CHECK(d_zero.dphi[9] == doctest::Approx(d_first.dphi[9]));
        CHECK(d_zero.dphi[10] == doctest::Approx(d_first.dphi[10]));
    }
    SUBCASE("global phase invariance") {
        std::vector<ComplexTrace> traces{synthetic_trace(speckle_bins(128, 3), 0),
                                         synthetic_trace(speckle_bins(128, 4), 1)};
        auto base = rvs_differential_phase(traces, 2);
        auto rotated = traces;
        for (auto& t : rotated)
            for (auto& b : t.bins) b *= std::polar(1.0, 1.234);
        auto rot = rvs_differential_phase(rotated, 2);
        for (std::size_t i = 0; i < base.dphi.size(); ++i)
            CHECK(rot.dphi[i] == doctest::Approx(base.dphi[i]).epsilon(1e-12));
    }
    SUBCASE("per-core scaling cannot move dphi when cores agree in phase") {
        auto mags = speckle_bins(64, 11);
        std::vector<std::complex<double>> a(64), b(64);
        Rng rng(13);
        double phase = 0.0;
        for (std::size_t i = 0; i < 64; ++i) {
            phase += rng.uniform() - 0.3;
            a[i] = std::polar(std::abs(mags[i]), phase);
            b[i] = std::polar(0.5 + rng.uniform(), phase);
        }
        std::vector<ComplexTrace> traces{synthetic_trace(a, 0), synthetic_trace(b, 1)};
        auto base = rvs_differential_phase(traces, 2);
        traces[1].bins = b;
        for (auto& v : traces[1].bins) v *= 37.0;
        auto scaled = rvs_differential_phase(traces, 2);
        for (std::size_t i = 0; i < base.dphi.size(); ++i)
            CHECK(scaled.dphi[i] == doctest::Approx(base.dphi[i]).epsilon(1e-12));
    }
    SUBCASE("gauge >= length rejected") {
        CHECK_THROWS_AS(
            rvs_differential_phase(std::vector<ComplexTrace>{synthetic_trace(speckle_bins(8, 1))}, 8),
            ConfigError);
    }
}

TEST_CASE("vibration phase step appears localized at the event") {
    FiberParams p;
    p.length_m = 20.0;
    auto fiber = generate_multicore_field(p, 6, 55);
    SweepConfig sweep;
    sweep.sample_rate_hz = 1e5;
    const LaserModel no_laser{0.0, false};
    const ReceiverModel no_noise{-80.0, -55.0, false};
    VibrationEvent ev;
    ev.position_m = 10.0;
    ev.amplitude_m = 40e-9;
    ev.frequency_hz = 2.0;
    const VibrationEvent evs[] = {ev};

    auto series = synthesize_sweep_series(fiber, evs, sweep, no_laser, no_noise, 2, 6,
                                          SynthesisPath::range_domain, Window::hanning);
    const int g = 6;
    auto dphi = rvs_differential_phase(series[1], series[0], g);
    const double expect =
        vibration_phase_shift(ev.displacement_at(0.1), p) -
        vibration_phase_shift(ev.displacement_at(0.0), p);
    const double spacing = series[0][0].bin_spacing_m;
    const auto event_bin = static_cast<std::size_t>(10.0 / spacing);

    // Plateau inside the gauge interval straddling the event.
    const std::size_t probe = event_bin - g / 2;
    CHECK(dphi.dphi[probe] == doctest::Approx(expect).epsilon(0.02));
    // Far from the event (several gauge+window widths) the phase is quiet.
    CHECK(std::abs(dphi.dphi[event_bin - 40]) < 0.05 * std::abs(expect));
    CHECK(std::abs(dphi.dphi[event_bin + 40]) < 0.05 * std::abs(expect));
}

TEST_CASE("count_phase_jumps canonical vectors") {
    CHECK(count_phase_jumps(std::vector<double>{0.5, 0.5, 0.5}) == 0);
    CHECK(count_phase_jumps(std::vector<double>{0.0, kPi - 1e-3}) == 0);
    CHECK(count_phase_jumps(std::vector<double>{0.0, kPi + 1e-3}) == 1);
    CHECK(count_phase_jumps(std::vector<double>{kPi / 2, -kPi / 2, kPi / 2, -kPi / 2}) == 0);
    // A full-scale flip between values near +/- pi.
    CHECK(count_phase_jumps(std::vector<double>{3.1, -3.1, 3.1}) == 2);
    CHECK(count_phase_jumps(std::vector<double>{0.1}) == 0);
}

TEST_CASE("jump count is superadditive under concatenation") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(50), b(50);
        for (auto& v : a) v = wrap_pi((rng.uniform() - 0.5) * 2.0 * kPi);
        for (auto& v : b) v = wrap_pi((rng.uniform() - 0.5) * 2.0 * kPi);
        std::vector<double> ab(a);
        ab.insert(ab.end(), b.begin(), b.end());
        CHECK(count_phase_jumps(ab) >= count_phase_jumps(a) + count_phase_jumps(b));
    }
}

TEST_CASE("slow-time unwrapping") {
    SUBCASE("already-smooth input unchanged") {
        auto out = unwrap_slow_time(std::vector<double>{0.0, 0.1, 0.2});
        CHECK(out == std::vector<double>{0.0, 0.1, 0.2});
    }
    SUBCASE("0.9 pi per step ramp recovered exactly") {
        std::vector<double> wrapped(10);
        for (int i = 0; i < 10; ++i) wrapped[i] = wrap_pi(0.9 * kPi * i);
        auto out = unwrap_slow_time(wrapped);
        for (int i = 0; i < 10; ++i)
            CHECK(out[i] == doctest::Approx(0.9 * kPi * i).epsilon(1e-12));
    }
    SUBCASE("1.1 pi per step aliases (documented slew limit)") {
        std::vector<double> wrapped(10);
        for (int i = 0; i < 10; ++i) wrapped[i] = wrap_pi(1.1 * kPi * i);
        auto out = unwrap_slow_time(wrapped);
        // Steps of 1.1 pi wrap to -0.9 pi: the ramp is recovered with the
        // wrong sign, so the slope underestimates the truth.
        CHECK(out.back() < 0.0);
    }
}
