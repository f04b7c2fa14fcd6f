#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ofdr/demod.hpp"
#include "ofdr/engine.hpp"
#include "ofdr/trace.hpp"

using namespace ofdr;

namespace {

const LaserModel kNoLaser{0.0, false};
const ReceiverModel kNoNoise{-80.0, -55.0, false};

struct Setup {
    MultiCoreFiber fiber;
    SweepConfig sweep;
    std::vector<std::vector<ComplexTrace>> sweeps;
};

Setup vibrated_setup(std::vector<VibrationEvent> events, int n_sweeps,
                     std::uint64_t seed, int n_cores = 6, double length = 20.0,
                     bool noise = false) {
    Setup s;
    FiberParams p;
    p.length_m = length;
    s.fiber = generate_multicore_field(p, n_cores, seed);
    s.sweep.sample_rate_hz = length <= 20.0 ? 1e5 : 4e5;
    s.sweeps = synthesize_sweep_series(s.fiber, events, s.sweep,
                                       noise ? LaserModel{} : kNoLaser,
                                       noise ? ReceiverModel{} : kNoNoise, n_sweeps,
                                       seed, SynthesisPath::range_domain, Window::hanning);
    return s;
}

std::vector<DifferentialPhaseTrace> rotated_dphi(const Setup& s, int gauge) {
    std::vector<DifferentialPhaseTrace> out;
    for (const auto& per_core : s.sweeps)
        out.push_back(rvs_differential_phase(per_core, s.sweeps.front(), gauge));
    return out;
}

VibrationEvent make_event(double pos, double amp, double freq, double phase = 0.0) {
    VibrationEvent ev;
    ev.position_m = pos;
    ev.amplitude_m = amp;
    ev.frequency_hz = freq;
    ev.phase_rad = phase;
    return ev;
}

}  // namespace

TEST_CASE("quiescent noiseless map is near zero and yields no events") {
    auto s = vibrated_setup({}, 8, 61);
    auto map = time_distance_map(rotated_dphi(s, 2));
    double peak = 0.0;
    for (double v : map.values) peak = std::max(peak, std::abs(v));
    CHECK(peak < 1e-9);
    CHECK(locate_events(map, 5.0).empty());
}

TEST_CASE("two events are localized within one resolution cell") {
    auto s = vibrated_setup({make_event(1.46, 60e-9, 2.0), make_event(19.0, 60e-9, 2.0, 1.0)},
                            20, 62, 6, 20.0, true);
    auto map = time_distance_map(rotated_dphi(s, 2));
    auto events = locate_events(map, 5.0);
    REQUIRE(events.size() == 2);
    CHECK(std::abs(events[0].location_m - 1.46) < 0.02);
    CHECK(std::abs(events[1].location_m - 19.0) < 0.02);
}

TEST_CASE("column response is linear in drive amplitude") {
    const double a1 = 30e-9, a2 = 60e-9;
    auto s1 = vibrated_setup({make_event(10.0, a1, 2.0)}, 12, 63);
    auto s2 = vibrated_setup({make_event(10.0, a2, 2.0)}, 12, 63);
    auto m1 = time_distance_map(rotated_dphi(s1, 2));
    auto m2 = time_distance_map(rotated_dphi(s2, 2));
    auto col_pp = [&](const TimeDistanceMap& m) {
        double best = 0.0;
        for (std::size_t b = 0; b < m.n_bins; ++b) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t sw = 0; sw < m.n_sweeps; ++sw) {
                lo = std::min(lo, m.row(sw)[b]);
                hi = std::max(hi, m.row(sw)[b]);
            }
            best = std::max(best, hi - lo);
        }
        return best;
    };
    CHECK(col_pp(m2) / col_pp(m1) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("localization is invariant to a constant phase on all sweeps") {
    auto s = vibrated_setup({make_event(10.0, 60e-9, 2.0)}, 12, 64);
    auto dphi = rotated_dphi(s, 2);
    auto map = time_distance_map(dphi);
    auto base = locate_events(map, 5.0);
    for (auto& t : dphi)
        for (auto& v : t.dphi) v = wrap_pi(v + 0.4);
    auto shifted_map = time_distance_map(dphi);
    auto shifted = locate_events(shifted_map, 5.0);
    REQUIRE(base.size() == shifted.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(base[i].location_m == doctest::Approx(shifted[i].location_m));
}

TEST_CASE("demodulation recovers frequency, amplitude, and waveform") {
    const double amp = 60e-9;
    auto s = vibrated_setup({make_event(10.0, amp, 2.0)}, 50, 65);
    auto res = demodulate(s.sweeps, 10.0, 6, s.fiber.params);

    // 2 Hz drive at 10 Hz slow rate over 5 s: exact-bin tone.
    CHECK(res.peak_frequency_hz == doctest::Approx(2.0).epsilon(0.025));
    const double expect_amp = vibration_phase_shift(amp, s.fiber.params);
    CHECK(res.amplitude_rad == doctest::Approx(expect_amp).epsilon(0.01));

    // Waveform matches the applied phase to < 1% RMS (both demeaned; the
    // rotation reference pins sweep 0 to zero).
    double rms_err = 0.0, rms_ref = 0.0, mean_w = 0.0, mean_a = 0.0;
    std::vector<double> applied(res.waveform_rad.size());
    for (std::size_t i = 0; i < applied.size(); ++i) {
        const double t = res.time_s[i];
        applied[i] = vibration_phase_shift(amp * std::sin(kTwoPi * 2.0 * t), s.fiber.params);
        mean_w += res.waveform_rad[i];
        mean_a += applied[i];
    }
    mean_w /= static_cast<double>(applied.size());
    mean_a /= static_cast<double>(applied.size());
    for (std::size_t i = 0; i < applied.size(); ++i) {
        const double w = res.waveform_rad[i] - mean_w;
        const double a = applied[i] - mean_a;
        rms_err += (w - a) * (w - a);
        rms_ref += a * a;
    }
    CHECK(std::sqrt(rms_err / rms_ref) < 0.01);
    CHECK(res.snr_db > 30.0);
    CHECK(res.sensitivity_m > 0.0);
}

TEST_CASE("sensitivity conversion reproduces the 2.2 nm figure") {
    FiberParams p;  // lambda 1550 nm, n 1.468, Ce 0.78
    const double dphi_floor = 0.040;
    const double dl = p.wavelength_m * dphi_floor /
                      (4.0 * kPi * (p.group_index_n + p.strain_coeff_ce));
    CHECK(dl == doctest::Approx(2.2e-9).epsilon(0.01));
    // Round trip through the forward formula.
    CHECK(vibration_phase_shift(dl, p) == doctest::Approx(dphi_floor).epsilon(1e-12));
}

TEST_CASE("demodulation frequency is invariant to core permutation") {
    auto s = vibrated_setup({make_event(10.0, 50e-9, 2.0)}, 16, 67);
    auto res = demodulate(s.sweeps, 10.0, 6, s.fiber.params);
    auto permuted = s.sweeps;
    for (auto& per_core : permuted) {
        std::reverse(per_core.begin(), per_core.end());
        for (std::size_t c = 0; c < per_core.size(); ++c)
            per_core[c].core = static_cast<int>(c);
    }
    auto res2 = demodulate(permuted, 10.0, 6, s.fiber.params);
    CHECK(res.peak_frequency_hz == doctest::Approx(res2.peak_frequency_hz));
    CHECK(res.amplitude_rad == doctest::Approx(res2.amplitude_rad).epsilon(1e-9));
}

TEST_CASE("a drive at the slow-time rate aliases to nothing (negative control)") {
    // 10 Hz drive sampled at 10 Hz lands at DC; 2 Hz is the positive control.
    auto aliased = vibrated_setup({make_event(10.0, 50e-9, 10.0)}, 40, 68);
    auto res = demodulate(aliased.sweeps, 10.0, 6, aliased.fiber.params);
    auto good = vibrated_setup({make_event(10.0, 50e-9, 2.0)}, 40, 68);
    auto ref = demodulate(good.sweeps, 10.0, 6, good.fiber.params);
    CHECK(res.amplitude_rad < 0.02 * ref.amplitude_rad);
}

TEST_CASE("demodulate validates inputs") {
    auto s = vibrated_setup({make_event(10.0, 50e-9, 2.0)}, 12, 69);
    CHECK_THROWS_AS(demodulate(s.sweeps, 25.0, 2, s.fiber.params), ConfigError);
    std::vector<std::vector<ComplexTrace>> few(s.sweeps.begin(), s.sweeps.begin() + 4);
    CHECK_THROWS_AS(demodulate(few, 10.0, 2, s.fiber.params), ConfigError);
}

TEST_CASE("ragged map input is rejected") {
    auto s = vibrated_setup({}, 4, 70);
    auto dphi = rotated_dphi(s, 2);
    dphi[1].dphi.pop_back();
    CHECK_THROWS_AS(time_distance_map(dphi), ConfigError);
}
