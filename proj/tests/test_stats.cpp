#include <doctest.h>

#include <cmath>
#include <vector>

#include "ofdr/rng.hpp"
#include "ofdr/stats.hpp"

using namespace ofdr;

namespace {
std::vector<double> exp_samples(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = -std::log(rng.uniform_pos());
    return out;
}
}  // namespace

TEST_CASE("gamma fading oracle matches analytic values") {
    CHECK(gamma_fading_oracle(1, 0.1) == doctest::Approx(0.09516258196).epsilon(1e-9));
    CHECK(gamma_fading_oracle(2, 0.1) == doctest::Approx(0.01752309631).epsilon(1e-9));
    CHECK(gamma_fading_oracle(4, 0.1) == doctest::Approx(7.762513762e-4).epsilon(1e-9));
    CHECK(gamma_fading_oracle(6, 0.1) == doctest::Approx(3.885607815e-5).epsilon(1e-9));
    CHECK_THROWS_AS(gamma_fading_oracle(0, 0.1), ConfigError);
    CHECK_THROWS_AS(gamma_fading_oracle(1, 0.0), ConfigError);
}

TEST_CASE("gamma fading oracle agrees with brute-force Monte Carlo") {
    // Independent check: sample means of N Exp(1) draws directly.
    Rng rng(1234);
    const int n_mc = 400000;
    for (int n_cores : {1, 2, 4}) {
        std::size_t below = 0;
        for (int i = 0; i < n_mc; ++i) {
            double acc = 0.0;
            for (int c = 0; c < n_cores; ++c) acc += -std::log(rng.uniform_pos());
            if (acc / n_cores < 0.1) ++below;
        }
        const double p_mc = static_cast<double>(below) / n_mc;
        const double p = gamma_fading_oracle(n_cores, 0.1);
        const double se = std::sqrt(p * (1.0 - p) / n_mc);
        CHECK(std::abs(p_mc - p) < 3.0 * se + 1e-12);
    }
}

TEST_CASE("fading probability is non-increasing in core count") {
    for (int n = 1; n < 6; ++n)
        CHECK(gamma_fading_oracle(n + 1, 0.1) < gamma_fading_oracle(n, 0.1));
}

TEST_CASE("intensity statistics") {
    SUBCASE("constant input: zero contrast, step CDF") {
        std::vector<double> flat(2000, 3.5);
        auto stats = intensity_statistics(flat);
        CHECK(stats.contrast == 0.0);
        CHECK(stats.cdf(0.999) == 0.0);
        CHECK(stats.cdf(1.001) == 1.0);
    }
    SUBCASE("exponential speckle: contrast 1 and the -20 dB point") {
        auto samples = exp_samples(100000, 9);
        auto stats = intensity_statistics(samples);
        CHECK(stats.contrast == doctest::Approx(1.0).epsilon(0.02));
        CHECK(stats.cdf(0.1) == doctest::Approx(0.09516).epsilon(0.05));
        double mass = 0.0;
        for (double p : stats.probabilities) mass += p;
        CHECK(std::abs(mass - 1.0) < 1e-9);
    }
    SUBCASE("too few samples rejected") {
        std::vector<double> tiny(10, 1.0);
        CHECK_THROWS_AS(intensity_statistics(tiny), ConfigError);
    }
}

TEST_CASE("contrast is exactly scale invariant") {
    auto samples = exp_samples(5000, 10);
    const double base = contrast(samples);
    for (auto& v : samples) v *= 4.0;  // power-of-two scale: bitwise-safe
    CHECK(contrast(samples) == base);
}

TEST_CASE("contrast_vs_cores follows 1/sqrt(N)") {
    std::vector<std::vector<double>> per_core;
    for (int c = 0; c < 6; ++c) per_core.push_back(exp_samples(60000, 30 + c));
    const int counts[] = {1, 2, 3, 4, 5, 6};
    auto table = contrast_vs_cores(per_core, counts);
    for (const auto& [n, c] : table) {
        CHECK(c == doctest::Approx(1.0 / std::sqrt(n)).epsilon(0.10));
    }
    for (std::size_t i = 1; i < table.size(); ++i)
        CHECK(table[i].second < table[i - 1].second);
    const int too_many[] = {7};
    CHECK_THROWS_AS(contrast_vs_cores(per_core, too_many), ConfigError);
}

TEST_CASE("phase variance profile") {
    const double spacing = 0.0127636434775;
    auto make = [&](std::vector<double> v, int sweep) {
        DifferentialPhaseTrace t;
        t.dphi = std::move(v);
        t.gauge_bins = 2;
        t.bin_spacing_m = spacing;
        t.sweep_index = sweep;
        return t;
    };
    SUBCASE("noiseless repeated sweeps: variance ~ 0") {
        std::vector<double> pattern(800);
        Rng rng(3);
        for (auto& v : pattern) v = (rng.uniform() - 0.5) * 3.0;
        std::vector<DifferentialPhaseTrace> sweeps;
        for (int s = 0; s < 6; ++s) sweeps.push_back(make(pattern, s));
        auto profile = phase_variance_profile(sweeps, 100 * spacing);
        REQUIRE(profile.size() == 8);
        for (const auto& blk : profile) {
            CHECK(blk.variance_rad2 < 1e-4);
            CHECK(blk.saturated_fraction == 0.0);
        }
    }
    SUBCASE("uniform random phases saturate at pi^2/3") {
        Rng rng(4);
        std::vector<DifferentialPhaseTrace> sweeps;
        for (int s = 0; s < 16; ++s) {
            std::vector<double> v(400);
            for (auto& x : v) x = (rng.uniform() - 0.5) * kTwoPi;
            sweeps.push_back(make(std::move(v), s));
        }
        auto profile = phase_variance_profile(sweeps, 100 * spacing);
        for (const auto& blk : profile) {
            CHECK(blk.variance_rad2 == doctest::Approx(kPi * kPi / 3.0).epsilon(0.15));
            CHECK(blk.saturated_fraction > 0.9);
        }
    }
    SUBCASE("block length limits") {
        std::vector<DifferentialPhaseTrace> sweeps{make(std::vector<double>(50, 0.0), 0),
                                                   make(std::vector<double>(50, 0.0), 1)};
        CHECK_THROWS_AS(phase_variance_profile(sweeps, 5 * spacing), ConfigError);
        CHECK_THROWS_AS(phase_variance_profile(sweeps, 100 * spacing), ConfigError);
    }
}

TEST_CASE("Mann-Kendall trend test") {
    std::vector<double> rising(12), flat(12), falling(12);
    Rng rng(8);
    for (int i = 0; i < 12; ++i) {
        rising[i] = i + 0.1 * rng.normal();
        flat[i] = rng.normal();
        falling[i] = -i + 0.1 * rng.normal();
    }
    CHECK(mann_kendall_increasing_pvalue(rising) < 0.01);
    CHECK(mann_kendall_increasing_pvalue(flat) > 0.05);
    CHECK(mann_kendall_increasing_pvalue(falling) > 0.99);
}

TEST_CASE("KS statistic separates exponential from uniform") {
    auto good = exp_samples(20000, 44);
    CHECK(ks_statistic_exponential(good) < ks_critical_value(good.size(), 0.01));
    Rng rng(45);
    std::vector<double> uniform(20000);
    for (auto& v : uniform) v = rng.uniform();
    CHECK(ks_statistic_exponential(uniform) > ks_critical_value(uniform.size(), 0.01));
}
