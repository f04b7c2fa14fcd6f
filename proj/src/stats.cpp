#include "ofdr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "ofdr/common.hpp"

namespace ofdr {

double IntensityStats::cdf(double x) const {
    const auto it = std::upper_bound(sorted_normalized.begin(), sorted_normalized.end(), x);
    return static_cast<double>(it - sorted_normalized.begin()) /
           static_cast<double>(sorted_normalized.size());
}

double contrast(std::span<const double> values) {
    if (values.empty()) throw ConfigError("contrast: empty input");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n;
    return std::sqrt(var) / mean;
}

IntensityStats intensity_statistics(std::span<const double> intensities,
                                    std::size_t n_bins) {
    if (intensities.size() < 1000)
        throw ConfigError("intensity_statistics: needs >= 1000 samples");
    if (n_bins < 2) throw ConfigError("intensity_statistics: n_bins must be >= 2");

    IntensityStats stats;
    stats.n_samples = intensities.size();
    double mean = 0.0;
    for (double v : intensities) mean += v;
    mean /= static_cast<double>(intensities.size());
    if (!(mean > 0.0)) throw ConfigError("intensity_statistics: non-positive mean");

    stats.sorted_normalized.resize(intensities.size());
    for (std::size_t i = 0; i < intensities.size(); ++i)
        stats.sorted_normalized[i] = intensities[i] / mean;
    std::sort(stats.sorted_normalized.begin(), stats.sorted_normalized.end());

    stats.contrast = contrast(intensities);

    const double hi = stats.sorted_normalized.back();
    stats.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        stats.edges[i] = hi * static_cast<double>(i) / static_cast<double>(n_bins);
    stats.probabilities.assign(n_bins, 0.0);
    const double w = 1.0 / static_cast<double>(intensities.size());
    for (double v : stats.sorted_normalized) {
        auto b = static_cast<std::size_t>(v / hi * static_cast<double>(n_bins));
        if (b >= n_bins) b = n_bins - 1;
        stats.probabilities[b] += w;
    }
    return stats;
}

double gamma_fading_oracle(int n_cores, double threshold) {
    if (n_cores < 1) throw ConfigError("gamma_fading_oracle: n_cores must be >= 1");
    if (!(threshold > 0.0)) throw ConfigError("gamma_fading_oracle: threshold must be > 0");
    // P(Gamma(N, 1) < N t) = 1 - exp(-N t) sum_{k<N} (N t)^k / k!
    const double x = static_cast<double>(n_cores) * threshold;
    double term = 1.0;  // x^0 / 0!
    double sum = 1.0;
    for (int k = 1; k < n_cores; ++k) {
        term *= x / static_cast<double>(k);
        sum += term;
    }
    return 1.0 - std::exp(-x) * sum;
}

std::vector<std::pair<int, double>> contrast_vs_cores(
    std::span<const std::vector<double>> per_core_intensity,
    std::span<const int> core_counts) {
    if (per_core_intensity.empty()) throw ConfigError("contrast_vs_cores: no intensities");
    const std::size_t len = per_core_intensity.front().size();
    for (const auto& v : per_core_intensity)
        if (v.size() != len) throw ConfigError("contrast_vs_cores: length mismatch");

    std::vector<std::pair<int, double>> out;
    out.reserve(core_counts.size());
    for (int n : core_counts) {
        if (n < 1 || static_cast<std::size_t>(n) > per_core_intensity.size())
            throw ConfigError("contrast_vs_cores: requested " + std::to_string(n) +
                              " cores but only " +
                              std::to_string(per_core_intensity.size()) + " simulated");
        std::vector<double> avg(len, 0.0);
        for (int c = 0; c < n; ++c) {
            const auto& src = per_core_intensity[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < len; ++i) avg[i] += src[i];
        }
        for (auto& v : avg) v /= static_cast<double>(n);
        out.emplace_back(n, contrast(avg));
    }
    return out;
}

std::vector<PhaseVarianceBlock> phase_variance_profile(
    std::span<const DifferentialPhaseTrace> per_sweep, double block_length_m) {
    if (per_sweep.size() < 2)
        throw ConfigError("phase_variance_profile: needs >= 2 sweeps");
    const std::size_t len = per_sweep.front().dphi.size();
    const double spacing = per_sweep.front().bin_spacing_m;
    for (const auto& t : per_sweep)
        if (t.dphi.size() != len)
            throw ConfigError("phase_variance_profile: ragged dphi traces");

    const auto block_bins = static_cast<std::size_t>(block_length_m / spacing);
    if (block_bins < 10)
        throw ConfigError("phase_variance_profile: block length must span >= 10 bins");
    if (block_bins > len)
        throw ConfigError("phase_variance_profile: block longer than trace");

    const double n_sweeps = static_cast<double>(per_sweep.size());
    const double saturated_var = kPi * kPi / 3.0;

    std::vector<PhaseVarianceBlock> blocks;
    for (std::size_t start = 0; start + block_bins <= len; start += block_bins) {
        PhaseVarianceBlock blk;
        blk.start_m = static_cast<double>(start) * spacing;
        double sum = 0.0;
        std::size_t saturated = 0;
        for (std::size_t b = start; b < start + block_bins; ++b) {
            std::complex<double> resultant{0.0, 0.0};
            for (const auto& t : per_sweep)
                resultant += std::polar(1.0, t.dphi[b]);
            const double r = std::abs(resultant) / n_sweeps;
            if (r > 0.9) {
                sum += 2.0 * (1.0 - r);
            } else {
                sum += saturated_var;
                ++saturated;
            }
        }
        blk.variance_rad2 = sum / static_cast<double>(block_bins);
        blk.saturated_fraction =
            static_cast<double>(saturated) / static_cast<double>(block_bins);
        blocks.push_back(blk);
    }
    return blocks;
}

double mann_kendall_increasing_pvalue(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) throw ConfigError("mann_kendall: needs >= 3 values");
    long s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (values[j] > values[i]) ++s;
            else if (values[j] < values[i]) --s;
        }
    const double nn = static_cast<double>(n);
    const double var = nn * (nn - 1.0) * (2.0 * nn + 5.0) / 18.0;
    double z = 0.0;
    if (s > 0) z = (static_cast<double>(s) - 1.0) / std::sqrt(var);
    else if (s < 0) z = (static_cast<double>(s) + 1.0) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double ks_statistic_exponential(std::span<const double> samples) {
    if (samples.empty()) throw ConfigError("ks_statistic: empty input");
    std::vector<double> s(samples.begin(), samples.end());
    double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    for (auto& v : s) v /= mean;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = 1.0 - std::exp(-s[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(f - lo, hi - f));
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha) {
    double c;
    if (alpha <= 0.01) c = 1.62762;
    else if (alpha <= 0.05) c = 1.35810;
    else c = 1.22385;
    return c / std::sqrt(static_cast<double>(n));
}

}  // namespace ofdr
