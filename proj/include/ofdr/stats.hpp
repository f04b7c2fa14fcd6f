#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ofdr/types.hpp"

namespace ofdr {

struct IntensityStats {
    std::vector<double> edges;          // n_bins + 1 histogram edges
    std::vector<double> probabilities;  // sum to 1 +/- 1e-9
    double contrast = 0.0;              // std / mean
    std::size_t n_samples = 0;
    std::vector<double> sorted_normalized;  // mean-normalized samples, ascending

    /// Empirical CDF of the mean-normalized intensity.
    double cdf(double x) const;
};

/// Histogram/CDF/contrast of mean-normalized intensities. Needs >= 1000
/// samples.
IntensityStats intensity_statistics(std::span<const double> intensities,
                                    std::size_t n_bins = 100);

/// std / mean of a sample; scale-invariant.
double contrast(std::span<const double> values);

/// P(mean of N i.i.d. Exp(1) < t): the regularized lower incomplete gamma
/// gamma(N, N t)/Gamma(N), evaluated exactly for integer N via the Poisson
/// series. Analytic reference for the Monte Carlo fading statistics.
double gamma_fading_oracle(int n_cores, double threshold);

/// Contrast of the N-core averaged intensity for each requested N, using
/// the first N of the supplied per-core intensity arrays.
std::vector<std::pair<int, double>> contrast_vs_cores(
    std::span<const std::vector<double>> per_core_intensity,
    std::span<const int> core_counts);

struct PhaseVarianceBlock {
    double start_m = 0.0;
    double variance_rad2 = 0.0;
    double saturated_fraction = 0.0;
};

/// Across-sweep differential-phase variance per distance block. Per bin,
/// the circular resultant R over sweeps maps to the small-angle variance
/// 2(1-R) when R > 0.9; bins at or below that resultant are saturated and
/// enter the block mean at the uniform-phase variance pi^2/3. Block value =
/// mean over its bins.
std::vector<PhaseVarianceBlock> phase_variance_profile(
    std::span<const DifferentialPhaseTrace> per_sweep, double block_length_m);

/// One-sided Mann-Kendall p-value for an increasing trend.
double mann_kendall_increasing_pvalue(std::span<const double> values);

/// Kolmogorov-Smirnov statistic of mean-normalized samples against the
/// Exp(1) CDF.
double ks_statistic_exponential(std::span<const double> samples);

/// Large-sample KS critical value at significance alpha (0.01 or 0.05).
double ks_critical_value(std::size_t n, double alpha);

}  // namespace ofdr
