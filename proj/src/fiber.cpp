#include "ofdr/fiber.hpp"

#include <cmath>
#include <string>

#include "ofdr/rng.hpp"

namespace ofdr {

void FiberParams::validate() const {
    if (!(length_m > 0.0))
        throw ConfigError("fiber.length_m must be > 0");
    if (!(scatterer_density_per_m > 0.0))
        throw ConfigError("fiber.scatterer_density_per_m must be > 0");
    if (!(group_index_n >= 1.3 && group_index_n <= 1.6))
        throw ConfigError("fiber.group_index_n must be in [1.3, 1.6]");
    if (!(strain_coeff_ce >= 0.0))
        throw ConfigError("fiber.strain_coeff_ce must be >= 0");
    if (!(wavelength_m > 0.0))
        throw ConfigError("fiber.wavelength_m must be > 0");
}

double VibrationEvent::displacement_at(double t_slow_s) const {
    return amplitude_m * std::sin(kTwoPi * frequency_hz * t_slow_s + phase_rad);
}

MultiCoreFiber generate_multicore_field(const FiberParams& params, int n_cores,
                                        std::uint64_t seed, double bin_spacing_m) {
    params.validate();
    if (n_cores < 1) throw ConfigError("n_cores must be >= 1");

    if (bin_spacing_m <= 0.0)
        bin_spacing_m = range_bin_spacing_m(params.group_index_n, 8e9);
    const double min_density = min_density_per_m(bin_spacing_m);
    if (params.scatterer_density_per_m < min_density)
        throw ConfigError(
            "scatterer_density_per_m=" + std::to_string(params.scatterer_density_per_m) +
            " too low: >= 10 scatterers per " + std::to_string(bin_spacing_m * 100.0) +
            " cm range bin requires >= " + std::to_string(std::ceil(min_density)) +
            " per m");

    const auto count = static_cast<std::size_t>(params.length_m * params.scatterer_density_per_m);
    if (count == 0) throw ConfigError("fiber too short for the given density");
    const double spacing = 1.0 / params.scatterer_density_per_m;

    MultiCoreFiber fiber;
    fiber.params = params;
    fiber.n_cores = n_cores;
    fiber.position_m.resize(n_cores);
    fiber.reflectivity.resize(n_cores);
    for (int core = 0; core < n_cores; ++core) {
        auto rng = Rng::substream(seed, RngDomain::fiber_core, static_cast<std::uint64_t>(core));
        auto& pos = fiber.position_m[core];
        auto& refl = fiber.reflectivity[core];
        pos.resize(count);
        refl.resize(count);
        // One scatterer per grid cell keeps the per-bin count nearly constant
        // so bin intensities stay exactly exponential.
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        for (std::size_t k = 0; k < count; ++k) {
            pos[k] = (static_cast<double>(k) + rng.uniform()) * spacing;
            refl[k] = {rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2};
        }
    }
    return fiber;
}

double vibration_phase_shift(double delta_l_m, const FiberParams& params) {
    return 4.0 * kPi * (params.group_index_n + params.strain_coeff_ce) * delta_l_m /
           params.wavelength_m;
}

std::vector<DelayEntry> effective_delays(const MultiCoreFiber& fiber, int core,
                                         std::span<const VibrationEvent> events,
                                         double t_slow_s) {
    if (core < 0 || core >= fiber.n_cores)
        throw std::out_of_range("effective_delays: core index out of range");
    for (const auto& ev : events) {
        if (ev.position_m + ev.extent_m > fiber.params.length_m)
            throw ConfigError("vibration event extends past the fiber end");
    }

    const auto& pos = fiber.position_m[core];
    const double delay_per_m = 2.0 * fiber.params.group_index_n / kSpeedOfLight;

    // Events are few; evaluate their instantaneous phase once.
    std::vector<std::pair<double, double>> steps;  // (z0, dphi)
    steps.reserve(events.size());
    for (const auto& ev : events)
        steps.emplace_back(ev.position_m,
                           vibration_phase_shift(ev.displacement_at(t_slow_s), fiber.params));

    std::vector<DelayEntry> out(pos.size());
    for (std::size_t k = 0; k < pos.size(); ++k) {
        double off = 0.0;
        for (const auto& [z0, dphi] : steps)
            if (pos[k] > z0) off += dphi;
        out[k] = {pos[k] * delay_per_m, off};
    }
    return out;
}

}  // namespace ofdr
