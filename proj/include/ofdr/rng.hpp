#pragma once

#include <cstdint>
#include <random>

namespace ofdr {

/// RNG stream domains. Every random quantity in the simulator draws from a
/// substream derived from (master seed, domain, a, b), so results are
/// reproducible and independent across cores, sweeps, and realizations
/// no matter how the work is scheduled.
enum class RngDomain : std::uint64_t {
    fiber_core = 1,      // a = core index
    laser_path = 2,      // a = sweep index (shared by all cores of a sweep)
    receiver_noise = 3,  // a = core, b = sweep
    monte_carlo = 4,     // a = realization index
};

namespace detail {
// SplitMix64 step; used only to mix seeds, not as the stream generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic substream seed derivation (documented splitting function):
/// chain SplitMix64 over the master seed and the stream coordinates.
inline std::uint64_t derive_seed(std::uint64_t master, RngDomain domain,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = detail::splitmix64(s);
    s ^= static_cast<std::uint64_t>(domain) * 0xD6E8FEB86659FD93ULL;
    h ^= detail::splitmix64(s);
    s ^= a * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL;
    h ^= detail::splitmix64(s);
    s ^= b * 0x27D4EB2F165667C5ULL + 0x9E3779B97F4A7C15ULL;
    h ^= detail::splitmix64(s);
    return h;
}

/// mt19937_64 stream with explicit, implementation-independent uniform and
/// normal draws (the std distributions are not pinned by the standard).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t master, RngDomain domain,
                         std::uint64_t a = 0, std::uint64_t b = 0) {
        return Rng(derive_seed(master, domain, a, b));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; never zero, safe under log().
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = kTwoPiLocal * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double kTwoPiLocal = 6.283185307179586476925286766559;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ofdr
