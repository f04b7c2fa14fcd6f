#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ofdr {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wrap an angle into (-pi, pi].
inline double wrap_pi(double x) {
    x = std::remainder(x, kTwoPi);  // (-pi, pi], except -pi maps to -pi
    if (x <= -kPi) x += kTwoPi;
    return x;
}

inline double db10(double ratio) { return 10.0 * std::log10(ratio); }
inline double undb10(double db) { return std::pow(10.0, db / 10.0); }

/// Invalid parameters or malformed configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Estimated resource usage above the configured cap. CLI exit code 3.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal invariant violation. CLI exit code 4.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace ofdr
