#include "ofdr/window.hpp"

#include <cmath>

namespace ofdr {

Window window_from_string(const std::string& s) {
    if (s == "rectangular" || s == "rect") return Window::rectangular;
    if (s == "hanning" || s == "hann") return Window::hanning;
    throw ConfigError("unknown window '" + s + "' (expected rectangular|hanning)");
}

std::string to_string(Window w) {
    return w == Window::rectangular ? "rectangular" : "hanning";
}

std::vector<double> window_samples(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == Window::hanning) {
        for (std::size_t t = 0; t < n; ++t)
            out[t] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(t) / static_cast<double>(n));
    }
    return out;
}

double window_sum(Window w, std::size_t n) {
    return w == Window::rectangular ? static_cast<double>(n)
                                    : 0.5 * static_cast<double>(n);
}

double window_enbw(Window w) {
    return w == Window::rectangular ? 1.0 : 1.5;
}

std::complex<double> dirichlet_kernel(double x, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double den = std::sin(kPi * x / nn);
    if (std::abs(den) < 1e-300) {
        // x at a multiple of n: full coherent sum.
        return {nn, 0.0};
    }
    const double mag = std::sin(kPi * x) / den;
    const double ph = -kPi * x * (nn - 1.0) / nn;
    return std::polar(mag, ph);
}

std::complex<double> window_kernel(Window w, double x, std::size_t n) {
    if (w == Window::rectangular) return dirichlet_kernel(x, n);
    return 0.5 * dirichlet_kernel(x, n) - 0.25 * dirichlet_kernel(x - 1.0, n) -
           0.25 * dirichlet_kernel(x + 1.0, n);
}

namespace {
double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}
}  // namespace

double window_amplitude_response(Window w, double x) {
    if (w == Window::rectangular) return std::abs(sinc(x));
    return std::abs(0.5 * sinc(x) + 0.25 * sinc(x - 1.0) + 0.25 * sinc(x + 1.0)) / 0.5;
}

}  // namespace ofdr
