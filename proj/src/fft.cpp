#include "ofdr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace ofdr::fft {

namespace {

enum class Kind { r2c, c2c_fwd, c2c_bwd };

struct PlanCache {
    std::mutex mu;
    std::map<std::pair<Kind, std::size_t>, fftw_plan> plans;

    fftw_plan get(Kind kind, std::size_t n) {
        std::scoped_lock lock(mu);
        auto key = std::make_pair(kind, n);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;

        // Dummy buffers only shape the plan; FFTW_UNALIGNED lets the plan
        // execute on any caller array.
        fftw_plan p = nullptr;
        if (kind == Kind::r2c) {
            std::vector<double> in(n);
            std::vector<std::complex<double>> out(n / 2 + 1);
            p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        } else {
            std::vector<std::complex<double>> buf(n);
            p = fftw_plan_dft_1d(static_cast<int>(n),
                                 reinterpret_cast<fftw_complex*>(buf.data()),
                                 reinterpret_cast<fftw_complex*>(buf.data()),
                                 kind == Kind::c2c_fwd ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("rfft: empty input");
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan p = cache().get(Kind::r2c, n);
    // r2c with FFTW_UNALIGNED still may clobber input for in-place; we pass
    // a copy to keep the caller's buffer intact.
    std::vector<double> in(x.begin(), x.end());
    fftw_execute_dft_r2c(p, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    fftw_plan p = cache().get(inverse ? Kind::c2c_bwd : Kind::c2c_fwd, x.size());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(x.data()),
                     reinterpret_cast<fftw_complex*>(x.data()));
}

std::vector<std::complex<double>> circular_convolve(
    std::span<const std::complex<double>> a,
    std::span<const std::complex<double>> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("circular_convolve: size mismatch");
    std::vector<std::complex<double>> fa(a.begin(), a.end());
    std::vector<std::complex<double>> fb(b.begin(), b.end());
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i] * scale;
    fft_inplace(fa, true);
    return fa;
}

}  // namespace ofdr::fft
