#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ofdr {

/// Kernel execution policy. Every parallel kernel has a serial reference
/// twin producing bit-identical output (per-element accumulation order is
/// fixed), so `serial` doubles as the correctness baseline in tests and
/// benchmarks.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_max_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace ofdr
