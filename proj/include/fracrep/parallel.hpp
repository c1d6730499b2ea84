#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fracrep {

/// Sets the worker count used by the node- and mode-parallel loops.
/// 0 selects the runtime default.
inline void set_thread_count(int threads) {
#if defined(_OPENMP)
    if (threads > 0) {
        omp_set_num_threads(threads);
    } else {
        omp_set_num_threads(omp_get_num_procs());
    }
#else
    (void)threads;
#endif
}

[[nodiscard]] inline int thread_count() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#if defined(_OPENMP)
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) {
        body(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
#endif
}

}  // namespace fracrep
