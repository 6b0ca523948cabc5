#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roundtable {

/// Every data-parallel kernel takes one of these. Serial is the reference
/// path the parallel one is tested against; both produce identical results.
enum class Execution { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Calls body(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown after the loop.
template <typename Body>
void for_each_index(Execution exec, std::size_t n, const Body& body) {
    if (exec == Execution::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace roundtable
