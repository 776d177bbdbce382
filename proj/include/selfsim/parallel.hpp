#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace selfsim {

// 0 = all available threads.
inline int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

// out[i] = fn(i). Each index is computed independently, so the result does not
// depend on the thread count; threads == 1 takes the plain serial loop.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& fn) {
    std::vector<T> out(count);
    int nt = resolve_threads(threads);
    if (nt <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::int64_t n = static_cast<std::int64_t>(count);
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for num_threads(nt) schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        try {
            out[k] = fn(k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace selfsim
