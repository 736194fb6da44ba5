#ifndef ELASTFEM_PARALLEL_HPP
#define ELASTFEM_PARALLEL_HPP

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace elastfem {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
}

// Deterministic parallel reduction: items are summed inside fixed-size
// blocks sequentially and block partials are combined in block order, so
// the result does not depend on the number of threads.
template <class F>
double block_sum(std::size_t n, F&& term) {
    constexpr std::size_t block = 1024;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace elastfem

#endif
