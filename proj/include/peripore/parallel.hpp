// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file parallel.hpp
/// \brief Point-parallel loop with exception capture. Iterations must write disjoint data.

#ifndef PERIPORE_PARALLEL_HPP
#define PERIPORE_PARALLEL_HPP

#include <exception>
#include <mutex>

#include "peripore/core.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace peripore {

inline void set_thread_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs fn(i) for i in [0, n). The exception from the lowest failing index is rethrown,
/// so error reporting does not depend on scheduling.
template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
    std::exception_ptr err;
    Index err_index = n;
    std::mutex m;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i) {
        try {
            fn(Index(i));
        } catch (...) {
            std::lock_guard<std::mutex> lk(m);
            if (Index(i) < err_index) {
                err_index = Index(i);
                err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace peripore

#endif  // PERIPORE_PARALLEL_HPP
