#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace quermass {

// Runs fn(i) for i in [0, n).  With parallel=true the iterations are spread
// over OpenMP threads; fn must only write to per-index slots so that results
// are identical to the serial path regardless of scheduling or thread count.
template <class F>
void parallel_for(std::size_t n, bool parallel, F&& fn) {
#ifdef _OPENMP
  if (parallel) {
    #pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      fn(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace quermass
