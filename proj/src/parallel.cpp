#include "hho2d/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hho2d {

bool openmp_available()
{
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads()
{
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {

void parallel_for_impl(std::size_t n, void (*body)(std::size_t, void *), void *ctx, bool parallel)
{
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i), ctx);
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < n; ++i) {
    body(i, ctx);
  }
}

} // namespace detail
} // namespace hho2d
