// Cell-parallel execution helper. All parallel loops in the library go through
// parallel_for so that the serial reference path and the OpenMP path share the
// same per-item kernels. Reductions are performed by the caller in fixed index
// order, which makes results independent of the thread count.

#ifndef HHO2D_PARALLEL_HPP
#define HHO2D_PARALLEL_HPP

#include <cstddef>

namespace hho2d {

/// Returns true when the library was built with OpenMP support.
bool openmp_available();

/// Number of threads a parallel region would use (1 without OpenMP).
int max_threads();

namespace detail {
void parallel_for_impl(std::size_t n, void (*body)(std::size_t, void *), void *ctx, bool parallel);
}

/// Runs fn(i) for i in [0, n). With parallel = false this is a plain serial
/// loop (the reference implementation); with parallel = true the iterations
/// are distributed over OpenMP threads. fn must not touch shared mutable
/// state except through per-index slots.
template <typename Fn> void parallel_for(std::size_t n, Fn &&fn, bool parallel = true)
{
  auto trampoline = [](std::size_t i, void *ctx) { (*static_cast<Fn *>(ctx))(i); };
  detail::parallel_for_impl(n, trampoline, &fn, parallel);
}

} // namespace hho2d

#endif
