#pragma once

// Node-loop kernels. Every assembly over quadrature nodes has two paths:
//   Exec::serial    - the plain reference loop, kept for testing;
//   Exec::parallel  - OpenMP over fixed-size node blocks. Block partials are
//                     summed in block order, so results do not depend on the
//                     thread count.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace klab {

enum class Exec { serial, parallel };

inline constexpr std::size_t kReduceBlock = 64;

/// Sum body(i, acc) over i in [0, n). `zero` fixes the accumulator shape.
template <class T, class Body>
T reduce_nodes(std::size_t n, const T& zero, Body&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::serial) {
    T acc = zero;
    for (std::size_t i = 0; i < n; ++i) body(i, acc);
    return acc;
  }
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<T> partial(blocks, zero);
  // exceptions must not cross the parallel region; the lowest block wins
  std::vector<std::exception_ptr> errors(blocks);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    try {
      for (std::size_t i = lo; i < hi; ++i) body(i, partial[b]);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  T acc = zero;
  for (const auto& p : partial) acc += p;
  return acc;
}

/// out[i] = f(i) for i in [0, n).
template <class T, class F>
std::vector<T> map_nodes(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  std::vector<T> out(n);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace klab
