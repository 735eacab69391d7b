#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <vector>

#include <omp.h>

namespace stablentk {

/// Resolves a requested worker count: 0 means the OpenMP default.
inline int resolve_workers(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Evaluates fn(0), ..., fn(n-1) on up to `workers` OpenMP threads and
/// returns the results in index order. fn must derive any randomness from its
/// index alone; then the output is identical for every worker count. The
/// first exception thrown by any task is rethrown after the loop.
template <class Fn>
auto parallel_map(std::size_t n, int workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<std::optional<T>> slots(n);
  std::exception_ptr error;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (long long r = 0; r < count; ++r) {
    try {
      slots[static_cast<std::size_t>(r)].emplace(fn(static_cast<std::size_t>(r)));
    } catch (...) {
#pragma omp critical(stablentk_parallel_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace stablentk
