#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plarod {

// Chunked parallel reduction whose result is bitwise independent of the
// thread count: each fixed-size chunk is summed sequentially, chunk partials
// are combined in index order. threads == 1 runs the serial reference path.
inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class Body>
double chunked_reduce(std::size_t count, int threads, const Body& body,
                      std::size_t chunk = 64) {
  if (count == 0) return 0.0;
  const std::size_t nchunks = (count + chunk - 1) / chunk;
  if (threads <= 1 || nchunks == 1) {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += body(i);
    return total;
  }
  std::vector<double> partial(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = begin + chunk < count ? begin + chunk : count;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += body(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class Body>
void parallel_for(std::size_t count, int threads, const Body& body) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    body(static_cast<std::size_t>(i));
}

}  // namespace plarod
