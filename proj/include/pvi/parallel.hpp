#pragma once

#include <exception>

namespace pvi {

// Static-schedule OpenMP loop over [0, n). An exception thrown by fn is
// captured and the one from the lowest index is rethrown after the loop, so
// error reporting is independent of the thread count.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  int bad_index = n;
  std::exception_ptr bad;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(pvi_parallel_for_error)
      if (i < bad_index) {
        bad_index = i;
        bad = std::current_exception();
      }
    }
  }
  if (bad) std::rethrow_exception(bad);
}

template <class Fn>
void serial_for(int n, Fn&& fn) {
  for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace pvi
