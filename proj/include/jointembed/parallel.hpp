// Copyright 2026 The jointembed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JOINTEMBED_PARALLEL_HPP
#define JOINTEMBED_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jointembed::parallel {

namespace detail {
inline int& worker_count() {
  static int workers = 1;
  return workers;
}
}  // namespace detail

/// Number of workers used by for_each_index. Results never depend on it:
/// every parallel loop writes to per-index slots and reductions are done
/// afterwards in index order.
inline int workers() { return detail::worker_count(); }

inline void set_workers(int count) { detail::worker_count() = std::max(1, count); }

/// Runs body(i) for i in [0, count). Bodies must only write state owned by i.
/// If bodies throw, the exception of the lowest failing index is rethrown.
template <typename Body>
void for_each_index(std::size_t count, Body&& body) {
#ifdef _OPENMP
  const int w = workers();
  if (w > 1 && count > 1) {
    std::vector<std::exception_ptr> failures(count);
#pragma omp parallel for schedule(static) num_threads(w)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        failures[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace jointembed::parallel

#endif  // JOINTEMBED_PARALLEL_HPP
