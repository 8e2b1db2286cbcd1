#pragma once

// Fan an index range out over worker threads. Results are always gathered
// in index order so reductions do not depend on the schedule.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace arbor {

/// Calls fn(begin, end, chunk) on `jobs` contiguous chunks of [0, count).
/// Exceptions thrown by a worker are rethrown on the caller's thread.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    fn(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  const std::size_t step = (count + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::size_t begin = std::min(count, w * step);
    const std::size_t end = std::min(count, begin + step);
    workers.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// out[i] = fn(i) for i in [0, count).
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, Fn&& fn) {
  std::vector<R> out(count);
  parallel_chunks(count, jobs, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace arbor
